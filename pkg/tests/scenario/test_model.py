import numpy as np
import pytest

from homeload.exceptions import DimensionMismatchError, ScenarioValidationError
from homeload.scenario.io import reference_scenario
from homeload.scenario.model import (
    GaParams,
    PriceSignal,
    PvProfile,
    Schedule,
    TIME_GRID,
    check_dimensions,
    find_violations,
    mandatory_load,
    validate_scenario,
)

from tests.stubs import CL, ICL, NL, appliance, scenario


class TestAppliance (object):

    def test_window(self) -> None:
        a = appliance(CL, on_calls=3, earliest_start=4, latest_end=9)
        assert a.window == range(4, 10)
        assert a.window_length == 6
        assert a.window_mask().sum() == 6
        assert a.window_mask()[4] and a.window_mask()[9]
        assert not a.window_mask()[3] and not a.window_mask()[10]

    def test_fixed_pattern(self) -> None:
        a = appliance(NL, on_calls=3, earliest_start=5)
        row = a.fixed_pattern()
        assert np.flatnonzero(row).tolist() == [5, 6, 7]
        assert row.dtype == np.uint8

    def test_is_shiftable(self) -> None:
        assert not appliance(NL).is_shiftable
        assert appliance(CL).is_shiftable
        assert appliance(ICL).is_shiftable


class TestSchedule (object):

    def test_rejects_non_binary(self) -> None:
        bits = np.zeros((1, 24))
        bits[0, 3] = 2
        with pytest.raises(ValueError):
            Schedule(bits)

    def test_rejects_bad_shape(self) -> None:
        with pytest.raises(DimensionMismatchError):
            Schedule(np.zeros((2, 23)))
        with pytest.raises(DimensionMismatchError):
            Schedule(np.zeros(24))

    def test_read_only_copy(self) -> None:
        src = np.zeros((1, 24), dtype=np.uint8)
        s = Schedule(src)
        src[0, 0] = 1
        assert s.bits[0, 0] == 0
        with pytest.raises(ValueError):
            s.bits[0, 0] = 1

    def test_genome_decodes_back(self) -> None:
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, size=(3, 24))
        s = Schedule(bits)
        g = s.genome()
        assert g.shape == (72,)
        assert g[24:48].tolist() == bits[1].tolist()
        assert Schedule.from_genome(g, 3) == s

    def test_from_genome_length_mismatch(self) -> None:
        with pytest.raises(DimensionMismatchError):
            Schedule.from_genome(np.zeros(47), 2)

    def test_equality_and_hash(self) -> None:
        a = Schedule.zeros(2)
        b = Schedule(np.zeros((2, 24), dtype=int))
        assert a == b
        assert hash(a) == hash(b)
        assert a != Schedule.zeros(3)

    def test_on_slots(self) -> None:
        bits = np.zeros((2, 24), dtype=np.uint8)
        bits[1, [2, 7]] = 1
        assert Schedule(bits).on_slots(1).tolist() == [2, 7]


class TestTimeGrid (object):

    def test_check_vector(self) -> None:
        assert TIME_GRID.slot_count == 24
        assert TIME_GRID.check_vector([1] * 24).dtype == np.float64
        with pytest.raises(DimensionMismatchError):
            TIME_GRID.check_vector([1] * 23)


class TestConfigurables (object):

    def test_ga_defaults(self) -> None:
        cfg = GaParams.get_default_config()
        assert cfg == {
            "population_size": 50,
            "max_generations": 500,
            "tournament_size": 3,
            "crossover_rate": 0.9,
            "mutation_rate": None,
            "placement_rate": None,
            "stagnation_window": 30,
            "seed": 0,
        }

    def test_ga_partial_config(self) -> None:
        p = GaParams.from_config({"seed": 7, "population_size": 10})
        assert p.seed == 7
        assert p.population_size == 10
        assert p.max_generations == 500
        assert GaParams.from_config(p.get_config()) == p

    def test_resolved_mutation_rate(self) -> None:
        assert GaParams().resolved_mutation_rate(240) == 1.0 / 240
        assert GaParams(mutation_rate=0.25).resolved_mutation_rate(240) == 0.25

    def test_resolved_placement_rate(self) -> None:
        assert GaParams().resolved_placement_rate(4) == 0.25
        assert GaParams().resolved_placement_rate(0) == 0.0
        assert GaParams(placement_rate=0.5).resolved_placement_rate(4) == 0.5

    def test_pv_defaults(self) -> None:
        pv = PvProfile.from_config({})
        assert pv == PvProfile(3.0, 13.0, 10.0, 6, 18)
        assert PvProfile.from_config(pv.get_config()) == pv


class TestValidation (object):

    def test_reference_accepted(self) -> None:
        config = reference_scenario()
        assert find_violations(config) == []
        assert validate_scenario(config) is config
        # idempotent
        assert validate_scenario(validate_scenario(config)) is config

    def test_window_cannot_hold_duty_cycle(self) -> None:
        config = scenario([appliance(CL, on_calls=5, earliest_start=20,
                                     latest_end=22)])
        found = find_violations(config)
        assert len(found) == 1
        assert "window can hold duty cycle" in found[0].message

    def test_price_length(self) -> None:
        config = scenario([appliance(ICL)], prices=[1.0] * 23)
        found = find_violations(config)
        assert len(found) == 1
        assert found[0].field == "price"
        assert "length 24" in found[0].message

    def test_price_needs_positive_entry(self) -> None:
        found = find_violations(scenario([appliance(ICL)], prices=[0.0] * 24))
        assert [v.field for v in found] == ["price"]

    def test_negative_price_entry(self) -> None:
        prices = [1.0] * 24
        prices[5] = -1.0
        found = find_violations(scenario([appliance(ICL)], prices=prices))
        assert [v.field for v in found] == ["price[5]"]

    def test_independent_defects_each_reported(self) -> None:
        a = appliance(ICL, rating=0.0, on_calls=0)
        config = scenario([a], prices=[1.0] * 23)
        fields = [v.field for v in find_violations(config)]
        assert fields == ["appliances[0].rating", "appliances[0].on_calls",
                          "price"]

    def test_duplicate_ids(self) -> None:
        a = appliance(ICL, id="x")
        b = appliance(CL, id="x")
        config = scenario([a])
        config = config.__class__(appliances=(a, b), price=config.price)
        found = find_violations(config)
        assert len(found) == 1
        assert "duplicate" in found[0].message

    def test_no_appliances(self) -> None:
        found = find_violations(scenario([]))
        assert [v.field for v in found] == ["appliances"]

    def test_bad_window_bounds(self) -> None:
        found = find_violations(scenario([
            appliance(ICL, earliest_start=10, latest_end=9)]))
        assert [v.field for v in found] == ["appliances[0].window"]

    def test_demand_limit_below_mandatory_load(self) -> None:
        config = scenario([appliance(NL, rating=5.0, on_calls=24)],
                          demand_limit=[4.0] * 24)
        found = find_violations(config)
        assert len(found) == 24
        assert all("infeasible" in v.message for v in found)

    def test_demand_limit_entries(self) -> None:
        limit = [1.0] * 24
        limit[0] = 0.0
        found = find_violations(scenario([appliance(ICL)],
                                         demand_limit=limit))
        assert [v.field for v in found] == ["demand_limit[0]"]

    def test_pv_checks(self) -> None:
        pv = PvProfile(sigma=0.0, delta=20.0, scale=-1.0)
        found = find_violations(scenario([appliance(ICL)], pv=pv))
        assert sorted(v.field for v in found) == [
            "pv.delta", "pv.scale", "pv.sigma"]

    def test_ga_checks(self) -> None:
        config = scenario([appliance(ICL)], population_size=4,
                          tournament_size=5, crossover_rate=1.5,
                          mutation_rate=-0.1, placement_rate=2.0, seed=-1)
        fields = sorted(v.field for v in find_violations(config))
        assert fields == ["ga.crossover_rate", "ga.mutation_rate",
                          "ga.placement_rate", "ga.seed",
                          "ga.tournament_size"]

    def test_population_size_at_least_two(self) -> None:
        config = scenario([appliance(ICL)], population_size=1,
                          tournament_size=1)
        assert [v.field for v in find_violations(config)] == [
            "ga.population_size"]

    def test_validate_raises_with_all_violations(self) -> None:
        config = scenario([appliance(ICL, rating=-1.0)], prices=[1.0] * 3)
        with pytest.raises(ScenarioValidationError) as info:
            validate_scenario(config)
        assert len(info.value.violations) == 2
        assert "2 violation(s)" in str(info.value)


class TestHelpers (object):

    def test_mandatory_load(self) -> None:
        fleet = [appliance(NL, rating=2.0, on_calls=2, earliest_start=1),
                 appliance(ICL, rating=9.0)]
        load = mandatory_load(fleet)
        assert load.tolist()[:4] == [0.0, 2.0, 2.0, 0.0]
        assert load.sum() == 4.0

    def test_check_dimensions(self) -> None:
        config = scenario([appliance(ICL), appliance(CL)])
        assert len(check_dimensions(Schedule.zeros(2), config)) == 2
        assert len(check_dimensions(Schedule.zeros(2),
                                    list(config.appliances))) == 2
        with pytest.raises(DimensionMismatchError):
            check_dimensions(Schedule.zeros(3), config)

    def test_price_signal(self) -> None:
        p = PriceSignal((1.0, 4.0, 2.0))
        assert p.max_price == 4.0
        assert p.as_array().tolist() == [1.0, 4.0, 2.0]
