import numpy as np
import pytest

from homeload.evaluation.feasibility import (
    ViolationKind,
    baseline_schedule,
    check_feasibility,
    demand_penalty,
    penalty_weight,
    repair,
    repair_genome,
)
from homeload.exceptions import DimensionMismatchError
from homeload.scenario.io import reference_scenario
from homeload.scenario.model import ScenarioConfig, Schedule

from tests.stubs import CL, ICL, NL, appliance, scenario


def row_schedule(slots: list) -> Schedule:
    bits = np.zeros((1, 24), dtype=np.uint8)
    bits[0, slots] = 1
    return Schedule(bits)


def random_config(rng: np.random.Generator) -> ScenarioConfig:
    fleet = []
    for i in range(int(rng.integers(1, 5))):
        category = (NL, CL, ICL)[int(rng.integers(3))]
        start = int(rng.integers(0, 20))
        end = int(rng.integers(start, 24))
        calls = int(rng.integers(1, end - start + 2))
        fleet.append(appliance(category, rating=float(rng.uniform(0.1, 3)),
                               on_calls=calls, earliest_start=start,
                               latest_end=end, id="a{}".format(i)))
    prices = rng.integers(1, 6, size=24).astype(float)
    return scenario(fleet, prices=prices, demand_limit=[30.0] * 24)


class TestCheckFeasibility (object):

    def test_fixed_nl_matches(self) -> None:
        config = scenario([appliance(NL, on_calls=22)])
        assert check_feasibility(row_schedule(list(range(22))), config) == []

    def test_fixed_nl_shifted(self) -> None:
        config = scenario([appliance(NL, on_calls=22)])
        found = check_feasibility(row_schedule(list(range(1, 23))), config)
        assert [v.kind for v in found] == [ViolationKind.FIXED_NL]
        assert found[0].appliance_id == "a"
        assert found[0].slot is None

    def test_cl_two_blocks(self) -> None:
        config = scenario([appliance(CL, on_calls=5)])
        found = check_feasibility(row_schedule([2, 3, 7, 8, 9]), config)
        assert [v.kind for v in found] == [ViolationKind.CONTIGUITY_CL]

    def test_on_call_count(self) -> None:
        config = scenario([appliance(ICL, on_calls=3)])
        found = check_feasibility(row_schedule([1, 5]), config)
        assert [v.kind for v in found] == [ViolationKind.ON_CALL_COUNT]

    def test_window_bound(self) -> None:
        config = scenario([appliance(ICL, on_calls=2, earliest_start=4,
                                     latest_end=10)])
        found = check_feasibility(row_schedule([3, 5]), config)
        assert [v.kind for v in found] == [ViolationKind.WINDOW_BOUND]
        assert "[3]" in found[0].detail

    def test_demand_limit(self) -> None:
        config = reference_scenario()
        bits = np.zeros((6, 24), dtype=np.uint8)
        bits[:, 0] = 1
        found = check_feasibility(Schedule(bits), config)
        demand = [v for v in found if v.kind is ViolationKind.DEMAND_LIMIT]
        assert len(demand) == 1
        assert demand[0].slot == 0
        assert demand[0].appliance_id is None
        assert found[0] is demand[0]

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(DimensionMismatchError):
            check_feasibility(Schedule.zeros(2), reference_scenario())


class TestRepair (object):

    def setup_method(self) -> None:
        self.rng = np.random.default_rng(0)

    def test_feasible_unchanged(self) -> None:
        config = reference_scenario()
        s = baseline_schedule(config)
        assert repair(s, config, self.rng) == s

    def test_cl_all_ones_centres(self) -> None:
        config = scenario([appliance(CL, on_calls=5)])
        fixed = repair(row_schedule(list(range(24))), config, self.rng)
        assert fixed.on_slots(0).tolist() == [9, 10, 11, 12, 13]

    def test_cl_respects_window(self) -> None:
        config = scenario([appliance(CL, on_calls=3, earliest_start=5,
                                     latest_end=9)])
        fixed = repair(row_schedule([20, 21, 22]), config, self.rng)
        assert fixed.on_slots(0).tolist() == [7, 8, 9]

    def test_cl_empty_row_draws_start(self) -> None:
        config = scenario([appliance(CL, on_calls=4, earliest_start=2,
                                     latest_end=12)])
        starts = set()
        for _ in range(200):
            on = repair(Schedule.zeros(1), config, self.rng).on_slots(0)
            assert on.tolist() == list(range(on[0], on[0] + 4))
            starts.add(int(on[0]))
        assert starts == set(range(2, 10))

    def test_icl_trims_most_expensive(self) -> None:
        config = scenario([appliance(ICL, on_calls=7)],
                          prices=reference_scenario().price.prices)
        fixed = repair(row_schedule([0, 7, 8, 11, 12, 13, 16, 17, 20]),
                       config, self.rng)
        # slots 12 and 13 carry the top price
        assert fixed.on_slots(0).tolist() == [0, 7, 8, 11, 16, 17, 20]

    def test_icl_adds_cheapest_lower_slot_first(self) -> None:
        prices = [4.0] * 24
        prices[5] = prices[9] = prices[2] = 1.0
        config = scenario([appliance(ICL, on_calls=3)], prices=prices)
        fixed = repair(row_schedule([9]), config, self.rng)
        assert fixed.on_slots(0).tolist() == [2, 5, 9]
        config = scenario([appliance(ICL, on_calls=2)], prices=prices)
        assert repair(Schedule.zeros(1), config,
                      self.rng).on_slots(0).tolist() == [2, 5]

    def test_icl_drops_bits_outside_window(self) -> None:
        config = scenario([appliance(ICL, on_calls=2, earliest_start=10,
                                     latest_end=15)])
        fixed = repair(row_schedule([0, 1, 12, 14]), config, self.rng)
        assert fixed.on_slots(0).tolist() == [12, 14]

    def test_nl_independent_of_input(self) -> None:
        config = scenario([appliance(NL, on_calls=3, earliest_start=4)])
        for slots in ([], [0, 23], list(range(24))):
            assert repair(row_schedule(slots), config,
                          self.rng).on_slots(0).tolist() == [4, 5, 6]

    def test_contract_over_random_genomes(self) -> None:
        rng = np.random.default_rng(42)
        for _ in range(500):
            config = random_config(rng)
            for _ in range(20):
                raw = Schedule(rng.integers(0, 2, size=(config.n_appliances,
                                                        24)))
                fixed = repair(raw, config, rng)
                kinds = {v.kind for v in check_feasibility(fixed, config)}
                assert kinds <= {ViolationKind.DEMAND_LIMIT}
                assert repair(fixed, config, rng) == fixed
                for a, row in zip(config.appliances, fixed.bits):
                    assert not (row & ~a.window_mask()).any()

    def test_repair_genome(self) -> None:
        config = reference_scenario()
        genome = np.ones(config.genome_length, dtype=np.uint8)
        fixed = repair_genome(genome, config, self.rng)
        assert fixed.shape == (144,)
        found = check_feasibility(Schedule.from_genome(fixed, 6), config)
        assert all(v.kind is ViolationKind.DEMAND_LIMIT for v in found)
        with pytest.raises(DimensionMismatchError):
            repair_genome(genome[:-1], config, self.rng)


class TestPenalty (object):

    def test_weight(self) -> None:
        config = reference_scenario()
        assert penalty_weight(config) == 1000.0 * 20.0

    def test_no_limit(self) -> None:
        config = scenario([appliance(ICL)])
        assert demand_penalty(np.full(24, 50.0), config) == 0.0

    def test_excess(self) -> None:
        prices = [1.0] * 24
        prices[1], prices[3] = 5.0, 2.0
        config = scenario([appliance(ICL, rating=2.0, on_calls=2)],
                          prices=prices, demand_limit=[1.0] * 24)
        load = np.zeros(24)
        load[[1, 3]] = 2.0
        assert demand_penalty(load, config) == 5000.0 * 2.0

    def test_batched(self) -> None:
        config = scenario([appliance(ICL)], demand_limit=[1.0] * 24)
        loads = np.zeros((3, 24))
        loads[1, 0] = 3.0
        loads[2, :] = 1.5
        assert demand_penalty(loads, config).tolist() == [0.0, 2000.0,
                                                          12000.0]

    def test_baseline(self) -> None:
        config = reference_scenario()
        s = baseline_schedule(config)
        assert [s.on_slots(i).tolist() for i in range(6)] == [
            list(range(a.on_calls)) for a in config.appliances]
