import os
from typing import Any
import unittest.mock as mock

import pytest

from homeload.evaluation.feasibility import baseline_schedule
from homeload.exceptions import ScenarioValidationError, SearchSpaceTooLargeError
from homeload.ga.genetic_scheduler import GaRun, TerminationReason
from homeload.scenario.io import reference_scenario
from homeload.utils.comparison import (
    ScenarioRun,
    compare_schedules,
    execute_scenario,
    relative_gap,
    run_scenario,
    verify_against_oracle,
)
from homeload.utils.plot_data import (
    CASE_WITH_PV,
    CASE_WITHOUT_PV,
    PLOT_FILENAMES,
    SCENARIO_FILENAME,
    SCHEDULES_FILENAME,
    SUMMARY_FILENAME,
)

from tests.stubs import NL, appliance, scenario, single_icl_scenario


@pytest.fixture(scope="module")
def reference_run() -> ScenarioRun:
    return execute_scenario(reference_scenario())


class TestReferenceScenarioRun (object):
    """
    Trends the reference household must show with the default price signal.
    """

    def test_cases(self, reference_run: ScenarioRun) -> None:
        assert list(reference_run.cases) == [CASE_WITHOUT_PV, CASE_WITH_PV]
        assert reference_run.cases[CASE_WITHOUT_PV].config.pv is None
        assert reference_run.seed == 0

    def test_scheduling_lowers_bill(self, reference_run: ScenarioRun) -> None:
        c = reference_run.cases[CASE_WITHOUT_PV].comparison
        assert c.cost_s < c.cost_us
        assert c.bill_reduction_pct > 0

    def test_pv_increases_bill_reduction(
        self, reference_run: ScenarioRun
    ) -> None:
        without = reference_run.cases[CASE_WITHOUT_PV].comparison
        with_pv = reference_run.cases[CASE_WITH_PV].comparison
        assert with_pv.bill_reduction_pct > without.bill_reduction_pct

    def test_par_reduction(self, reference_run: ScenarioRun) -> None:
        without = reference_run.cases[CASE_WITHOUT_PV].comparison
        with_pv = reference_run.cases[CASE_WITH_PV].comparison
        assert without.par_reduction_pct is not None
        assert with_pv.par_reduction_pct is not None
        assert without.par_reduction_pct > 0
        assert with_pv.par_reduction_pct > without.par_reduction_pct

    def test_energy_conserved_and_peak_lowered(
        self, reference_run: ScenarioRun
    ) -> None:
        assert reference_run.eq12_holds
        for case in reference_run.cases.values():
            c = case.comparison
            assert c.E_s_total == pytest.approx(117.7, rel=1e-12)
            assert c.eq12_holds
            assert c.eq11_holds
            assert c.u_s < c.u_us

    def test_summary_shape(self, reference_run: ScenarioRun) -> None:
        summary = reference_run.summary()
        assert set(summary) == {"seed", "cases", "runs", "dispatch"}
        assert set(summary["dispatch"]) == {CASE_WITH_PV}
        assert set(summary["dispatch"][CASE_WITH_PV]) == {"unscheduled",
                                                          "scheduled"}
        schedules = reference_run.schedules()["cases"]
        assert len(schedules[CASE_WITH_PV]["scheduled"]) == 6
        assert not reference_run.oracle
        assert reference_run.oracle_matched


class TestCompareSchedules (object):

    def test_necessary_only(self) -> None:
        config = scenario([appliance(NL, rating=2.0, on_calls=5),
                           appliance(NL, rating=1.0, on_calls=3, id="b")])
        run = execute_scenario(config.with_ga(population_size=4,
                                              max_generations=3))
        c = run.cases[CASE_WITHOUT_PV].comparison
        assert c.cost_s == c.cost_us
        assert c.bill_reduction_pct == 0.0
        assert c.eq12_holds
        assert not c.eq11_holds

    def test_identical_schedules(self) -> None:
        config = reference_scenario()
        s = baseline_schedule(config)
        c = compare_schedules(s, s, config)
        assert c.par_reduction_pct == 0.0
        assert c.to_dict()["E_us_total"] == c.E_s_total

    def test_par_undefined_without_load(self) -> None:
        config = scenario([appliance(NL, rating=0.5, on_calls=2,
                                     earliest_start=12)])
        config = config.with_pv(reference_scenario().pv)
        s = baseline_schedule(config)
        c = compare_schedules(s, s, config)
        # PV covers the whole load, nothing is drawn from the grid
        assert c.cost_us == 0.0
        assert c.par_us is None
        assert c.par_reduction_pct is None
        assert c.bill_reduction_pct == 0.0


class TestRelativeGap (object):

    def test_gap(self) -> None:
        assert relative_gap(12.0, 10.0) == pytest.approx(0.2)
        assert relative_gap(10.0, 10.0) == 0.0
        assert relative_gap(3.0, 0.0) == 3.0


class TestOracleChecks (object):

    def test_run_with_oracle(self) -> None:
        config = single_icl_scenario(population_size=20, max_generations=60,
                                     stagnation_window=60)
        run = execute_scenario(config, oracle_cap=1000)
        check = run.oracle[CASE_WITHOUT_PV]
        assert check.result.best_cost == 6.0
        assert check.matched
        assert run.oracle_matched
        assert run.summary()["oracle"][CASE_WITHOUT_PV]["gap"] == 0.0

    def test_cap_checked_before_evolving(self) -> None:
        with pytest.raises(SearchSpaceTooLargeError):
            execute_scenario(reference_scenario(), oracle_cap=1000)

    def test_seed_override_validated(self) -> None:
        with pytest.raises(ScenarioValidationError):
            execute_scenario(single_icl_scenario(), seed=-1)

    def test_verify_single_inconsistent_load(self) -> None:
        report = verify_against_oracle(
            single_icl_scenario(population_size=20, max_generations=60,
                                stagnation_window=60),
            cap=1000, seeds=5, base_seed=10)
        assert report.seeds == (10, 11, 12, 13, 14)
        assert report.optimum.best_cost == 6.0
        assert report.match_fraction == 1.0
        assert report.to_dict()["gaps"] == [0.0] * 5

    def test_crippled_ga_leaves_gap(self) -> None:
        config = single_icl_scenario()
        baseline = baseline_schedule(config)
        # a GA stuck on the baseline (slots 0 and 1) pays 12 against 6
        stuck = GaRun(best_schedule=baseline, best_fitness=12.0,
                      fitness_history=(12.0,), generations_executed=0,
                      terminated_by=TerminationReason.MAX_GENERATIONS)
        with mock.patch('homeload.utils.comparison.evolve',
                        return_value=stuck):
            report = verify_against_oracle(config, cap=1000, seeds=[0, 1])
        assert report.gaps == (1.0, 1.0)
        assert report.matches == 0
        assert report.match_fraction == 0.0

    def test_verify_needs_a_seed(self) -> None:
        with pytest.raises(ValueError):
            verify_against_oracle(single_icl_scenario(), cap=1000, seeds=0)


class TestRunDirectory (object):

    def test_written(self, tmp_path: Any) -> None:
        out = os.path.join(str(tmp_path), "run")
        config = single_icl_scenario(population_size=6, max_generations=5)
        run_scenario(config, out_dir=out)
        for name in (SCENARIO_FILENAME, SCHEDULES_FILENAME,
                     SUMMARY_FILENAME) + PLOT_FILENAMES:
            assert os.path.isfile(os.path.join(out, name))

    def test_no_pv_flag(self) -> None:
        run = execute_scenario(
            reference_scenario().with_ga(population_size=6,
                                         max_generations=2),
            include_pv=False)
        assert list(run.cases) == [CASE_WITHOUT_PV]
