"""
Scenario runs: the unscheduled baseline against the GA schedule, with and
without local PV, and the exhaustive cross-check of the GA.
"""
from dataclasses import asdict, dataclass, field
import logging
import os
from typing import Any, Dict, Optional, Sequence, Tuple, Union

from homeload.evaluation.feasibility import baseline_schedule
from homeload.evaluation.metrics import hourly_load, par_or_none, profile_cost
from homeload.evaluation.pv_dispatch import (
    DispatchResult,
    billed_load,
    dispatch,
)
from homeload.exceptions import SearchSpaceTooLargeError
from homeload.ga.genetic_scheduler import GaRun, evolve
from homeload.ga.oracle import (
    DEFAULT_CAP,
    OracleResult,
    brute_force_optimum,
    search_space_size,
)
from homeload.scenario.io import load_scenario, scenario_to_dict
from homeload.scenario.model import (
    MAX_SEED,
    ScenarioConfig,
    Schedule,
    validate_scenario,
)
from homeload.utils.cli import write_json
from homeload.utils.plot_data import (
    CASE_WITH_PV,
    CASE_WITHOUT_PV,
    SCENARIO_FILENAME,
    SCHEDULES_FILENAME,
    SUMMARY_FILENAME,
    emit_plot_data,
)


LOG = logging.getLogger(__name__)

#: Relative tolerance of the daily energy conservation check.
ENERGY_TOLERANCE = 1e-9
#: Relative tolerance under which a GA cost counts as matching the optimum.
GAP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ScenarioComparison:
    """
    Unscheduled (``us``) against scheduled (``s``) outcome of one case.

    Energy totals are consumption. When the case has PV, peaks, costs and
    PAR are taken on the energy drawn from the grid. PAR and its reduction
    are None for a profile without load.
    """
    E_us_total: float
    E_s_total: float
    u_us: float
    u_s: float
    cost_us: float
    cost_s: float
    par_us: Optional[float]
    par_s: Optional[float]
    bill_reduction_pct: float
    par_reduction_pct: Optional[float]
    eq11_holds: bool
    eq12_holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def compare_schedules(
    unscheduled: Schedule, scheduled: Schedule, config: ScenarioConfig
) -> ScenarioComparison:
    """
    Compare two schedules of a scenario on energy, peak, cost and PAR.
    """
    e_us = hourly_load(unscheduled, config).total()
    e_s = hourly_load(scheduled, config).total()
    billed_us = billed_load(unscheduled, config)
    billed_s = billed_load(scheduled, config)
    cost_us = profile_cost(billed_us, config.price)
    cost_s = profile_cost(billed_s, config.price)
    par_us, par_s = par_or_none(billed_us), par_or_none(billed_s)

    bill_reduction = 0.0
    if cost_us > 0:
        bill_reduction = 100.0 * (cost_us - cost_s) / cost_us
    par_reduction = None
    if par_us is not None and par_s is not None:
        par_reduction = 100.0 * (par_us - par_s) / par_us

    return ScenarioComparison(
        E_us_total=e_us,
        E_s_total=e_s,
        u_us=billed_us.peak(),
        u_s=billed_s.peak(),
        cost_us=cost_us,
        cost_s=cost_s,
        par_us=par_us,
        par_s=par_s,
        bill_reduction_pct=bill_reduction,
        par_reduction_pct=par_reduction,
        eq11_holds=billed_s.peak() < billed_us.peak(),
        eq12_holds=abs(e_s - e_us) <= ENERGY_TOLERANCE * e_us,
    )


def relative_gap(ga_cost: float, optimum: float) -> float:
    """
    Optimality gap of a GA cost, relative to the optimum when it is
    positive, absolute otherwise.
    """
    if optimum > 0:
        return (ga_cost - optimum) / optimum
    return ga_cost - optimum


def _dispatch_dict(result: DispatchResult) -> Dict[str, Any]:
    return {
        "self_consumption_ratio": result.self_consumption_ratio,
        "self_sufficiency_ratio": result.self_sufficiency_ratio,
        "saturated_slots": result.saturated_slots(),
    }


@dataclass(frozen=True)
class CaseOutcome:
    """
    One case of a scenario run: the scenario as evaluated, both schedules,
    the GA run and their comparison.
    """
    name: str
    config: ScenarioConfig
    unscheduled: Schedule
    run: GaRun
    comparison: ScenarioComparison

    @property
    def scheduled(self) -> Schedule:
        return self.run.best_schedule

    def dispatch_summary(self) -> Optional[Dict[str, Any]]:
        if self.config.pv is None:
            return None
        return {
            label: _dispatch_dict(
                dispatch(hourly_load(s, self.config), self.config.pv))
            for label, s in (("unscheduled", self.unscheduled),
                             ("scheduled", self.scheduled))
        }


@dataclass(frozen=True)
class OracleCheck:
    case: str
    result: OracleResult
    ga_cost: float

    @property
    def gap(self) -> float:
        return relative_gap(self.ga_cost, self.result.best_cost)

    @property
    def matched(self) -> bool:
        return self.gap <= GAP_TOLERANCE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_cost": self.result.best_cost,
            "enumerated_count": self.result.enumerated_count,
            "ga_cost": self.ga_cost,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class ScenarioRun:
    """
    Every case of one scenario run, in execution order.
    """
    config: ScenarioConfig
    cases: Dict[str, CaseOutcome]
    oracle: Dict[str, OracleCheck] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.ga.seed

    @property
    def eq12_holds(self) -> bool:
        return all(c.comparison.eq12_holds for c in self.cases.values())

    @property
    def oracle_matched(self) -> bool:
        return all(o.matched for o in self.oracle.values())

    def summary(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "seed": self.seed,
            "cases": {n: c.comparison.to_dict()
                      for n, c in self.cases.items()},
            "runs": {n: c.run.to_dict() for n, c in self.cases.items()},
            "dispatch": {n: c.dispatch_summary()
                         for n, c in self.cases.items()
                         if c.config.pv is not None},
        }
        if self.oracle:
            d["oracle"] = {n: o.to_dict() for n, o in self.oracle.items()}
        return d

    def schedules(self) -> Dict[str, Any]:
        return {
            "cases": {
                n: {"unscheduled": c.unscheduled.to_list(),
                    "scheduled": c.scheduled.to_list()}
                for n, c in self.cases.items()
            }
        }


def execute_scenario(
    config: ScenarioConfig, seed: Optional[int] = None,
    include_pv: bool = True, oracle_cap: Optional[int] = None
) -> ScenarioRun:
    """
    Evolve and compare the scenario without PV and, when it has a PV source
    and ``include_pv`` is set, with PV. Both cases use the same seed.

    :param seed: Replaces the scenario's GA seed when given.
    :param oracle_cap: When given, also solve every case exhaustively.

    :raises ScenarioValidationError: The seed override is out of range.
    :raises SearchSpaceTooLargeError: The exhaustive check was requested and
        the search space exceeds ``oracle_cap``; raised before any GA work.
    """
    if seed is not None:
        config = validate_scenario(config.with_ga(seed=seed))
    if oracle_cap is not None:
        size = search_space_size(config)
        if size > oracle_cap:
            raise SearchSpaceTooLargeError(size, oracle_cap)

    case_configs = [(CASE_WITHOUT_PV, config.with_pv(None))]
    if include_pv and config.pv is not None:
        case_configs.append((CASE_WITH_PV, config))

    cases: Dict[str, CaseOutcome] = {}
    oracle: Dict[str, OracleCheck] = {}
    unscheduled = baseline_schedule(config)
    for name, case_config in case_configs:
        LOG.info("Evolving case %s (seed %d)", name, config.ga.seed)
        run = evolve(case_config)
        comparison = compare_schedules(unscheduled, run.best_schedule,
                                       case_config)
        LOG.info("Case %s: bill reduction %.4f%%, PAR reduction %s", name,
                 comparison.bill_reduction_pct, comparison.par_reduction_pct)
        if not comparison.eq12_holds:
            LOG.warning("Case %s: scheduled energy %f differs from "
                        "unscheduled %f", name, comparison.E_s_total,
                        comparison.E_us_total)
        cases[name] = CaseOutcome(name, case_config, unscheduled, run,
                                  comparison)
        if oracle_cap is not None:
            oracle[name] = OracleCheck(
                name, brute_force_optimum(case_config, oracle_cap),
                run.best_fitness)
    return ScenarioRun(config, cases, oracle)


def write_run_directory(run: ScenarioRun, out_dir: str) -> None:
    """
    Write the scenario echo, the schedules, the summary and the plot data
    CSVs of a run into ``out_dir``, creating it if needed.
    """
    os.makedirs(out_dir, exist_ok=True)
    write_json(os.path.join(out_dir, SCENARIO_FILENAME),
               scenario_to_dict(run.config))
    write_json(os.path.join(out_dir, SCHEDULES_FILENAME), run.schedules())
    write_json(os.path.join(out_dir, SUMMARY_FILENAME), run.summary())
    emit_plot_data(out_dir)
    LOG.info("Wrote run directory %s", out_dir)


def run_scenario(
    scenario: Union[str, ScenarioConfig], out_dir: Optional[str] = None,
    seed: Optional[int] = None, include_pv: bool = True,
    oracle_cap: Optional[int] = None
) -> ScenarioRun:
    """
    Load a scenario file (or take a scenario), execute it and, when
    ``out_dir`` is given, write the run directory.

    :raises OSError: The scenario file could not be read.
    :raises ScenarioValidationError: The scenario is invalid.
    :raises SearchSpaceTooLargeError: See :func:`execute_scenario`.
    """
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    run = execute_scenario(scenario, seed=seed, include_pv=include_pv,
                           oracle_cap=oracle_cap)
    if out_dir is not None:
        write_run_directory(run, out_dir)
    return run


@dataclass(frozen=True)
class OracleReport:
    """
    GA costs over a range of seeds against the exhaustive optimum.
    """
    optimum: OracleResult
    seeds: Tuple[int, ...]
    ga_costs: Tuple[float, ...]

    @property
    def gaps(self) -> Tuple[float, ...]:
        return tuple(relative_gap(c, self.optimum.best_cost)
                     for c in self.ga_costs)

    @property
    def matches(self) -> int:
        return sum(1 for g in self.gaps if g <= GAP_TOLERANCE)

    @property
    def match_fraction(self) -> float:
        return self.matches / len(self.seeds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_cost": self.optimum.best_cost,
            "enumerated_count": self.optimum.enumerated_count,
            "seeds": list(self.seeds),
            "ga_costs": list(self.ga_costs),
            "gaps": list(self.gaps),
            "match_fraction": self.match_fraction,
        }


def verify_against_oracle(
    scenario: Union[str, ScenarioConfig], cap: int = DEFAULT_CAP,
    seeds: Union[int, Sequence[int]] = 100, base_seed: int = 0
) -> OracleReport:
    """
    Solve a scenario exhaustively and run the GA once per seed against it.

    :param seeds: Explicit seeds, or how many consecutive seeds to use
        starting at ``base_seed``.

    :raises SearchSpaceTooLargeError: The search space exceeds ``cap``.
    """
    config = (load_scenario(scenario) if isinstance(scenario, str)
              else scenario)
    if isinstance(seeds, int):
        if seeds < 1:
            raise ValueError("At least one seed is required (given {})"
                             .format(seeds))
        seed_list = tuple((base_seed + i) % (MAX_SEED + 1)
                          for i in range(seeds))
    else:
        seed_list = tuple(seeds)
    optimum = brute_force_optimum(config, cap)
    costs = []
    for s in seed_list:
        run = evolve(validate_scenario(config.with_ga(seed=s)))
        costs.append(run.best_fitness)
        LOG.debug("Seed %d: GA cost %f (optimum %f)", s, run.best_fitness,
                  optimum.best_cost)
    report = OracleReport(optimum, seed_list, tuple(costs))
    LOG.info("GA matched the optimum on %d of %d seed(s)", report.matches,
             len(seed_list))
    return report
