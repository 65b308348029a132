"""
Value types shared by every part of the scheduler: the daily time grid,
appliances and their categories, binary schedules, the price signal, the PV
generation profile, genetic algorithm parameters and the scenario that bundles
them.

Types here are plain immutable containers. Construction does not check domain
invariants so that :func:`find_violations` can report every defect of a
scenario at once; :func:`validate_scenario` is the gate the rest of the
package relies on.
"""
from dataclasses import asdict, dataclass, field, replace
import enum
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from smqtk_core import Configurable

from homeload.exceptions import DimensionMismatchError, ScenarioValidationError


LOG = logging.getLogger(__name__)

#: Number of one-hour scheduling slots in a day.
SLOTS_PER_DAY = 24
#: Largest accepted random seed (unsigned 64-bit).
MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class TimeGrid:
    """
    Discretization of the scheduling day into one-hour slots indexed from 0.
    """
    slot_count: int = SLOTS_PER_DAY

    def __post_init__(self) -> None:
        if self.slot_count != SLOTS_PER_DAY:
            raise ValueError("Time grid must have exactly {} slots (given {})."
                             .format(SLOTS_PER_DAY, self.slot_count))

    @property
    def slots(self) -> range:
        return range(self.slot_count)

    def check_vector(self, values: Any, name: str = "vector") -> np.ndarray:
        """
        Return ``values`` as a float64 array, raising if it is not one entry
        per slot.

        :raises DimensionMismatchError: Wrong shape.
        """
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (self.slot_count,):
            raise DimensionMismatchError(
                "{} must have {} entries (given shape {})."
                .format(name, self.slot_count, arr.shape)
            )
        return arr


TIME_GRID = TimeGrid()


class ApplianceCategory (enum.Enum):
    """
    Load classes the controller distinguishes.
    """
    #: Necessary load, never shifted: fixed ON pattern.
    NL = "NL"
    #: Consistent load, shiftable, runs its duty cycle in one contiguous block.
    CL = "CL"
    #: Inconsistent load, shiftable and interruptible.
    ICL = "ICL"


@dataclass(frozen=True)
class Appliance:
    """
    One schedulable load.

    ``rating`` is the energy drawn in each ON slot (kWh). ``on_calls`` is the
    number of slots the appliance must be ON during the day, all of them
    within the inclusive window ``[earliest_start, latest_end]``.
    """
    id: str
    name: str
    category: ApplianceCategory
    rating: float
    on_calls: int
    earliest_start: int = 0
    latest_end: int = SLOTS_PER_DAY - 1

    @property
    def window(self) -> range:
        return range(self.earliest_start, self.latest_end + 1)

    @property
    def window_length(self) -> int:
        return self.latest_end - self.earliest_start + 1

    @property
    def is_shiftable(self) -> bool:
        return self.category is not ApplianceCategory.NL

    def window_mask(self) -> np.ndarray:
        """
        Boolean mask over the day, True inside the permitted window.
        """
        mask = np.zeros(SLOTS_PER_DAY, dtype=bool)
        mask[self.earliest_start:self.latest_end + 1] = True
        return mask

    def fixed_pattern(self) -> np.ndarray:
        """
        Earliest-start placement: ``on_calls`` consecutive ON slots starting
        at ``earliest_start``. This is the mandatory row of a necessary load
        and the unscheduled placement of every other category.
        """
        row = np.zeros(SLOTS_PER_DAY, dtype=np.uint8)
        row[self.earliest_start:self.earliest_start + self.on_calls] = 1
        return row


class Schedule:
    """
    Binary appliance-by-slot ON/OFF matrix.

    Rows follow the appliance order of the owning scenario, columns are the
    24 slots of the day. The underlying array is read-only.
    """

    def __init__(self, bits: Any):
        src = np.asarray(bits)
        if src.ndim != 2 or src.shape[1] != SLOTS_PER_DAY:
            raise DimensionMismatchError(
                "Schedule must be an N x {} matrix (given shape {})."
                .format(SLOTS_PER_DAY, src.shape)
            )
        if not np.isin(src, (0, 1)).all():
            raise ValueError("Schedule entries must be 0 or 1.")
        arr = src.astype(np.uint8)  # always a copy
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, n_appliances: int) -> "Schedule":
        return cls(np.zeros((n_appliances, SLOTS_PER_DAY), dtype=np.uint8))

    @classmethod
    def from_genome(cls, genome: Any, n_appliances: int) -> "Schedule":
        """
        Decode a flattened row-major (appliance-major, slot-minor) genome.

        :raises DimensionMismatchError: Genome length is not
            ``n_appliances * 24``.
        """
        g = np.asarray(genome)
        if g.shape != (n_appliances * SLOTS_PER_DAY,):
            raise DimensionMismatchError(
                "Genome of shape {} does not decode to {} appliance rows."
                .format(g.shape, n_appliances)
            )
        return cls(g.reshape(n_appliances, SLOTS_PER_DAY))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n_appliances(self) -> int:
        return self._bits.shape[0]

    def genome(self) -> np.ndarray:
        """
        Flattened row-major copy of the matrix.
        """
        return self._bits.reshape(-1).copy()

    def on_slots(self, row: int) -> np.ndarray:
        return np.flatnonzero(self._bits[row])

    def to_list(self) -> List[List[int]]:
        return self._bits.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Schedule):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self._bits.shape, self._bits.tobytes()))

    def __repr__(self) -> str:
        return "{}(n_appliances={}, on={})".format(
            self.__class__.__name__, self.n_appliances, int(self._bits.sum())
        )


@dataclass(frozen=True)
class PriceSignal:
    """
    Real-time price of each slot, currency units per kWh.
    """
    prices: Tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.prices, dtype=np.float64)

    @property
    def max_price(self) -> float:
        return max(self.prices)


@dataclass(frozen=True)
class PvProfile (Configurable):
    """
    Daylight-clamped Gaussian model of local PV generation.

    :param sigma: Spread of the generation curve in hours.
    :param delta: Hour of peak generation.
    :param scale: Multiplier of the normalized Gaussian (kWh).
    :param day_start: First daylight slot.
    :param day_end: Last daylight slot (inclusive).
    """
    sigma: float = 3.0
    delta: float = 13.0
    scale: float = 10.0
    day_start: int = 6
    day_end: int = 18

    def get_config(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class GaParams (Configurable):
    """
    Genetic algorithm parameters.

    :param population_size: Chromosomes per generation.
    :param max_generations: Upper bound on breeding generations.
    :param tournament_size: Members drawn per tournament.
    :param crossover_rate: Probability a selected pair is spliced.
    :param mutation_rate: Per-bit flip probability. ``None`` means one over
        the genome length.
    :param placement_rate: Probability that a child moves the placement of
        each shiftable appliance: a consistent load to a uniformly drawn
        start, one ON slot of an inconsistent load to an OFF slot of its
        window. ``None`` means one over the number of shiftable appliances.
    :param stagnation_window: Generations without improvement of the best
        fitness after which the run stops.
    :param seed: Seed of the run's random stream.
    """
    population_size: int = 50
    max_generations: int = 500
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None
    placement_rate: Optional[float] = None
    stagnation_window: int = 30
    seed: int = 0

    def get_config(self) -> Dict[str, Any]:
        return asdict(self)

    def resolved_mutation_rate(self, genome_length: int) -> float:
        if self.mutation_rate is None:
            return 1.0 / genome_length
        return float(self.mutation_rate)

    def resolved_placement_rate(self, n_shiftable: int) -> float:
        if self.placement_rate is not None:
            return float(self.placement_rate)
        return 1.0 / n_shiftable if n_shiftable else 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A complete scheduling problem: the appliance fleet (whose order is the
    row order of every schedule), the price signal, optional per-slot demand
    limit and PV source, and GA parameters.
    """
    appliances: Tuple[Appliance, ...]
    price: PriceSignal
    demand_limit: Optional[Tuple[float, ...]] = None
    pv: Optional[PvProfile] = None
    ga: GaParams = field(default_factory=GaParams)

    @property
    def n_appliances(self) -> int:
        return len(self.appliances)

    @property
    def genome_length(self) -> int:
        return self.n_appliances * SLOTS_PER_DAY

    def ratings(self) -> np.ndarray:
        return np.array([a.rating for a in self.appliances], dtype=np.float64)

    def demand_limit_array(self) -> Optional[np.ndarray]:
        if self.demand_limit is None:
            return None
        return np.array(self.demand_limit, dtype=np.float64)

    def with_pv(self, pv: Optional[PvProfile]) -> "ScenarioConfig":
        return replace(self, pv=pv)

    def with_ga(self, **changes: Any) -> "ScenarioConfig":
        return replace(self, ga=replace(self.ga, **changes))


@dataclass(frozen=True)
class ConfigViolation:
    """
    One violated scenario invariant and the field it concerns.
    """
    field: str
    message: str

    def __str__(self) -> str:
        return "{}: {}".format(self.field, self.message)


def _is_int(v: Any) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_real(v: Any) -> bool:
    return (isinstance(v, (int, float, np.integer, np.floating))
            and not isinstance(v, bool) and math.isfinite(v))


def _appliance_violations(i: int, a: Appliance) -> List[ConfigViolation]:
    p = "appliances[{}]".format(i)
    found: List[ConfigViolation] = []
    if not isinstance(a.category, ApplianceCategory):
        found.append(ConfigViolation(
            p + ".category", "must be one of NL, CL, ICL (given {!r})"
            .format(a.category)))
    if not (_is_real(a.rating) and a.rating > 0):
        found.append(ConfigViolation(
            p + ".rating", "rating must be > 0 (given {!r})".format(a.rating)))
    calls_ok = _is_int(a.on_calls) and 1 <= a.on_calls <= SLOTS_PER_DAY
    if not calls_ok:
        found.append(ConfigViolation(
            p + ".on_calls", "on_calls must be within [1, {}] (given {!r})"
            .format(SLOTS_PER_DAY, a.on_calls)))
    window_ok = (_is_int(a.earliest_start) and _is_int(a.latest_end) and
                 0 <= a.earliest_start <= a.latest_end <= SLOTS_PER_DAY - 1)
    if not window_ok:
        found.append(ConfigViolation(
            p + ".window", "need 0 <= earliest_start <= latest_end <= {} "
            "(given {!r}..{!r})".format(SLOTS_PER_DAY - 1, a.earliest_start,
                                         a.latest_end)))
    if calls_ok and window_ok and a.window_length < a.on_calls:
        found.append(ConfigViolation(
            p + ".on_calls", "window can hold duty cycle fails: {} slot "
            "window for {} ON calls".format(a.window_length, a.on_calls)))
    return found


def _appliance_ok(a: Appliance) -> bool:
    return not _appliance_violations(0, a)


def _vector_violations(
    name: str, values: Optional[Iterable[Any]], strictly_positive: bool
) -> Tuple[List[ConfigViolation], bool]:
    """
    Length and per-entry checks for a per-slot vector. Returns the
    violations and whether the length was right.
    """
    found: List[ConfigViolation] = []
    vals = list(values) if values is not None else []
    if len(vals) != SLOTS_PER_DAY:
        found.append(ConfigViolation(
            name, "length {} required (given {})"
            .format(SLOTS_PER_DAY, len(vals))))
        return found, False
    for t, v in enumerate(vals):
        ok = _is_real(v) and (v > 0 if strictly_positive else v >= 0)
        if not ok:
            found.append(ConfigViolation(
                "{}[{}]".format(name, t), "must be {} (given {!r})".format(
                    "> 0" if strictly_positive else ">= 0", v)))
    return found, True


def _pv_violations(pv: PvProfile) -> List[ConfigViolation]:
    found: List[ConfigViolation] = []
    if not (_is_real(pv.sigma) and pv.sigma > 0):
        found.append(ConfigViolation(
            "pv.sigma", "must be > 0 (given {!r})".format(pv.sigma)))
    if not (_is_real(pv.scale) and pv.scale >= 0):
        found.append(ConfigViolation(
            "pv.scale", "must be >= 0 (given {!r})".format(pv.scale)))
    day_ok = (_is_int(pv.day_start) and _is_int(pv.day_end) and
              0 <= pv.day_start <= pv.day_end <= SLOTS_PER_DAY - 1)
    if not day_ok:
        found.append(ConfigViolation(
            "pv.daylight", "need 0 <= day_start <= day_end <= {} "
            "(given {!r}..{!r})".format(SLOTS_PER_DAY - 1, pv.day_start,
                                         pv.day_end)))
    if not _is_real(pv.delta):
        found.append(ConfigViolation(
            "pv.delta", "must be a real number (given {!r})"
            .format(pv.delta)))
    elif day_ok and not (pv.day_start <= pv.delta <= pv.day_end):
        found.append(ConfigViolation(
            "pv.delta", "peak hour {} outside daylight {}..{}"
            .format(pv.delta, pv.day_start, pv.day_end)))
    return found


def _ga_violations(ga: GaParams) -> List[ConfigViolation]:
    found: List[ConfigViolation] = []

    def need(ok: bool, name: str, rule: str, value: Any) -> None:
        if not ok:
            found.append(ConfigViolation(
                "ga." + name, "{} (given {!r})".format(rule, value)))

    pop_ok = _is_int(ga.population_size) and ga.population_size >= 2
    need(pop_ok, "population_size", "must be an integer >= 2",
         ga.population_size)
    need(_is_int(ga.max_generations) and ga.max_generations >= 1,
         "max_generations", "must be a positive integer", ga.max_generations)
    k_ok = _is_int(ga.tournament_size) and ga.tournament_size >= 1
    if k_ok and pop_ok:
        k_ok = ga.tournament_size <= ga.population_size
    need(k_ok, "tournament_size",
         "must be an integer within [1, population_size]", ga.tournament_size)
    need(_is_real(ga.crossover_rate) and 0 <= ga.crossover_rate <= 1,
         "crossover_rate", "must be within [0, 1]", ga.crossover_rate)
    need(ga.mutation_rate is None or
         (_is_real(ga.mutation_rate) and 0 <= ga.mutation_rate <= 1),
         "mutation_rate", "must be null or within [0, 1]", ga.mutation_rate)
    need(ga.placement_rate is None or
         (_is_real(ga.placement_rate) and 0 <= ga.placement_rate <= 1),
         "placement_rate", "must be null or within [0, 1]",
         ga.placement_rate)
    need(_is_int(ga.stagnation_window) and ga.stagnation_window >= 1,
         "stagnation_window", "must be a positive integer",
         ga.stagnation_window)
    need(_is_int(ga.seed) and 0 <= ga.seed <= MAX_SEED,
         "seed", "must be an unsigned 64-bit integer", ga.seed)
    return found


def mandatory_load(appliances: Iterable[Appliance]) -> np.ndarray:
    """
    Per-slot load of the necessary (fixed) appliances, which every feasible
    schedule carries.
    """
    load = np.zeros(SLOTS_PER_DAY, dtype=np.float64)
    for a in appliances:
        if a.category is ApplianceCategory.NL:
            load += a.fixed_pattern() * a.rating
    return load


def find_violations(config: ScenarioConfig) -> List[ConfigViolation]:
    """
    Check every scenario invariant, returning each violation found.

    An empty list means the scenario is valid. Each independent defect is
    reported exactly once; checks that depend on a defective field are
    skipped rather than reported twice.
    """
    found: List[ConfigViolation] = []

    if not config.appliances:
        found.append(ConfigViolation(
            "appliances", "at least one appliance is required"))
    seen: Dict[str, int] = {}
    for a in config.appliances:
        seen[a.id] = seen.get(a.id, 0) + 1
    for a_id, count in seen.items():
        if count > 1:
            found.append(ConfigViolation(
                "appliances", "duplicate appliance id {!r} ({} times)"
                .format(a_id, count)))
    for i, a in enumerate(config.appliances):
        found.extend(_appliance_violations(i, a))

    price_found, _ = _vector_violations(
        "price", config.price.prices, strictly_positive=False)
    found.extend(price_found)
    if not price_found and not any(p > 0 for p in config.price.prices):
        found.append(ConfigViolation(
            "price", "at least one entry must be > 0"))

    if config.demand_limit is not None:
        limit_found, length_ok = _vector_violations(
            "demand_limit", config.demand_limit, strictly_positive=True)
        found.extend(limit_found)
        if length_ok:
            bad_slots = {v.field for v in limit_found}
            nl_load = mandatory_load(
                a for a in config.appliances
                if isinstance(a.category, ApplianceCategory) and
                _appliance_ok(a)
            )
            for t, d in enumerate(config.demand_limit):
                name = "demand_limit[{}]".format(t)
                if name not in bad_slots and nl_load[t] > d:
                    found.append(ConfigViolation(
                        name, "infeasible: necessary load {:g} kWh exceeds "
                        "the limit {:g} kWh".format(nl_load[t], d)))

    if config.pv is not None:
        found.extend(_pv_violations(config.pv))
    found.extend(_ga_violations(config.ga))
    return found


def validate_scenario(config: ScenarioConfig) -> ScenarioConfig:
    """
    Return ``config`` unchanged if it satisfies every invariant.

    :raises ScenarioValidationError: Carrying every violation found.
    """
    violations = find_violations(config)
    if violations:
        LOG.debug("Scenario rejected with %d violation(s)", len(violations))
        raise ScenarioValidationError(violations)
    return config


def check_dimensions(
    schedule: Schedule, appliances: Union[ScenarioConfig, Iterable[Appliance]]
) -> Tuple[Appliance, ...]:
    """
    Resolve the appliance sequence and verify it matches the schedule rows.

    :raises DimensionMismatchError: Row count differs from appliance count.
    """
    if isinstance(appliances, ScenarioConfig):
        fleet = appliances.appliances
    else:
        fleet = tuple(appliances)
    if schedule.n_appliances != len(fleet):
        raise DimensionMismatchError(
            "Schedule has {} rows but {} appliances were given."
            .format(schedule.n_appliances, len(fleet))
        )
    return fleet
