"""
Schedule constraints: checks that report every violation, and repair
operators that map an arbitrary binary matrix onto one satisfying the
per-appliance structural constraints.

The demand limit couples appliances and is not repaired; it is priced into
the fitness through :func:`demand_penalty`.
"""
from dataclasses import dataclass
import enum
import logging
from typing import List, Optional, Union

import numpy as np

from homeload.evaluation.metrics import hourly_load
from homeload.exceptions import DimensionMismatchError
from homeload.scenario.model import (
    Appliance,
    ApplianceCategory,
    ScenarioConfig,
    Schedule,
    SLOTS_PER_DAY,
    check_dimensions,
)


LOG = logging.getLogger(__name__)

#: Demand limit excess is charged this many times the highest slot price.
PENALTY_PRICE_MULTIPLE = 1000.0


class ViolationKind (enum.Enum):
    DEMAND_LIMIT = "DemandLimit"
    ON_CALL_COUNT = "OnCallCount"
    WINDOW_BOUND = "WindowBound"
    CONTIGUITY_CL = "ContiguityCL"
    FIXED_NL = "FixedNL"


@dataclass(frozen=True)
class Violation:
    """
    One broken schedule constraint.

    Demand limit violations name the slot, every other kind names the
    appliance.
    """
    kind: ViolationKind
    detail: str
    appliance_id: Optional[str] = None
    slot: Optional[int] = None

    def __str__(self) -> str:
        where = ("slot {}".format(self.slot) if self.slot is not None
                 else "appliance {!r}".format(self.appliance_id))
        return "{} ({}): {}".format(self.kind.value, where, self.detail)


def fixed_pattern(appliance: Appliance) -> np.ndarray:
    """
    Row of ``on_calls`` consecutive ON slots starting at the appliance's
    earliest start.
    """
    return appliance.fixed_pattern()


def baseline_schedule(config: ScenarioConfig) -> Schedule:
    """
    The unscheduled case: every appliance at its earliest feasible placement.
    """
    return Schedule(np.stack([fixed_pattern(a) for a in config.appliances]))


def penalty_weight(config: ScenarioConfig) -> float:
    return PENALTY_PRICE_MULTIPLE * config.price.max_price


def demand_penalty(
    load: np.ndarray, config: ScenarioConfig
) -> Union[float, np.ndarray]:
    """
    Penalty for load above the demand limit, summed over the last axis.

    :param load: Hourly load, shape ``[..., 24]``.

    :return: ``weight * sum(max(0, load - limit))``; zero when the scenario
        has no demand limit.
    """
    load = np.asarray(load, dtype=np.float64)
    if load.shape[-1:] != (SLOTS_PER_DAY,):
        raise DimensionMismatchError(
            "Load of shape {} does not end in {} slots."
            .format(load.shape, SLOTS_PER_DAY))
    limit = config.demand_limit_array()
    if limit is None:
        excess = np.zeros(load.shape[:-1], dtype=np.float64)
    else:
        excess = np.maximum(0.0, load - limit).sum(axis=-1)
    if excess.ndim == 0:
        return penalty_weight(config) * float(excess)
    return penalty_weight(config) * excess


def _row_violations(row: np.ndarray, a: Appliance) -> List[Violation]:
    found = []
    on = np.flatnonzero(row)
    if on.size != a.on_calls:
        found.append(Violation(
            ViolationKind.ON_CALL_COUNT,
            "{} ON slots, {} required".format(on.size, a.on_calls),
            appliance_id=a.id))
    outside = [int(t) for t in on
               if t < a.earliest_start or t > a.latest_end]
    if outside:
        found.append(Violation(
            ViolationKind.WINDOW_BOUND,
            "ON at slots {} outside window [{}, {}]".format(
                outside, a.earliest_start, a.latest_end),
            appliance_id=a.id))
    if (a.category is ApplianceCategory.CL and on.size and
            on[-1] - on[0] + 1 != on.size):
        found.append(Violation(
            ViolationKind.CONTIGUITY_CL,
            "ON slots {} are not one contiguous block".format(on.tolist()),
            appliance_id=a.id))
    if (a.category is ApplianceCategory.NL and
            not np.array_equal(row, a.fixed_pattern())):
        found.append(Violation(
            ViolationKind.FIXED_NL,
            "ON slots {} differ from the fixed pattern starting at {}"
            .format(on.tolist(), a.earliest_start),
            appliance_id=a.id))
    return found


def check_feasibility(
    schedule: Schedule, config: ScenarioConfig
) -> List[Violation]:
    """
    Report every violated constraint of a schedule; empty means feasible.

    Demand limit violations come first, one per offending slot, followed by
    the per-appliance violations in appliance order.

    :raises DimensionMismatchError: Schedule rows differ from the appliance
        count.
    """
    check_dimensions(schedule, config)
    found: List[Violation] = []
    limit = config.demand_limit_array()
    if limit is not None:
        load = hourly_load(schedule, config).load
        for t in np.flatnonzero(load > limit):
            found.append(Violation(
                ViolationKind.DEMAND_LIMIT,
                "load {:g} kWh exceeds limit {:g} kWh".format(
                    load[t], limit[t]),
                slot=int(t)))
    for a, row in zip(config.appliances, schedule.bits):
        found.extend(_row_violations(row, a))
    return found


def _repair_cl(
    row: np.ndarray, a: Appliance, rng: np.random.Generator
) -> np.ndarray:
    starts = np.arange(a.earliest_start, a.latest_end - a.on_calls + 2)
    on = np.flatnonzero(row)
    if on.size == 0:
        start = int(starts[rng.integers(starts.size)])
    else:
        centred = on.mean() - (a.on_calls - 1) / 2.0
        # argmin keeps the first, i.e. earlier, of two equidistant starts
        start = int(starts[np.argmin(np.abs(starts - centred))])
    out = np.zeros(SLOTS_PER_DAY, dtype=np.uint8)
    out[start:start + a.on_calls] = 1
    return out


def _repair_icl(
    row: np.ndarray, a: Appliance, prices: np.ndarray
) -> np.ndarray:
    mask = a.window_mask()
    kept = (row != 0) & mask
    on = np.flatnonzero(kept)
    excess = on.size - a.on_calls
    if excess > 0:
        # most expensive first, lower slot first on equal price
        order = np.lexsort((on, -prices[on]))
        kept[on[order[:excess]]] = False
    elif excess < 0:
        off = np.flatnonzero(mask & ~kept)
        order = np.lexsort((off, prices[off]))
        kept[off[order[:-excess]]] = True
    return kept.astype(np.uint8)


def repair_bits(
    bits: np.ndarray, config: ScenarioConfig, rng: np.random.Generator
) -> np.ndarray:
    """
    Repair an ``N x 24`` bit matrix, returning a new matrix.

    Necessary loads are overwritten with their fixed pattern. Consistent loads
    become one contiguous block of ``on_calls`` slots at the feasible start
    nearest the centre of mass of the row's ON bits, the earlier start on
    ties; a row without ON bits gets a start drawn uniformly from ``rng``.
    Inconsistent loads keep their ON bits inside the window, then drop the
    most expensive or add the cheapest slots until the count is right, lower
    slot first on equal price.

    :raises DimensionMismatchError: Matrix shape does not match the scenario.
    """
    bits = np.asarray(bits)
    if bits.shape != (config.n_appliances, SLOTS_PER_DAY):
        raise DimensionMismatchError(
            "Bit matrix of shape {} does not match {} appliances."
            .format(bits.shape, config.n_appliances))
    prices = config.price.as_array()
    out = np.empty((config.n_appliances, SLOTS_PER_DAY), dtype=np.uint8)
    for i, a in enumerate(config.appliances):
        if a.category is ApplianceCategory.NL:
            out[i] = a.fixed_pattern()
        elif a.category is ApplianceCategory.CL:
            out[i] = _repair_cl(bits[i], a, rng)
        else:
            out[i] = _repair_icl(bits[i], a, prices)
    return out


def repair_genome(
    genome: np.ndarray, config: ScenarioConfig, rng: np.random.Generator
) -> np.ndarray:
    """
    Flattened form of :func:`repair_bits`.
    """
    genome = np.asarray(genome)
    if genome.shape != (config.genome_length,):
        raise DimensionMismatchError(
            "Genome of shape {} does not match genome length {}."
            .format(genome.shape, config.genome_length))
    return repair_bits(
        genome.reshape(config.n_appliances, SLOTS_PER_DAY), config, rng
    ).reshape(-1)


def repair(
    schedule: Schedule, config: ScenarioConfig, rng: np.random.Generator
) -> Schedule:
    """
    Map a schedule onto the nearest one satisfying on-call counts, windows,
    contiguity of consistent loads and the fixed pattern of necessary loads.

    Demand limit violations are left in place. An already feasible schedule
    is returned bit-identical.
    """
    check_dimensions(schedule, config)
    return Schedule(repair_bits(schedule.bits, config, rng))
