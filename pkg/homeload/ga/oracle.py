"""
Exact reference solver: exhaustive enumeration of every structurally
feasible schedule of a scenario.

Only the placements repair can produce are enumerated: the fixed pattern of
a necessary load, every contiguous block of a consistent load and every
combination of slots of an inconsistent load, all within the window.
Candidates are evaluated with the genetic algorithm's own fitness.
"""
from dataclasses import dataclass
import itertools
import logging
import math
from typing import List

import numpy as np

from homeload.exceptions import SearchSpaceTooLargeError
from homeload.ga.chromosome import FitnessEvaluator
from homeload.scenario.model import (
    Appliance,
    ApplianceCategory,
    ScenarioConfig,
    Schedule,
    SLOTS_PER_DAY,
)
from homeload.utils.cli import ProgressReporter


LOG = logging.getLogger(__name__)

#: Largest search space enumerated without an explicit larger cap.
DEFAULT_CAP = 2 ** 22
#: Candidate schedules evaluated per vectorized batch.
CHUNK_SIZE = 2 ** 15


@dataclass(frozen=True)
class OracleResult:
    best_schedule: Schedule
    best_cost: float
    enumerated_count: int


def placement_count(appliance: Appliance) -> int:
    """
    Number of feasible rows of one appliance.

    >>> from homeload.scenario.model import Appliance, ApplianceCategory
    >>> placement_count(Appliance("a", "a", ApplianceCategory.ICL, 1.0, 2))
    276
    """
    w, oc = appliance.window_length, appliance.on_calls
    if appliance.category is ApplianceCategory.NL:
        return 1
    if appliance.category is ApplianceCategory.CL:
        return w - oc + 1
    return math.comb(w, oc)


def search_space_size(config: ScenarioConfig) -> int:
    """
    Number of structurally feasible schedules: the product of the per
    appliance placement counts.
    """
    return math.prod(placement_count(a) for a in config.appliances)


def placements(appliance: Appliance) -> np.ndarray:
    """
    Every feasible row of one appliance, shape ``[P, 24]``, sorted
    lexicographically ascending as bit strings.
    """
    if appliance.category is ApplianceCategory.NL:
        rows = appliance.fixed_pattern()[np.newaxis]
    else:
        if appliance.category is ApplianceCategory.CL:
            last = appliance.latest_end - appliance.on_calls + 1
            on_sets = (range(s, s + appliance.on_calls)
                       for s in range(appliance.earliest_start, last + 1))
        else:
            on_sets = itertools.combinations(appliance.window,
                                             appliance.on_calls)
        rows = np.zeros((placement_count(appliance), SLOTS_PER_DAY),
                        dtype=np.uint8)
        for i, on in enumerate(on_sets):
            rows[i, list(on)] = 1
    # lexsort treats its last key as primary, so slot 0 goes last
    return rows[np.lexsort(rows.T[::-1])]


def brute_force_optimum(
    config: ScenarioConfig, cap: int = DEFAULT_CAP,
    chunk_size: int = CHUNK_SIZE
) -> OracleResult:
    """
    Cheapest structurally feasible schedule of a scenario.

    Candidates are visited in lexicographic genome order and only a strictly
    lower fitness replaces the incumbent, so among equal minima the
    lexicographically smallest genome is returned. No randomness is used.

    :raises SearchSpaceTooLargeError: The search space exceeds ``cap``.
    """
    size = search_space_size(config)
    if size > cap:
        raise SearchSpaceTooLargeError(size, cap)
    LOG.info("Enumerating %d candidate schedules", size)

    tables: List[np.ndarray] = [placements(a) for a in config.appliances]
    shape = tuple(t.shape[0] for t in tables)
    evaluator = FitnessEvaluator(config)

    best_cost = np.inf
    best_bits = None
    pr = ProgressReporter(LOG.debug, 2.0, "Candidates", total=size).start()
    for start in range(0, size, chunk_size):
        flat = np.arange(start, min(start + chunk_size, size))
        digits = np.unravel_index(flat, shape)
        bits = np.stack([t[d] for t, d in zip(tables, digits)], axis=1)
        costs = evaluator.evaluate_bits(bits)
        j = int(np.argmin(costs))
        if costs[j] < best_cost:
            best_cost = float(costs[j])
            best_bits = bits[j]
        pr.increment_report(flat.size)

    assert best_bits is not None
    LOG.info("Optimum cost %f", best_cost)
    return OracleResult(
        best_schedule=Schedule(best_bits),
        best_cost=best_cost,
        enumerated_count=size,
    )
