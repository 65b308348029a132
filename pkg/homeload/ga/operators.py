"""
Genetic operators over binary chromosomes.

Every operator takes the random source explicitly. The order in which each
operator draws from it is fixed and part of its contract:

* :func:`tournament_select` draws the ``k`` contestants with
  ``rng.choice(M, k, replace=False)``.
* :func:`one_point_crossover` always draws ``rng.random()``; when a splice
  happens it then draws the cut with ``rng.integers(1, L)``. Repair of the
  first child draws before repair of the second.
* :func:`binary_mutation` draws the flip mask with ``rng.random(L)``, then
  repair draws, if it needs to.
* :func:`placement_mutation` visits the shiftable appliances in order and
  draws ``rng.random()`` for each. A consistent load that moves then draws
  its new start with ``rng.integers``; an inconsistent load that moves draws
  the ON slot to clear, then the OFF slot to set.
"""
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from homeload.exceptions import DimensionMismatchError
from homeload.ga.chromosome import Chromosome
from homeload.scenario.model import Appliance, ApplianceCategory, SLOTS_PER_DAY


#: Maps a raw genome to a repaired one.
RepairFunc = Callable[[np.ndarray], np.ndarray]


def _check_rate(name: str, rate: float) -> float:
    rate = float(rate)
    if not 0.0 <= rate <= 1.0:
        raise ValueError("{} must be in [0, 1] (given {})".format(name, rate))
    return rate


def random_genome(length: int, rng: np.random.Generator) -> np.ndarray:
    """
    Uniform random bits, each ON with probability one half.
    """
    return rng.integers(0, 2, size=length, dtype=np.uint8)


def tournament_select(
    population: Sequence[Chromosome], k: int, rng: np.random.Generator
) -> Chromosome:
    """
    Draw ``k`` distinct members uniformly and return the fittest of them.

    Every member must already carry its fitness. Among equally fit
    contestants the one drawn first wins.

    :raises ValueError: ``k`` is not within ``[1, len(population)]``, or a
        contestant has not been evaluated.
    """
    m = len(population)
    if not 1 <= k <= m:
        raise ValueError(
            "Tournament size must be between 1 and the population size {} "
            "(given {})".format(m, k))
    drawn = rng.choice(m, size=k, replace=False)
    best = None
    best_fitness = np.inf
    for i in drawn:
        c = population[int(i)]
        if c.fitness is None:
            raise ValueError("Tournament contestant {} has no fitness."
                             .format(int(i)))
        if best is None or c.fitness < best_fitness:
            best, best_fitness = c, c.fitness
    assert best is not None
    return best


def splice(
    a: np.ndarray, b: np.ndarray, cut: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exchange the tails of two genomes at ``cut``: returns ``a[:cut] + b[cut:]``
    and ``b[:cut] + a[cut:]``.

    >>> x, y = splice(np.zeros(6, dtype=np.uint8), np.ones(6, dtype=np.uint8), 1)
    >>> x.tolist(), y.tolist()
    ([0, 1, 1, 1, 1, 1], [1, 0, 0, 0, 0, 0])
    """
    return (np.concatenate([a[:cut], b[cut:]]),
            np.concatenate([b[:cut], a[cut:]]))


def one_point_crossover(
    a: Chromosome, b: Chromosome, rng: np.random.Generator, rate: float,
    repair: Optional[RepairFunc] = None
) -> Tuple[Chromosome, Chromosome]:
    """
    With probability ``rate`` splice the parents at a cut drawn uniformly
    from ``1 .. L-1``, otherwise copy them. Children are passed through
    ``repair`` when one is given.

    :raises DimensionMismatchError: Parents differ in genome length.
    :raises ValueError: ``rate`` outside ``[0, 1]``.
    """
    rate = _check_rate("Crossover rate", rate)
    if len(a) != len(b):
        raise DimensionMismatchError(
            "Parent genome lengths differ ({} and {})."
            .format(len(a), len(b)))
    length = len(a)
    if rng.random() < rate and length > 1:
        cut = int(rng.integers(1, length))
        ga, gb = splice(a.genome, b.genome, cut)
    else:
        ga, gb = a.genome.copy(), b.genome.copy()
    if repair is not None:
        ga = repair(ga)
        gb = repair(gb)
    return Chromosome(ga), Chromosome(gb)


def binary_mutation(
    c: Chromosome, rate: float, rng: np.random.Generator,
    repair: Optional[RepairFunc] = None
) -> Chromosome:
    """
    Flip every bit independently with probability ``rate``, then repair.

    :raises ValueError: ``rate`` outside ``[0, 1]``.
    """
    rate = _check_rate("Mutation rate", rate)
    flips = rng.random(len(c)) < rate
    genome = c.genome ^ flips.astype(np.uint8)
    if repair is not None:
        genome = repair(genome)
    return Chromosome(genome)


def placement_mutation(
    c: Chromosome, appliances: Sequence[Appliance], rate: float,
    rng: np.random.Generator, repair: Optional[RepairFunc] = None
) -> Chromosome:
    """
    Move whole placements rather than single bits.

    Each shiftable appliance moves with probability ``rate``. A consistent
    load is rebuilt as one block at a start drawn uniformly from its feasible
    starts. An inconsistent load swaps one ON slot of its window, drawn
    uniformly, for one OFF slot of its window; nothing happens when either set
    is empty. Necessary loads are left as they are.

    Applied to a repaired genome the result needs no further repair, and any
    feasible placement is one move away for a consistent load.

    :raises DimensionMismatchError: Genome length is not
        ``len(appliances) * 24``.
    :raises ValueError: ``rate`` outside ``[0, 1]``.
    """
    rate = _check_rate("Placement rate", rate)
    n = len(appliances)
    if len(c) != n * SLOTS_PER_DAY:
        raise DimensionMismatchError(
            "Genome length {} does not match {} appliances."
            .format(len(c), n))
    bits = c.genome.reshape(n, SLOTS_PER_DAY).copy()
    for row, a in zip(bits, appliances):
        if not a.is_shiftable or rng.random() >= rate:
            continue
        if a.category is ApplianceCategory.CL:
            start = a.earliest_start + int(
                rng.integers(a.window_length - a.on_calls + 1))
            row[:] = 0
            row[start:start + a.on_calls] = 1
        else:
            mask = a.window_mask()
            on = np.flatnonzero((row != 0) & mask)
            off = np.flatnonzero((row == 0) & mask)
            if on.size and off.size:
                row[on[rng.integers(on.size)]] = 0
                row[off[rng.integers(off.size)]] = 1
    genome = bits.reshape(-1)
    if repair is not None:
        genome = repair(genome)
    return Chromosome(genome)
