"""
Chromosome encoding and fitness of schedules.

A genome is the schedule matrix flattened row-major: appliance-major,
slot-minor. Fitness is the billing cost of grid energy after PV dispatch plus
the demand limit penalty; lower is better.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from homeload.evaluation.feasibility import demand_penalty
from homeload.evaluation.metrics import batch_hourly_load
from homeload.evaluation.pv_dispatch import pv_generation_profile
from homeload.exceptions import DimensionMismatchError
from homeload.scenario.model import ScenarioConfig, Schedule, SLOTS_PER_DAY


LOG = logging.getLogger(__name__)


class Chromosome:
    """
    Binary genome with a cached fitness value.

    The genome is read-only; operators always build new chromosomes.
    """

    __slots__ = ("_genome", "fitness")

    def __init__(self, genome: Any, fitness: Optional[float] = None):
        g = np.array(genome, dtype=np.uint8)
        if g.ndim != 1:
            raise DimensionMismatchError(
                "Genome must be one dimensional (given shape {})."
                .format(g.shape))
        g.setflags(write=False)
        self._genome = g
        self.fitness = fitness

    @classmethod
    def from_schedule(cls, schedule: Schedule) -> "Chromosome":
        return cls(schedule.genome())

    @property
    def genome(self) -> np.ndarray:
        return self._genome

    def key(self) -> bytes:
        return self._genome.tobytes()

    def decode(self, n_appliances: int) -> Schedule:
        return Schedule.from_genome(self._genome, n_appliances)

    def __len__(self) -> int:
        return self._genome.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chromosome):
            return NotImplemented
        return np.array_equal(self._genome, other._genome)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return "{}(len={}, on={}, fitness={})".format(
            self.__class__.__name__, len(self), int(self._genome.sum()),
            self.fitness)


class FitnessEvaluator:
    """
    Vectorized fitness of a scenario, with a cache keyed by genome.

    The exhaustive solver and the genetic algorithm both evaluate through
    :meth:`evaluate_bits`, so equal schedules get bit-identical fitness
    whichever path computed it.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self._ratings = config.ratings()
        self._prices = config.price.as_array()
        self._generation = (None if config.pv is None
                            else pv_generation_profile(config.pv))
        self._cache: Dict[bytes, float] = {}

    @property
    def evaluations(self) -> int:
        """
        Number of distinct genomes evaluated so far.
        """
        return len(self._cache)

    def evaluate_bits(self, bits: np.ndarray) -> np.ndarray:
        """
        Fitness of a stack of schedule matrices, shape ``[k, N, 24]``.
        """
        bits = np.asarray(bits)
        if bits.ndim != 3 or bits.shape[1:] != (self.config.n_appliances,
                                                SLOTS_PER_DAY):
            raise DimensionMismatchError(
                "Expected a [k, {}, {}] stack (given shape {})."
                .format(self.config.n_appliances, SLOTS_PER_DAY, bits.shape))
        load = batch_hourly_load(bits, self._ratings)
        if self._generation is None:
            grid = load
        else:
            grid = load - np.minimum(load, self._generation)
        cost = (grid * self._prices).sum(axis=1)
        return cost + demand_penalty(load, self.config)

    def _check_length(self, chromosome: Chromosome) -> None:
        if len(chromosome) != self.config.genome_length:
            raise DimensionMismatchError(
                "Genome length {} does not match the scenario's {}."
                .format(len(chromosome), self.config.genome_length))

    def evaluate_population(
        self, population: Sequence[Chromosome]
    ) -> np.ndarray:
        """
        Fitness of every chromosome, filling each one's cached value.
        Genomes already in the cache are not recomputed.
        """
        pending: Dict[bytes, List[Chromosome]] = {}
        for c in population:
            self._check_length(c)
            k = c.key()
            if k in self._cache:
                c.fitness = self._cache[k]
            else:
                pending.setdefault(k, []).append(c)
        if pending:
            groups = list(pending.values())
            bits = np.stack([
                g[0].genome.reshape(self.config.n_appliances, SLOTS_PER_DAY)
                for g in groups
            ])
            for g, f in zip(groups, self.evaluate_bits(bits)):
                value = float(f)
                self._cache[g[0].key()] = value
                for c in g:
                    c.fitness = value
        return np.array([c.fitness for c in population], dtype=np.float64)

    def __call__(self, chromosome: Chromosome) -> float:
        return float(self.evaluate_population([chromosome])[0])


def fitness(chromosome: Chromosome, config: ScenarioConfig) -> float:
    """
    Fitness of one chromosome under a scenario: grid billing cost after PV
    dispatch plus the demand limit penalty. Pure; lower is better.

    :raises DimensionMismatchError: Genome length is not ``N * 24``.
    """
    return FitnessEvaluator(config)(Chromosome(chromosome.genome))
