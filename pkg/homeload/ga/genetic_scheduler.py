"""
Generational genetic algorithm over binary appliance schedules.
"""
from dataclasses import dataclass
import enum
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from smqtk_core import Configurable

from homeload.evaluation.feasibility import baseline_schedule, repair_genome
from homeload.ga.chromosome import Chromosome, FitnessEvaluator
from homeload.ga.operators import (
    binary_mutation,
    one_point_crossover,
    placement_mutation,
    random_genome,
    tournament_select,
)
from homeload.scenario.model import GaParams, ScenarioConfig, Schedule
from homeload.utils.cli import ProgressReporter


LOG = logging.getLogger(__name__)

#: Relative improvement of the best fitness below which a generation counts
#: as stagnant.
STAGNATION_TOLERANCE = 1e-12


class TerminationReason (enum.Enum):
    MAX_GENERATIONS = "MaxGenerations"
    STAGNATION = "Stagnation"


@dataclass(frozen=True)
class GaRun:
    """
    Outcome of one evolution.

    ``fitness_history`` and ``mean_fitness_history`` start with the initial
    population and hold one entry per executed generation after that.
    ``evaluations`` counts the distinct genomes whose fitness was computed.
    """
    best_schedule: Schedule
    best_fitness: float
    fitness_history: Tuple[float, ...]
    generations_executed: int
    terminated_by: TerminationReason
    mean_fitness_history: Tuple[float, ...] = ()
    evaluations: int = 0
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_fitness": self.best_fitness,
            "generations_executed": self.generations_executed,
            "terminated_by": self.terminated_by.value,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "fitness_history": list(self.fitness_history),
            "mean_fitness_history": list(self.mean_fitness_history),
        }


def init_population(
    config: ScenarioConfig, rng: np.random.Generator
) -> List[Chromosome]:
    """
    Initial population: the baseline schedule (every appliance at its
    earliest placement) followed by ``population_size - 1`` uniform random
    genomes, each repaired right after it is drawn.
    """
    population = [Chromosome.from_schedule(baseline_schedule(config))]
    for _ in range(config.ga.population_size - 1):
        genome = random_genome(config.genome_length, rng)
        population.append(Chromosome(repair_genome(genome, config, rng)))
    return population


class GeneticScheduler (Configurable):
    """
    Evolves the cheapest schedule of a scenario.

    Each generation keeps the best chromosome of the previous one unchanged
    and fills the remaining places with offspring: two tournament winners are
    crossed over, then each child has its bits mutated and its appliance
    placements moved, and is repaired after every operator.
    The run stops after ``max_generations`` generations, or earlier once the
    best fitness has not improved for ``stagnation_window`` generations in a
    row.

    All random draws come from one ``numpy.random.default_rng(seed)`` (PCG64)
    stream in a fixed order, so a seed fully determines the run.

    Parameters are those of :class:`GaParams`.
    """

    @property
    def _log(self) -> logging.Logger:
        return logging.getLogger(
            '.'.join((self.__module__, self.__class__.__name__)))

    def __init__(
        self, population_size: int = 50, max_generations: int = 500,
        tournament_size: int = 3, crossover_rate: float = 0.9,
        mutation_rate: Optional[float] = None,
        placement_rate: Optional[float] = None, stagnation_window: int = 30,
        seed: int = 0
    ):
        self.params = GaParams(
            population_size=population_size,
            max_generations=max_generations,
            tournament_size=tournament_size,
            crossover_rate=crossover_rate,
            mutation_rate=mutation_rate,
            placement_rate=placement_rate,
            stagnation_window=stagnation_window,
            seed=seed,
        )

    @classmethod
    def from_params(cls, params: GaParams) -> "GeneticScheduler":
        return cls(**params.get_config())

    def get_config(self) -> Dict[str, Any]:
        return self.params.get_config()

    def _breed(
        self, population: List[Chromosome], config: ScenarioConfig,
        rng: np.random.Generator, mutation_rate: float, placement_rate: float
    ) -> List[Chromosome]:
        p = self.params

        def fix(genome: np.ndarray) -> np.ndarray:
            return repair_genome(genome, config, rng)

        def vary(c: Chromosome) -> Chromosome:
            c = binary_mutation(c, mutation_rate, rng, repair=fix)
            return placement_mutation(c, config.appliances, placement_rate,
                                      rng, repair=fix)

        elite = min(population, key=lambda c: c.fitness)  # first on ties
        children = [elite]
        while len(children) < p.population_size:
            a = tournament_select(population, p.tournament_size, rng)
            b = tournament_select(population, p.tournament_size, rng)
            c1, c2 = one_point_crossover(a, b, rng, p.crossover_rate,
                                         repair=fix)
            children.append(vary(c1))
            c2 = vary(c2)
            if len(children) < p.population_size:
                children.append(c2)
        return children

    def evolve(self, config: ScenarioConfig) -> GaRun:
        """
        Run the genetic algorithm on a validated scenario.

        The scenario's own GA parameters are ignored in favour of this
        scheduler's.
        """
        p = self.params
        config = config.with_ga(**p.get_config())
        rng = np.random.default_rng(p.seed)
        evaluator = FitnessEvaluator(config)
        mutation_rate = p.resolved_mutation_rate(config.genome_length)
        placement_rate = p.resolved_placement_rate(
            sum(a.is_shiftable for a in config.appliances))

        population = init_population(config, rng)
        fitnesses = evaluator.evaluate_population(population)
        best_i = int(np.argmin(fitnesses))
        history = [float(fitnesses[best_i])]
        means = [float(fitnesses.mean())]
        stagnant = 0
        generation = 0
        terminated_by = TerminationReason.MAX_GENERATIONS
        self._log.debug("Seed %d: initial best fitness %f", p.seed,
                        history[0])

        pr = ProgressReporter(self._log.debug, 2.0, "Generations",
                              total=p.max_generations).start()
        while generation < p.max_generations:
            population = self._breed(population, config, rng, mutation_rate,
                                     placement_rate)
            fitnesses = evaluator.evaluate_population(population)
            generation += 1
            best_i = int(np.argmin(fitnesses))
            previous, current = history[-1], float(fitnesses[best_i])
            history.append(current)
            means.append(float(fitnesses.mean()))
            pr.increment_report()

            if previous - current > STAGNATION_TOLERANCE * abs(previous):
                stagnant = 0
            else:
                stagnant += 1
                if stagnant >= p.stagnation_window:
                    terminated_by = TerminationReason.STAGNATION
                    break

        best = population[best_i]
        self._log.info("Seed %d: finished after %d generation(s) (%s), best "
                       "fitness %f, %d distinct genomes evaluated", p.seed,
                       generation, terminated_by.value, history[-1],
                       evaluator.evaluations)
        return GaRun(
            best_schedule=best.decode(config.n_appliances),
            best_fitness=float(best.fitness),  # type: ignore
            fitness_history=tuple(history),
            generations_executed=generation,
            terminated_by=terminated_by,
            mean_fitness_history=tuple(means),
            evaluations=evaluator.evaluations,
            seed=p.seed,
        )


def evolve(config: ScenarioConfig) -> GaRun:
    """
    Evolve a schedule with the scenario's own GA parameters.
    """
    return GeneticScheduler.from_params(config.ga).evolve(config)
