from .chromosome import (  # noqa: F401
    Chromosome,
    FitnessEvaluator,
    fitness,
)
from .operators import (  # noqa: F401
    binary_mutation,
    one_point_crossover,
    random_genome,
    splice,
    tournament_select,
)
from .genetic_scheduler import (  # noqa: F401
    GaRun,
    GeneticScheduler,
    TerminationReason,
    evolve,
    init_population,
)
from .oracle import (  # noqa: F401
    DEFAULT_CAP,
    OracleResult,
    brute_force_optimum,
    placements,
    search_space_size,
)
