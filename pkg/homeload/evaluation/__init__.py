from .metrics import (  # noqa: F401
    LoadProfile,
    batch_hourly_load,
    hourly_cost,
    hourly_load,
    par,
    profile_cost,
    total_cost,
    total_energy,
)
from .pv_dispatch import (  # noqa: F401
    DispatchResult,
    dispatch,
    grid_cost_after_pv,
    pv_generation,
    pv_generation_profile,
)
from .feasibility import (  # noqa: F401
    Violation,
    ViolationKind,
    baseline_schedule,
    check_feasibility,
    demand_penalty,
    fixed_pattern,
    penalty_weight,
    repair,
    repair_genome,
)
