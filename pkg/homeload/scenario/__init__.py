from .model import (  # noqa: F401
    Appliance,
    ApplianceCategory,
    ConfigViolation,
    GaParams,
    PriceSignal,
    PvProfile,
    ScenarioConfig,
    Schedule,
    TimeGrid,
    TIME_GRID,
    SLOTS_PER_DAY,
    find_violations,
    validate_scenario,
)
from .io import (  # noqa: F401
    load_scenario,
    reference_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
