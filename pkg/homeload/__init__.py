from . import (  # noqa: F401
    evaluation,
    ga,
    scenario,
    utils
)
