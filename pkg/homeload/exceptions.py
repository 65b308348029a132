"""
Exceptions raised by the scheduling library.

Library code raises these and never exits; the command line tool maps them to
process return codes.
"""
from typing import Sequence, TYPE_CHECKING

if TYPE_CHECKING:
    from homeload.scenario.model import ConfigViolation  # noqa: F401


class HomeloadError (Exception):
    """
    Base class of errors specific to this package.
    """


class ScenarioValidationError (HomeloadError, ValueError):
    """
    A scenario failed validation.

    Every violated invariant is carried in ``violations``, in the order they
    were found, so callers can report all of them at once.
    """

    def __init__(self, violations: Sequence["ConfigViolation"]):
        self.violations = list(violations)
        lines = "\n".join("  - {}".format(v) for v in self.violations)
        super(ScenarioValidationError, self).__init__(
            "Scenario has {} violation(s):\n{}"
            .format(len(self.violations), lines)
        )


class DimensionMismatchError (HomeloadError, ValueError):
    """
    Shapes of a schedule, genome or per-slot vector do not agree with the
    appliances or time grid they are evaluated against.
    """


class UndefinedParError (HomeloadError, ZeroDivisionError):
    """
    Peak-to-average ratio requested for a profile without any load.
    """


class SearchSpaceTooLargeError (HomeloadError, RuntimeError):
    """
    Exhaustive enumeration refused because the search space exceeds the cap.
    """

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super(SearchSpaceTooLargeError, self).__init__(
            "Search space of {} schedules exceeds the enumeration cap of {}."
            .format(size, cap)
        )


class MissingArtifactError (HomeloadError, FileNotFoundError):
    """
    A run directory lacks a file needed to derive plot data.
    """
