"""
Evaluation of a schedule: hourly load, daily energy, billing cost and
peak-to-average ratio.

Every function here is pure. Summation over appliances always follows the
scenario's appliance order so that single-schedule and batched evaluations
produce identical floating point results.
"""
from typing import Any, Iterable, List, Optional, Union

import numpy as np

from homeload.exceptions import UndefinedParError
from homeload.scenario.model import (
    Appliance,
    PriceSignal,
    ScenarioConfig,
    Schedule,
    SLOTS_PER_DAY,
    TIME_GRID,
    check_dimensions,
)


class LoadProfile:
    """
    Aggregate energy consumed in each slot of the day (kWh).
    """

    def __init__(self, load: Any):
        arr = np.array(TIME_GRID.check_vector(load, "load profile"))
        if (arr < 0).any():
            raise ValueError("Load profile entries must be >= 0.")
        arr.setflags(write=False)
        self._load = arr

    @property
    def load(self) -> np.ndarray:
        return self._load

    def total(self) -> float:
        return float(self._load.sum())

    def peak(self) -> float:
        return float(self._load.max())

    def to_list(self) -> List[float]:
        return self._load.tolist()

    def __len__(self) -> int:
        return SLOTS_PER_DAY

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LoadProfile):
            return NotImplemented
        return np.array_equal(self._load, other._load)

    def __repr__(self) -> str:
        return "{}(total={:g}, peak={:g})".format(
            self.__class__.__name__, self.total(), self.peak())


ProfileLike = Union[LoadProfile, np.ndarray, Iterable[float]]


def _as_load(profile: ProfileLike) -> np.ndarray:
    if isinstance(profile, LoadProfile):
        return profile.load
    return LoadProfile(profile).load


def batch_hourly_load(bits: np.ndarray, ratings: np.ndarray) -> np.ndarray:
    """
    Hourly load of many schedules at once.

    :param bits: Array of shape ``[k, n_appliances, 24]``.
    :param ratings: Per-appliance energy per ON slot, shape
        ``[n_appliances]``.

    :return: Array of shape ``[k, 24]``.
    """
    load = np.zeros((bits.shape[0], SLOTS_PER_DAY), dtype=np.float64)
    for a in range(bits.shape[1]):
        load += bits[:, a, :] * ratings[a]
    return load


def hourly_load(
    schedule: Schedule, appliances: Union[ScenarioConfig, Iterable[Appliance]]
) -> LoadProfile:
    """
    Per-slot sum of the ratings of the appliances that are ON.

    :raises DimensionMismatchError: Schedule rows differ from the appliance
        count.
    """
    fleet = check_dimensions(schedule, appliances)
    ratings = np.array([a.rating for a in fleet], dtype=np.float64)
    return LoadProfile(batch_hourly_load(schedule.bits[np.newaxis], ratings)[0])


def total_energy(
    schedule: Schedule, appliances: Union[ScenarioConfig, Iterable[Appliance]]
) -> float:
    """
    Energy consumed over the day (kWh); the sum of the hourly load.
    """
    return hourly_load(schedule, appliances).total()


def profile_cost(profile: ProfileLike, price: PriceSignal) -> float:
    """
    Billing cost of a load profile under a price signal.
    """
    return float(hourly_cost(profile, price).sum())


def hourly_cost(profile: ProfileLike, price: PriceSignal) -> np.ndarray:
    """
    Billing cost of each slot.
    """
    return _as_load(profile) * TIME_GRID.check_vector(price.prices, "price")


def total_cost(
    schedule: Schedule, appliances: Union[ScenarioConfig, Iterable[Appliance]],
    price: PriceSignal
) -> float:
    """
    Billing cost of a schedule: hourly load weighted by the price of each
    slot.
    """
    return profile_cost(hourly_load(schedule, appliances), price)


def par(profile: ProfileLike) -> float:
    """
    Peak-to-average ratio of a load profile, between 1 (flat) and 24 (all
    load in one slot).

    :raises UndefinedParError: The profile carries no load.
    """
    load = _as_load(profile)
    total = float(load.sum())
    if not total > 0:
        raise UndefinedParError("PAR is undefined for a profile without load.")
    peak = float(load.max())
    if peak == float(load.min()):
        return 1.0
    return peak / (total / SLOTS_PER_DAY)


def par_or_none(profile: ProfileLike) -> Optional[float]:
    """
    :func:`par`, or None for a profile without load.
    """
    try:
        return par(profile)
    except UndefinedParError:
        return None
