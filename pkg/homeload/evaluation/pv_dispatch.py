"""
Local PV generation and the PV-first dispatch of household load.

Generation follows a Gaussian bell over the day, clamped to zero outside the
daylight window. Dispatch serves each slot's load from PV first and draws the
remainder from the grid; any surplus is discarded.
"""
from dataclasses import dataclass
import logging
import math
from typing import Iterable, List, Optional, Union

import numpy as np

from homeload.evaluation.metrics import (
    LoadProfile,
    hourly_load,
    profile_cost,
)
from homeload.scenario.model import (
    Appliance,
    PriceSignal,
    PvProfile,
    ScenarioConfig,
    Schedule,
    TIME_GRID,
)


LOG = logging.getLogger(__name__)


def pv_generation(t: int, profile: PvProfile) -> float:
    """
    Energy produced by the PV unit in slot ``t`` (kWh), evaluated at the
    integer hour.
    """
    if t < profile.day_start or t > profile.day_end:
        return 0.0
    norm = profile.scale / (math.sqrt(2 * math.pi) * profile.sigma)
    return norm * math.exp(-((t - profile.delta) ** 2) /
                           (2 * profile.sigma ** 2))


def pv_generation_profile(profile: Optional[PvProfile]) -> np.ndarray:
    """
    Generation of every slot of the day; all zero without a PV unit.
    """
    if profile is None:
        return np.zeros(TIME_GRID.slot_count, dtype=np.float64)
    return np.array([pv_generation(t, profile) for t in TIME_GRID.slots],
                    dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DispatchResult:
    """
    Per-slot split of load between the PV unit and the grid.

    Per slot, ``pv_served + surplus == pv_generated`` and
    ``pv_served + grid_draw`` equals the load.
    """
    pv_generated: np.ndarray
    pv_served: np.ndarray
    grid_draw: np.ndarray
    surplus: np.ndarray

    def grid_profile(self) -> LoadProfile:
        return LoadProfile(self.grid_draw)

    def saturated_slots(self) -> List[int]:
        """
        Slots with generation where no surplus remains, i.e. the strict
        surplus condition ``generated - served > 0`` fails and the whole PV
        output is consumed.
        """
        return [int(t) for t in
                np.flatnonzero((self.pv_generated > 0) & ~(self.surplus > 0))]

    @property
    def self_consumption_ratio(self) -> Optional[float]:
        """
        Share of generation consumed by the household; None without
        generation.
        """
        generated = float(self.pv_generated.sum())
        if not generated > 0:
            return None
        return float(self.pv_served.sum()) / generated

    @property
    def self_sufficiency_ratio(self) -> Optional[float]:
        """
        Share of the load served by PV; None without load.
        """
        load = float((self.pv_served + self.grid_draw).sum())
        if not load > 0:
            return None
        return float(self.pv_served.sum()) / load


def dispatch(
    profile: LoadProfile, pv: Optional[PvProfile]
) -> DispatchResult:
    """
    Serve load from PV first, slot by slot, and draw the rest from the grid.
    """
    load = profile.load
    generated = pv_generation_profile(pv)
    served = np.minimum(load, generated)
    result = DispatchResult(
        pv_generated=generated,
        pv_served=served,
        grid_draw=load - served,
        surplus=generated - served,
    )
    for arr in (result.pv_generated, result.pv_served, result.grid_draw,
                result.surplus):
        arr.setflags(write=False)
    return result


def grid_cost_after_pv(
    schedule: Schedule, appliances: Union[ScenarioConfig, Iterable[Appliance]],
    price: PriceSignal, pv: Optional[PvProfile]
) -> float:
    """
    Billing cost of the energy drawn from the grid once PV has served what
    it can. Without a PV unit this is the schedule's total cost.
    """
    load = hourly_load(schedule, appliances)
    if pv is None:
        return profile_cost(load, price)
    return profile_cost(dispatch(load, pv).grid_profile(), price)


def billed_load(schedule: Schedule, config: ScenarioConfig) -> LoadProfile:
    """
    Load the household pays for: the grid draw after PV dispatch when the
    scenario has a PV source, the whole load otherwise.
    """
    load = hourly_load(schedule, config)
    if config.pv is None:
        return load
    return dispatch(load, config.pv).grid_profile()
