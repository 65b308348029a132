"""
Reading and writing scenario files.

A scenario file is a single JSON object::

    {
        "appliances": [{"id", "name", "category", "rating_kwh", "on_calls",
                        "earliest_start", "latest_end"}, ...],
        "price": [24 numbers],
        "demand_limit": [24 numbers],          (optional)
        "pv": {"sigma", "delta", "scale", "day_start", "day_end"},  (optional)
        "ga": {"population_size", "max_generations", "tournament_size",
               "crossover_rate", "mutation_rate", "placement_rate",
               "stagnation_window", "seed"}      (optional)
    }

Unknown keys are rejected. ``name`` defaults to the id and the window to the
whole day. ``pv`` and ``ga`` sections may be partial; missing keys take the
defaults of :class:`PvProfile` and :class:`GaParams`.
"""
import json
import logging
import os
from typing import Any, Dict, List, Optional, Tuple

from homeload.exceptions import ScenarioValidationError
from homeload.scenario.model import (
    Appliance,
    ApplianceCategory,
    ConfigViolation,
    GaParams,
    PriceSignal,
    PvProfile,
    ScenarioConfig,
    SLOTS_PER_DAY,
    validate_scenario,
)


LOG = logging.getLogger(__name__)

REFERENCE_SCENARIO_PATH = os.path.join(
    os.path.dirname(os.path.abspath(__file__)),
    "sample_configs", "reference_scenario.json"
)

TOP_LEVEL_KEYS = ("appliances", "price", "demand_limit", "pv", "ga")
REQUIRED_TOP_LEVEL_KEYS = ("appliances", "price")
APPLIANCE_KEYS = ("id", "name", "category", "rating_kwh", "on_calls",
                  "earliest_start", "latest_end")
REQUIRED_APPLIANCE_KEYS = ("id", "category", "rating_kwh", "on_calls")


class _Collector:
    """
    Accumulates structural defects found while decoding.
    """

    def __init__(self) -> None:
        self.violations: List[ConfigViolation] = []

    def add(self, name: str, message: str) -> None:
        self.violations.append(ConfigViolation(name, message))

    def keys(
        self, name: str, obj: Dict[str, Any], allowed: Tuple[str, ...],
        required: Tuple[str, ...] = ()
    ) -> bool:
        ok = True
        for k in obj:
            if k not in allowed:
                self.add("{}.{}".format(name, k) if name else k,
                         "unknown key")
                ok = False
        for k in required:
            if k not in obj:
                self.add("{}.{}".format(name, k) if name else k,
                         "missing required key")
                ok = False
        return ok

    def number(self, name: str, v: Any) -> bool:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.add(name, "expected a number (given {!r})".format(v))
            return False
        return True

    def integer(self, name: str, v: Any) -> bool:
        if isinstance(v, bool) or not isinstance(v, int):
            self.add(name, "expected an integer (given {!r})".format(v))
            return False
        return True

    def number_list(self, name: str, v: Any) -> Optional[Tuple[float, ...]]:
        if not isinstance(v, list):
            self.add(name, "expected an array of numbers")
            return None
        ok = True
        for t, x in enumerate(v):
            ok = self.number("{}[{}]".format(name, t), x) and ok
        return tuple(float(x) for x in v) if ok else None


def _decode_appliance(
    c: _Collector, i: int, obj: Any
) -> Optional[Appliance]:
    name = "appliances[{}]".format(i)
    if not isinstance(obj, dict):
        c.add(name, "expected an object")
        return None
    ok = c.keys(name, obj, APPLIANCE_KEYS, REQUIRED_APPLIANCE_KEYS)
    if "id" in obj and not isinstance(obj["id"], str):
        c.add(name + ".id", "expected a string")
        ok = False
    if "name" in obj and not isinstance(obj["name"], str):
        c.add(name + ".name", "expected a string")
        ok = False
    category = None
    if "category" in obj:
        try:
            category = ApplianceCategory(obj["category"])
        except ValueError:
            c.add(name + ".category", "expected one of NL, CL, ICL (given {!r})"
                  .format(obj["category"]))
            ok = False
    if "rating_kwh" in obj:
        ok = c.number(name + ".rating_kwh", obj["rating_kwh"]) and ok
    for k in ("on_calls", "earliest_start", "latest_end"):
        if k in obj:
            ok = c.integer("{}.{}".format(name, k), obj[k]) and ok
    if not ok:
        return None
    return Appliance(
        id=obj["id"],
        name=obj.get("name", obj["id"]),
        category=category,  # type: ignore
        rating=float(obj["rating_kwh"]),
        on_calls=obj["on_calls"],
        earliest_start=obj.get("earliest_start", 0),
        latest_end=obj.get("latest_end", SLOTS_PER_DAY - 1),
    )


def _decode_section(
    c: _Collector, name: str, obj: Any, defaults: Dict[str, Any]
) -> Optional[Dict[str, Any]]:
    if not isinstance(obj, dict):
        c.add(name, "expected an object")
        return None
    if not c.keys(name, obj, tuple(defaults)):
        return None
    ok = True
    for k, v in obj.items():
        default = defaults[k]
        if isinstance(default, int) and not isinstance(default, bool):
            ok = c.integer("{}.{}".format(name, k), v) and ok
        elif v is not None or default is not None:
            ok = c.number("{}.{}".format(name, k), v) and ok
    return dict(obj) if ok else None


def scenario_from_dict(data: Any) -> ScenarioConfig:
    """
    Decode and validate a scenario from its JSON dictionary form.

    Structural defects (unknown or missing keys, wrong JSON types) are
    reported together; a structurally sound scenario is then checked with
    :func:`validate_scenario`.

    :raises ScenarioValidationError: Structural defects or invariant
        violations, all of them listed.
    """
    c = _Collector()
    if not isinstance(data, dict):
        raise ScenarioValidationError(
            [ConfigViolation("<root>", "expected a JSON object")])
    c.keys("", data, TOP_LEVEL_KEYS, REQUIRED_TOP_LEVEL_KEYS)

    appliances: List[Appliance] = []
    raw_appliances = data.get("appliances", [])
    if not isinstance(raw_appliances, list):
        c.add("appliances", "expected an array of objects")
    else:
        for i, obj in enumerate(raw_appliances):
            a = _decode_appliance(c, i, obj)
            if a is not None:
                appliances.append(a)

    price = c.number_list("price", data.get("price", []))
    demand_limit = None
    if data.get("demand_limit") is not None:
        demand_limit = c.number_list("demand_limit", data["demand_limit"])

    pv = None
    if data.get("pv") is not None:
        pv_section = _decode_section(
            c, "pv", data["pv"], PvProfile.get_default_config())
        if pv_section is not None:
            pv = PvProfile.from_config(pv_section)

    ga = GaParams()
    if data.get("ga") is not None:
        ga_section = _decode_section(
            c, "ga", data["ga"], GaParams.get_default_config())
        if ga_section is not None:
            ga = GaParams.from_config(ga_section)

    if c.violations:
        LOG.debug("Scenario has %d structural defect(s)", len(c.violations))
        raise ScenarioValidationError(c.violations)

    return validate_scenario(ScenarioConfig(
        appliances=tuple(appliances),
        price=PriceSignal(price or ()),
        demand_limit=demand_limit,
        pv=pv,
        ga=ga,
    ))


def scenario_to_dict(config: ScenarioConfig) -> Dict[str, Any]:
    """
    Canonical JSON dictionary form of a scenario, defaults filled in.
    """
    d: Dict[str, Any] = {
        "appliances": [
            {
                "id": a.id,
                "name": a.name,
                "category": a.category.value,
                "rating_kwh": a.rating,
                "on_calls": a.on_calls,
                "earliest_start": a.earliest_start,
                "latest_end": a.latest_end,
            }
            for a in config.appliances
        ],
        "price": list(config.price.prices),
        "ga": config.ga.get_config(),
    }
    if config.demand_limit is not None:
        d["demand_limit"] = list(config.demand_limit)
    if config.pv is not None:
        d["pv"] = config.pv.get_config()
    return d


def load_scenario(path: str) -> ScenarioConfig:
    """
    Load and validate a scenario file.

    :raises OSError: The file could not be read.
    :raises ScenarioValidationError: The file is not JSON, or the scenario
        is malformed or invalid.
    """
    LOG.debug("Loading scenario file: %s", path)
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as ex:
            raise ScenarioValidationError(
                [ConfigViolation("<file>", "not valid JSON: {}".format(ex))])
    return scenario_from_dict(data)


def reference_scenario() -> ScenarioConfig:
    """
    The bundled six-appliance household (two necessary, two consistent and
    two inconsistent loads) with a synthetic real-time price signal peaking
    over slots 11 to 14.
    """
    return load_scenario(REFERENCE_SCENARIO_PATH)
