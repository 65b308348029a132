"""
Plot data of a completed run directory.

Each CSV starts with a header row naming its columns, followed by one record
per slot (``par.csv``: one record per case):

``price.csv``
    ``slot, price_per_kwh``
``pv_generation.csv``
    ``slot, pv_generation_kwh`` (zero throughout when the run has no PV case)
``load_profile.csv``
    ``slot`` then, per case, ``<case>_unscheduled_kwh`` and
    ``<case>_scheduled_kwh`` (consumption); the PV case adds
    ``<case>_unscheduled_grid_kwh`` and ``<case>_scheduled_grid_kwh``.
``hourly_cost.csv``
    ``slot`` then, per case, ``<case>_unscheduled_cost`` and
    ``<case>_scheduled_cost`` (grid energy when the case has PV).
``par.csv``
    ``case, unscheduled_par, scheduled_par, par_reduction_pct``; empty
    fields where PAR is undefined.
"""
import csv
import json
import logging
import os
from typing import Any, Dict, List, Sequence, Tuple

from homeload.evaluation.metrics import hourly_cost, hourly_load, par_or_none
from homeload.evaluation.pv_dispatch import billed_load, pv_generation_profile
from homeload.exceptions import MissingArtifactError
from homeload.scenario.io import scenario_from_dict
from homeload.scenario.model import ScenarioConfig, Schedule, TIME_GRID
from homeload.utils.cli import load_json


LOG = logging.getLogger(__name__)

CASE_WITHOUT_PV = "without_pv"
CASE_WITH_PV = "with_pv"

SCENARIO_FILENAME = "scenario.json"
SCHEDULES_FILENAME = "schedules.json"
SUMMARY_FILENAME = "summary.json"

PRICE_FILENAME = "price.csv"
PV_FILENAME = "pv_generation.csv"
LOAD_FILENAME = "load_profile.csv"
COST_FILENAME = "hourly_cost.csv"
PAR_FILENAME = "par.csv"
PLOT_FILENAMES = (PRICE_FILENAME, PV_FILENAME, LOAD_FILENAME, COST_FILENAME,
                  PAR_FILENAME)

_Case = Tuple[str, ScenarioConfig, Schedule, Schedule]


def _read_artifact(run_dir: str, name: str) -> Any:
    path = os.path.join(run_dir, name)
    if not os.path.isfile(path):
        raise MissingArtifactError(
            "Run directory {} has no {}".format(run_dir, name))
    try:
        return load_json(path)
    except json.JSONDecodeError as ex:
        raise MissingArtifactError(
            "{} in {} is not valid JSON: {}".format(name, run_dir, ex))


def _load_cases(run_dir: str) -> List[_Case]:
    config = scenario_from_dict(_read_artifact(run_dir, SCENARIO_FILENAME))
    stored = _read_artifact(run_dir, SCHEDULES_FILENAME)
    cases = []
    try:
        for name in (CASE_WITHOUT_PV, CASE_WITH_PV):
            if name not in stored["cases"]:
                continue
            case_config = (config if name == CASE_WITH_PV
                           else config.with_pv(None))
            entry = stored["cases"][name]
            cases.append((name, case_config, Schedule(entry["unscheduled"]),
                          Schedule(entry["scheduled"])))
    except (KeyError, TypeError) as ex:
        raise MissingArtifactError(
            "Malformed {} in {}: {!r}".format(SCHEDULES_FILENAME, run_dir, ex))
    if not cases:
        raise MissingArtifactError(
            "{} in {} holds no case".format(SCHEDULES_FILENAME, run_dir))
    return cases


def _write_csv(
    path: str, header: Sequence[str], rows: Sequence[Sequence[Any]]
) -> None:
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def _slot_columns(
    header: List[str], columns: List[Sequence[float]]
) -> Tuple[List[str], List[List[Any]]]:
    rows = [[t] + [col[t] for col in columns] for t in TIME_GRID.slots]
    return ["slot"] + header, rows


def emit_plot_data(run_dir: str) -> Dict[str, str]:
    """
    Write the plot data CSVs of a run directory from its scenario echo and
    schedules.

    :return: Mapping of CSV file name to the path written.

    :raises MissingArtifactError: The scenario echo or the schedules file is
        missing or malformed.
    """
    cases = _load_cases(run_dir)
    config = cases[-1][1]
    written = {}

    def emit(name: str, header: Sequence[str],
             rows: Sequence[Sequence[Any]]) -> None:
        path = os.path.join(run_dir, name)
        _write_csv(path, header, rows)
        written[name] = path
        LOG.debug("Wrote %s", path)

    emit(PRICE_FILENAME,
         *_slot_columns(["price_per_kwh"], [config.price.prices]))
    emit(PV_FILENAME, *_slot_columns(
        ["pv_generation_kwh"], [pv_generation_profile(config.pv).tolist()]))

    load_header: List[str] = []
    load_cols: List[Sequence[float]] = []
    cost_header: List[str] = []
    cost_cols: List[Sequence[float]] = []
    par_rows: List[List[Any]] = []
    for name, case_config, unscheduled, scheduled in cases:
        pair = (("unscheduled", unscheduled), ("scheduled", scheduled))
        for label, s in pair:
            load_header.append("{}_{}_kwh".format(name, label))
            load_cols.append(hourly_load(s, case_config).to_list())
        if case_config.pv is not None:
            for label, s in pair:
                load_header.append("{}_{}_grid_kwh".format(name, label))
                load_cols.append(billed_load(s, case_config).to_list())
        for label, s in pair:
            cost_header.append("{}_{}_cost".format(name, label))
            cost_cols.append(hourly_cost(billed_load(s, case_config),
                                         case_config.price).tolist())
        par_us = par_or_none(billed_load(unscheduled, case_config))
        par_s = par_or_none(billed_load(scheduled, case_config))
        reduction = None
        if par_us is not None and par_s is not None:
            reduction = 100.0 * (par_us - par_s) / par_us
        par_rows.append([name] + ["" if v is None else v
                                  for v in (par_us, par_s, reduction)])

    emit(LOAD_FILENAME, *_slot_columns(load_header, load_cols))
    emit(COST_FILENAME, *_slot_columns(cost_header, cost_cols))
    emit(PAR_FILENAME,
         ["case", "unscheduled_par", "scheduled_par", "par_reduction_pct"],
         par_rows)
    LOG.info("Wrote %d plot data file(s) to %s", len(written), run_dir)
    return written
