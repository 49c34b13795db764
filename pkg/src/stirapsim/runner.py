"""Orchestration: run a configured simulation, dark-state check, or scan and
serialize the results.

CSV output is RFC-4180 style (CRLF, '.' decimal point) with floats written
in shortest round-trip form, so identical runs produce identical bytes and
the files parse back to the exact same doubles.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .basis import build_basis
from .config import RunConfig, config_to_dict
from .darkstate import dark_state, null_space_S, nullity_residual
from .errors import OutputError
from .observables import (
    CSV_COLUMNS,
    error_probability,
    metrics_rows,
    time_averaged_pe,
)
from .propagator import propagate
from .pulses import random_schedule
from .scan import ScanSpec, best_point, run_scan, scan_columns

DARKCHECK_COLUMNS = ("t", "defined", "residual", "h_norm", "kernel_dim")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


@dataclass
class SimulateResult:
    csv_text: str
    meta: dict
    rows: list


def run_simulate(config: RunConfig) -> SimulateResult:
    params = config.params
    idx = build_basis(params.n_max)
    schedule = config.resolved_schedule()
    if config.restrict_to_s:
        initial = np.zeros(8, dtype=complex)
        initial[0] = 1.0
        metrics_idx = None
    else:
        initial = idx.initial_state()
        metrics_idx = idx
    traj = propagate(initial, schedule, params, idx, restrict_to_s=config.restrict_to_s)
    rows, metrics_meta = metrics_rows(
        traj, schedule, idx=metrics_idx, normalize_pe=config.normalize_pe
    )

    # both error-probability conventions, for side-by-side comparison
    mean_main = time_averaged_pe(rows)
    other = []
    if metrics_meta["pe_defined"]:
        for i, t in enumerate(traj.times):
            d = dark_state(float(t), schedule)
            if d.defined:
                other.append(
                    error_probability(
                        traj.states[i], d, metrics_idx, normalize=not config.normalize_pe
                    )
                )
    mean_other = float(np.mean(other)) if other else None
    key_main = "normalized" if config.normalize_pe else "raw"
    key_other = "raw" if config.normalize_pe else "normalized"

    csv_text = rows_to_csv(CSV_COLUMNS, (r.as_list() for r in rows))
    meta = {
        "config": config_to_dict(config, resolved_record_every=traj.meta["record_every"]),
        "trajectory": traj.meta,
        "metrics": {
            **metrics_meta,
            "mean_pe": {key_main: mean_main, key_other: mean_other},
            "final": dict(zip(CSV_COLUMNS, rows[-1].as_list())),
        },
    }
    return SimulateResult(csv_text=csv_text, meta=meta, rows=rows)


@dataclass
class DarkcheckResult:
    csv_text: str
    meta: dict


def run_darkcheck(config: RunConfig, n_times: int = 101, seed: int | None = None) -> DarkcheckResult:
    params = config.params
    schedule = (
        random_schedule(seed, tau=params.tau)
        if seed is not None
        else config.resolved_schedule()
    )
    lo, hi = params.resolved_window()
    times = np.linspace(lo * params.tau, hi * params.tau, n_times)
    rows = []
    n_defined = 0
    worst = 0.0
    for t in times:
        rep = nullity_residual(float(t), schedule)
        _, kdim = null_space_S(float(t), schedule)
        if rep["defined"]:
            n_defined += 1
            worst = max(worst, rep["residual"])
        rows.append(
            [rep["t"], rep["defined"], rep["residual"] if rep["defined"] else None,
             rep["h_norm"], kdim]
        )
    meta = {
        "config": config_to_dict(config),
        "schedule": schedule.describe(),
        "seed": seed,
        "n_times": n_times,
        "n_defined": n_defined,
        "max_residual": worst if n_defined else None,
    }
    return DarkcheckResult(csv_text=rows_to_csv(DARKCHECK_COLUMNS, rows), meta=meta)


@dataclass
class ScanResult:
    csv_text: str
    table: list
    best: dict | None
    columns: list


def run_scan_spec(spec: ScanSpec, objective: str | None = None) -> ScanResult:
    table = run_scan(spec)
    columns = scan_columns(spec)
    csv_text = rows_to_csv(columns, ([row.get(c) for c in columns] for row in table))
    best = best_point(table, objective) if objective else None
    return ScanResult(csv_text=csv_text, table=table, best=best, columns=columns)


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"
