"""Grid sweeps over pulse and system parameters.

Each grid point is an independent propagation; rows come back in
lexicographic axis order no matter how many workers evaluate them, so scan
output is reproducible byte for byte. Failures of individual points are
recorded in-row and the sweep continues.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .basis import build_basis
from .errors import ConfigError
from .hamiltonian import SystemParams
from .observables import max_deviation_from_third, metrics_rows, time_averaged_pe
from .propagator import propagate
from .pulses import preset_fstirap, preset_stirap

SCAN_AXES = ("tau", "t0", "width_divisor", "t_end", "g")
SCENARIOS = ("stirap", "fstirap")
DEFAULT_POINT_CAP = 10_000

# metrics computed on the final recorded row
_FINAL_METRICS = (
    "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8",
    "Pp", "Pea", "Pe", "norm", "fid_qubit", "fid_qutrit", "maxdev_third",
)
# metrics summarizing the whole trajectory
_SUMMARY_METRICS = ("mean_Pe", "max_Pp", "max_Pea", "min_norm")
METRICS = _FINAL_METRICS + _SUMMARY_METRICS


@dataclass(frozen=True)
class ScanSpec:
    base: SystemParams
    axes: tuple  # ((name, (v1, v2, ...)), ...) in sweep-priority order
    scenario: str = "stirap"
    outputs: tuple = ("fid_qubit", "maxdev_third")
    workers: int = 1
    point_cap: int = DEFAULT_POINT_CAP

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if not self.axes:
            raise ConfigError("scan needs at least one axis")
        for name, values in self.axes:
            if name not in SCAN_AXES:
                raise ConfigError(f"unknown scan axis {name!r}; expected one of {SCAN_AXES}")
            if len(values) == 0:
                raise ConfigError(f"scan axis {name!r} has no values")
        names = [name for name, _ in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate scan axes in {names}")
        n = self.n_points
        if n > self.point_cap:
            raise ConfigError(f"scan grid has {n} points, above the cap of {self.point_cap}")
        for m in self.outputs:
            if m not in METRICS:
                raise ConfigError(f"unknown metric {m!r}; expected one of {METRICS}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    @property
    def n_points(self) -> int:
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def grid(self):
        """Axis assignments in lexicographic order, first axis slowest."""
        names = [name for name, _ in self.axes]
        for combo in itertools.product(*(values for _, values in self.axes)):
            yield dict(zip(names, combo))


def schedule_for(params: SystemParams, scenario: str):
    if scenario == "fstirap":
        return preset_fstirap(params)
    return preset_stirap(params)


def _point_params(base: SystemParams, assignment: dict) -> SystemParams:
    updates = dict(assignment)
    # a swept end time needs an explicit start; fall back to the default window
    if "t_end" in updates and base.t_start is None:
        updates["t_start"] = base.resolved_window()[0]
    return replace(base, **updates)


def evaluate_point(base: SystemParams, assignment: dict, scenario: str, outputs):
    """Metrics for one grid point; exceptions come back as the error field."""
    try:
        params = _point_params(base, assignment)
        schedule = schedule_for(params, scenario)
        idx = build_basis(params.n_max)
        psi0 = np.zeros(8, dtype=complex)
        psi0[0] = 1.0
        traj = propagate(psi0, schedule, params, idx, restrict_to_s=True)
        rows, _ = metrics_rows(traj, schedule, idx=None)
        final = rows[-1]
        values = {}
        for m in outputs:
            if m == "maxdev_third":
                values[m] = max_deviation_from_third(final)
            elif m == "mean_Pe":
                values[m] = time_averaged_pe(rows)
            elif m == "max_Pp":
                values[m] = max(r.p_p for r in rows)
            elif m == "max_Pea":
                values[m] = max(r.p_ea for r in rows)
            elif m == "min_norm":
                values[m] = min(r.norm for r in rows)
            elif m == "Pe":
                values[m] = final.p_e
            elif m.startswith("P") and m[1:].isdigit():
                values[m] = final.p[int(m[1:]) - 1]
            else:
                values[m] = {
                    "Pp": final.p_p, "Pea": final.p_ea, "norm": final.norm,
                    "fid_qubit": final.fid_qubit, "fid_qutrit": final.fid_qutrit,
                }[m]
        return {**assignment, **values, "error": ""}
    except Exception as exc:  # noqa: BLE001  - per-point isolation is the contract
        row = {**assignment, "error": f"{type(exc).__name__}: {exc}"}
        row.update({m: None for m in outputs})
        return row


def _evaluate_star(args):
    return evaluate_point(*args)


def run_scan(spec: ScanSpec) -> list[dict]:
    """One row per grid point, ordered lexicographically over the axes."""
    jobs = [(spec.base, assignment, spec.scenario, spec.outputs) for assignment in spec.grid()]
    if spec.workers == 1:
        return [_evaluate_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        return list(pool.map(_evaluate_star, jobs, chunksize=1))


def scan_columns(spec: ScanSpec) -> list[str]:
    return [name for name, _ in spec.axes] + list(spec.outputs) + ["error"]


def _objective_fn(objective: str, available):
    """Objectives: a metric name, "1-<metric>", or a numeric constant."""
    text = objective.strip().replace("−", "-")
    try:
        const = float(text)
        return lambda row: const
    except ValueError:
        pass
    if text.startswith("1-") or text.startswith("1 -"):
        inner = text.split("-", 1)[1].strip()
        if inner not in available:
            raise ConfigError(f"objective references unknown metric {inner!r}")
        return lambda row: None if row[inner] is None else 1.0 - row[inner]
    if text not in available:
        raise ConfigError(f"objective references unknown metric {text!r}")
    return lambda row: row[text]


def best_point(table: list[dict], objective: str) -> dict:
    """Row minimizing the objective; ties and constants pick the earliest row."""
    if not table:
        raise ConfigError("cannot pick a best point from an empty scan table")
    metric_keys = [k for k in table[0] if k != "error"]
    fn = _objective_fn(objective, metric_keys)
    best = None
    best_val = None
    for row in table:
        if row.get("error"):
            continue
        val = fn(row)
        if val is None:
            continue
        if best_val is None or val < best_val:
            best, best_val = row, val
    if best is None:
        raise ConfigError(f"no scan row could evaluate objective {objective!r}")
    return best
