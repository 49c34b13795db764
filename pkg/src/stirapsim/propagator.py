"""Fixed-step RK4 propagation of the non-Hermitian Schrodinger equation.

The state advances under d|psi>/dt = -i H(t) |psi| with H(t) a linear
combination of constant coupling patterns plus an imaginary decay diagonal.
Constant-amplitude couplings are folded into a static matrix once; only the
time-varying drive values are re-evaluated per step, which leaves the
assembled operator identical to a naive per-step construction.

The integrator refuses steps with h * max||H|| > 0.1: beyond that the local
truncation error of classic RK4 grows out of the regime the convergence
check validates, and silent garbage is worse than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisIndex
from .errors import NumericalRefusal
from .hamiltonian import (
    CouplingPatterns,
    SystemParams,
    coupling_patterns,
    decay_diagonal,
    restrict,
)
from .pulses import PulseSchedule

MAX_STEP_HNORM = 0.1
ROUNDOFF_FLOOR = 1e-13


@dataclass
class Trajectory:
    times: np.ndarray  # absolute time, 1/omega0 units
    states: np.ndarray  # (n_recorded, dim) complex
    norms: np.ndarray  # squared norm per recorded point
    meta: dict

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _mode_operators(params: SystemParams, idx: BasisIndex, restrict_to_s: bool,
                    patterns: CouplingPatterns | None):
    if patterns is None:
        patterns = coupling_patterns(idx)
    dec = decay_diagonal(params, idx)
    mats = [patterns.omega_a, patterns.omega_b, patterns.g_a, patterns.g_b]
    if restrict_to_s:
        mats = [restrict(m, idx) for m in mats]
        dec = dec[list(idx.subspace)]
    return mats, dec


def _hnorm_bound(schedule: PulseSchedule, mats, dec, t_lo: float, t_hi: float) -> float:
    """Triangle-inequality bound on max ||H(t)||_2 over the window."""
    grid = np.linspace(t_lo, t_hi, 101)
    vals = [np.max(np.abs(np.atleast_1d(shape.value(grid, schedule.tau))))
            for shape in (schedule.omega_a, schedule.omega_b, schedule.g_a, schedule.g_b)]
    bound = sum(v * np.linalg.norm(m, 2) for v, m in zip(vals, mats))
    return float(bound + np.max(dec) if dec.size else bound)


def rk4_integrate(apply_h, psi0: np.ndarray, t_start: float, t_end: float,
                  step: float, record_every: int = 1):
    """Classic RK4 for dpsi/dt = -i * apply_h(t, psi) on a uniform grid.

    The window is divided into round((t_end - t_start)/step) equal steps, so
    the effective step lands exactly on t_end. Returns (times, states) with
    the initial point, every record_every-th step, and always the final one.
    """
    span = t_end - t_start
    n_steps = max(1, round(span / step))
    h = span / n_steps
    k = max(1, int(record_every))

    psi = np.array(psi0, dtype=complex)
    rec_t = [t_start]
    rec_y = [psi.copy()]
    for i in range(n_steps):
        t = t_start + i * h
        k1 = -1j * apply_h(t, psi)
        k2 = -1j * apply_h(t + 0.5 * h, psi + (0.5 * h) * k1)
        k3 = -1j * apply_h(t + 0.5 * h, psi + (0.5 * h) * k2)
        k4 = -1j * apply_h(t + h, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % k == 0 or i + 1 == n_steps:
            rec_t.append(t_start + (i + 1) * h)
            rec_y.append(psi.copy())
    return np.array(rec_t), np.array(rec_y), n_steps, h


def propagate(
    initial: np.ndarray,
    schedule: PulseSchedule,
    params: SystemParams,
    idx: BasisIndex,
    restrict_to_s: bool = False,
    patterns: CouplingPatterns | None = None,
) -> Trajectory:
    mats, dec = _mode_operators(params, idx, restrict_to_s, patterns)
    dim = mats[0].shape[0]
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (dim,):
        raise ValueError(f"initial state has shape {initial.shape}, expected ({dim},)")
    nrm = np.linalg.norm(initial)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"initial state norm {nrm} is not 1")

    tau = params.tau
    lo, hi = params.resolved_window()
    t_start, t_end = lo * tau, hi * tau
    h = params.step * tau
    n_steps = max(1, round((t_end - t_start) / h))
    h_eff = (t_end - t_start) / n_steps

    bound = _hnorm_bound(schedule, mats, dec, t_start, t_end)
    if h_eff * bound > MAX_STEP_HNORM:
        raise NumericalRefusal(
            f"step {h_eff:.3g} times the Hamiltonian norm bound {bound:.3g} "
            f"exceeds {MAX_STEP_HNORM}; reduce step below "
            f"{MAX_STEP_HNORM / bound / tau:.3g} tau"
        )

    shapes = (schedule.omega_a, schedule.omega_b, schedule.g_a, schedule.g_b)
    static = np.diag(-1j * dec)
    varying = []
    for shape, mat in zip(shapes, mats):
        if shape.kind == "constant":
            static = static + shape.amplitude * mat
        else:
            varying.append((shape, mat))

    # drive values precomputed on the step and midpoint grids
    steps_t = t_start + h_eff * np.arange(n_steps + 1)
    mids_t = t_start + h_eff * (np.arange(n_steps) + 0.5)
    at_step = [np.atleast_1d(s.value(steps_t, tau)) for s, _ in varying]
    at_mid = [np.atleast_1d(s.value(mids_t, tau)) for s, _ in varying]
    v_mats = [m for _, m in varying]

    def apply_with(coeffs, psi):
        out = static @ psi
        for c, m in zip(coeffs, v_mats):
            out += c * (m @ psi)
        return out

    record_every = params.record_every or max(1, n_steps // 1000)
    psi = initial.copy()
    rec_t = [t_start]
    rec_y = [psi.copy()]
    for i in range(n_steps):
        c0 = [a[i] for a in at_step]
        cm = [a[i] for a in at_mid]
        c1 = [a[i + 1] for a in at_step]
        k1 = -1j * apply_with(c0, psi)
        k2 = -1j * apply_with(cm, psi + (0.5 * h_eff) * k1)
        k3 = -1j * apply_with(cm, psi + (0.5 * h_eff) * k2)
        k4 = -1j * apply_with(c1, psi + h_eff * k3)
        psi = psi + (h_eff / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % record_every == 0 or i + 1 == n_steps:
            rec_t.append(t_start + (i + 1) * h_eff)
            rec_y.append(psi.copy())

    times = np.array(rec_t)
    states = np.array(rec_y)
    norms = np.sum(np.abs(states) ** 2, axis=1)
    meta = {
        "method": "rk4",
        "step_tau": params.step,
        "step_effective": h_eff,
        "n_steps": n_steps,
        "record_every": record_every,
        "restricted_to_subspace": restrict_to_s,
        "hnorm_bound": bound,
        "window": [lo, hi],
    }
    return Trajectory(times=times, states=states, norms=norms, meta=meta)


@dataclass
class ConvergenceReport:
    order: float | None
    roundoff_limited: bool
    diff_coarse: float
    diff_fine: float


def convergence_order(
    initial: np.ndarray,
    schedule: PulseSchedule,
    params: SystemParams,
    idx: BasisIndex,
    restrict_to_s: bool = False,
) -> ConvergenceReport:
    """Richardson estimate of the integrator order from runs at h, h/2, h/4."""
    finals = []
    for divisor in (1, 2, 4):
        p = SystemParams(**{**params.describe(), "step": params.step / divisor,
                            "record_every": None})
        traj = propagate(initial, schedule, p, idx, restrict_to_s)
        finals.append(traj.final_state)
    d1 = float(np.linalg.norm(finals[0] - finals[1]))
    d2 = float(np.linalg.norm(finals[1] - finals[2]))
    if d2 <= ROUNDOFF_FLOOR or d1 <= ROUNDOFF_FLOOR:
        return ConvergenceReport(None, True, d1, d2)
    return ConvergenceReport(math.log2(d1 / d2), False, d1, d2)
