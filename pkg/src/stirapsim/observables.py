"""Metrics derived from simulated states: populations, error probability,
entanglement-target fidelities.

All metrics work on raw (possibly sub-normalized) states: under the
non-Hermitian decay model the missing norm is the accumulated loss, and by
default the error probability keeps that loss visible. The normalize_pe
switch computes the variant projected back onto the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import EXCITED_LEVELS, BasisIndex, project_to_subspace
from .darkstate import DarkState, dark_state
from .propagator import Trajectory
from .pulses import PulseSchedule

CSV_COLUMNS = (
    "t",
    "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8",
    "Pp", "Pea", "Pe",
    "norm",
    "fid_qubit", "fid_qutrit",
    "OmegaA", "OmegaB",
)

# subspace positions (0-based) holding a photon or an excited atom
_S_PHOTON = (2, 5)
_S_EXCITED = (1, 3, 6)


@dataclass
class MetricsRow:
    t: float
    p: tuple  # P1..P8
    p_p: float
    p_ea: float
    p_e: float | None
    norm: float
    fid_qubit: float
    fid_qutrit: float
    omega_a: float
    omega_b: float

    def as_list(self) -> list:
        return [self.t, *self.p, self.p_p, self.p_ea, self.p_e, self.norm,
                self.fid_qubit, self.fid_qutrit, self.omega_a, self.omega_b]


def qubit_target() -> np.ndarray:
    """(|g_L,g_R> + |g_R,g_L>)/sqrt(2) with the cavity in vacuum, S coords."""
    v = np.zeros(8, dtype=complex)
    v[4] = v[7] = 1.0 / np.sqrt(2.0)
    return v


def qutrit_target() -> np.ndarray:
    """(|g_a,g_0> + |g_L,g_R> + |g_R,g_L>)/sqrt(3), cavity vacuum, S coords."""
    v = np.zeros(8, dtype=complex)
    v[0] = v[4] = v[7] = 1.0 / np.sqrt(3.0)
    return v


def _subspace_amplitudes(state: np.ndarray, idx: BasisIndex | None):
    state = np.asarray(state)
    if state.shape == (8,):
        return state
    if idx is None:
        raise ValueError("full-space state needs a BasisIndex")
    sub, _ = project_to_subspace(state, idx)
    return sub


def populations(state: np.ndarray, idx: BasisIndex | None = None):
    """(P1..P8, photon probability, excited-atom probability).

    For a full-space state the photon and excited-state sums run over the
    whole basis, not just the subspace; on an 8-component state they reduce
    to the subspace positions listed above.
    """
    state = np.asarray(state)
    if state.shape == (8,):
        p = np.abs(state) ** 2
        p_p = float(p[list(_S_PHOTON)].sum())
        p_ea = float(p[list(_S_EXCITED)].sum())
        return p, p_p, p_ea
    if idx is None:
        raise ValueError("full-space state needs a BasisIndex")
    if state.shape != (idx.dim,):
        raise ValueError(f"state shape {state.shape} does not match dim {idx.dim}")
    dens = np.abs(state) ** 2
    p = dens[list(idx.subspace)]
    p_p = 0.0
    p_ea = 0.0
    for i, s in enumerate(idx.states):
        if s.n_r + s.n_l >= 1:
            p_p += dens[i]
        if s.atom_a in EXCITED_LEVELS or s.atom_b in EXCITED_LEVELS:
            p_ea += dens[i]
    return p, float(p_p), float(p_ea)


def error_probability(
    state: np.ndarray, dark: DarkState, idx: BasisIndex | None = None,
    normalize: bool = False,
) -> float | None:
    """1 - |<D|psi>|^2 against the raw state; None when D is undefined."""
    if not dark.defined:
        return None
    sub = _subspace_amplitudes(state, idx)
    if normalize:
        full_norm = np.linalg.norm(np.asarray(state))
        if full_norm > 0:
            sub = np.asarray(sub) / full_norm
    overlap = np.vdot(dark.amplitudes, sub)
    return float(1.0 - np.abs(overlap) ** 2)


def fidelity(state: np.ndarray, target: np.ndarray, idx: BasisIndex | None = None) -> float:
    sub = _subspace_amplitudes(state, idx)
    return float(np.abs(np.vdot(target, sub)) ** 2)


def _dark_states_for(times, schedule: PulseSchedule):
    """Dark state per time; undefined points borrow the nearest defined one."""
    darks = [dark_state(float(t), schedule) for t in times]
    defined_at = [i for i, d in enumerate(darks) if d.defined]
    substituted = []
    if defined_at and len(defined_at) < len(darks):
        defined_times = np.array([times[i] for i in defined_at])
        for i, d in enumerate(darks):
            if not d.defined:
                j = defined_at[int(np.argmin(np.abs(defined_times - times[i])))]
                darks[i] = darks[j]
                substituted.append(float(times[i]))
    return darks, substituted


def metrics_rows(
    traj: Trajectory,
    schedule: PulseSchedule,
    idx: BasisIndex | None = None,
    normalize_pe: bool = False,
):
    """One MetricsRow per recorded trajectory point, plus metrics metadata.

    When no dark state is defined anywhere in the window the Pe column is
    emitted as missing values; substituted times are reported so downstream
    consumers can tell borrowed dark states from exact ones.
    """
    darks, substituted = _dark_states_for(traj.times, schedule)
    any_defined = any(d.defined for d in darks)
    q2 = qubit_target()
    q3 = qutrit_target()
    rows = []
    for i, t in enumerate(traj.times):
        state = traj.states[i]
        p, p_p, p_ea = populations(state, idx)
        sub = _subspace_amplitudes(state, idx)
        p_e = (
            error_probability(state, darks[i], idx, normalize=normalize_pe)
            if any_defined
            else None
        )
        oa, ob = (float(x) for x in schedule.evaluate(float(t))[:2])
        rows.append(
            MetricsRow(
                t=float(t),
                p=tuple(float(x) for x in p),
                p_p=p_p,
                p_ea=p_ea,
                p_e=p_e,
                norm=float(traj.norms[i]),
                fid_qubit=float(np.abs(np.vdot(q2, sub)) ** 2),
                fid_qutrit=float(np.abs(np.vdot(q3, sub)) ** 2),
                omega_a=oa,
                omega_b=ob,
            )
        )
    meta = {
        "pe_defined": any_defined,
        "pe_normalized": normalize_pe,
        "pe_substituted_times": substituted,
    }
    return rows, meta


def time_averaged_pe(rows) -> float | None:
    vals = [r.p_e for r in rows if r.p_e is not None]
    if not vals:
        return None
    return float(np.mean(vals))


def max_deviation_from_third(row: MetricsRow) -> float:
    third = 1.0 / 3.0
    return max(abs(row.p[0] - third), abs(row.p[4] - third), abs(row.p[7] - third))
