"""Analytic zero-eigenvalue state of the coupled system and numerical checks.

For drive values (Omega_A, Omega_B, g_A, g_B) the interaction Hamiltonian
restricted to the invariant subspace annihilates

    D = C * (2 g_A Omega_B, 0, -Omega_A Omega_B, 0, g_B Omega_A,
             -Omega_A Omega_B, 0, g_B Omega_A)

with C^-2 = 4 g_A^2 Omega_B^2 + 2 Omega_A^2 Omega_B^2 + 2 g_B^2 Omega_A^2.
When the couplings dominate the drives the photonic components (positions
3 and 6) are negligible, giving the approximate form used to read off the
target superpositions. Both forms are verified here against an SVD null
space of the 8x8 restriction, which for generic drive values turns out to
be two-dimensional: the second null vector is antisymmetric under the L/R
relabeling and is never reached from the symmetric initial state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space as _svd_null_space

from .basis import BasisIndex, build_basis
from .hamiltonian import CouplingPatterns, coupling_patterns, restrict
from .pulses import PulseSchedule


@dataclass
class DarkState:
    amplitudes: np.ndarray  # 8 components, subspace order
    normalization_c: float  # 0.0 when undefined
    defined: bool

    def embed(self, idx: BasisIndex) -> np.ndarray:
        v = np.zeros(idx.dim, dtype=complex)
        v[list(idx.subspace)] = self.amplitudes
        return v


_UNDEFINED = DarkState(np.zeros(8, dtype=complex), 0.0, False)


def _normalized(raw: np.ndarray) -> DarkState:
    norm_sq = float(np.dot(raw, raw))
    if norm_sq <= 0.0 or not np.isfinite(norm_sq):
        return _UNDEFINED
    c = 1.0 / np.sqrt(norm_sq)
    return DarkState((c * raw).astype(complex), c, True)


def dark_state(t: float, schedule: PulseSchedule) -> DarkState:
    """Exact null vector for the drive values at time t.

    Degenerate drive values (all three products zero, e.g. far pulse tails)
    give defined=False rather than an exception.
    """
    oa, ob, ga, gb = (float(x) for x in schedule.evaluate(t))
    raw = np.array(
        [2 * ga * ob, 0.0, -oa * ob, 0.0, gb * oa, -oa * ob, 0.0, gb * oa]
    )
    return _normalized(raw)


def dark_state_approx(t: float, schedule: PulseSchedule) -> DarkState:
    """Strong-coupling form: photonic components dropped."""
    oa, ob, ga, gb = (float(x) for x in schedule.evaluate(t))
    raw = np.array([2 * ga * ob, 0.0, 0.0, 0.0, gb * oa, 0.0, 0.0, gb * oa])
    return _normalized(raw)


_DEFAULT_IDX: BasisIndex | None = None
_DEFAULT_PATTERNS: CouplingPatterns | None = None


def _subspace_hamiltonian(t: float, schedule: PulseSchedule) -> np.ndarray:
    global _DEFAULT_IDX, _DEFAULT_PATTERNS
    if _DEFAULT_IDX is None:
        _DEFAULT_IDX = build_basis(1)
        _DEFAULT_PATTERNS = coupling_patterns(_DEFAULT_IDX)
    oa, ob, ga, gb = (float(x) for x in schedule.evaluate(t))
    full = _DEFAULT_PATTERNS.combine(oa, ob, ga, gb)
    return restrict(full, _DEFAULT_IDX)


def null_space_S(
    t: float, schedule: PulseSchedule, rcond: float = 1e-10
) -> tuple[np.ndarray, int]:
    """Orthonormal kernel basis of the 8x8 restricted Hamiltonian at time t.

    Thresholds singular values at rcond * sigma_max. Returns (basis columns,
    kernel dimension).
    """
    h = _subspace_hamiltonian(t, schedule)
    ns = _svd_null_space(h, rcond=rcond)
    return ns, ns.shape[1]


def span_residual(vector: np.ndarray, basis: np.ndarray) -> float:
    """Distance of a unit vector from the span of orthonormal basis columns."""
    if basis.size == 0:
        return float(np.linalg.norm(vector))
    proj = basis @ (basis.conj().T @ vector)
    return float(np.linalg.norm(vector - proj))


def nullity_residual(t: float, schedule: PulseSchedule) -> dict:
    """Relative annihilation residual of the analytic dark state at time t."""
    d = dark_state(t, schedule)
    h = _subspace_hamiltonian(t, schedule)
    h_norm = float(np.linalg.norm(h))
    if not d.defined:
        return {"t": t, "defined": False, "residual": None, "h_norm": h_norm}
    resid = float(np.linalg.norm(h @ d.amplitudes))
    rel = resid / (h_norm if h_norm > 0 else 1.0)
    return {"t": t, "defined": True, "residual": rel, "h_norm": h_norm}
