"""Interaction Hamiltonian assembly over the product basis.

The Hermitian part contains exactly seven coupling families (plus conjugates):

    g_A a_R |e_0>_A <g_R|      g_A a_L |e_0>_A <g_L|      Omega_A |e_0>_A <g_a|
    g_B a_R |e_L>_B <g_0|      g_B a_L |e_R>_B <g_0|
    Omega_B |e_L>_B <g_L|      Omega_B |e_R>_B <g_R|

with photon operators carrying the usual sqrt(n) factors on the truncated
number states. Dissipation enters as a purely imaginary diagonal,
-i*kappa*(n_R + n_L) - i*gamma*(number of excited atoms), which models loss
as norm decay without quantum jumps.

Every family is linear in one drive amplitude, so H(t) is a fixed linear
combination of four constant pattern matrices; assembly uses that form. All
units are in the reference Rabi frequency (hbar = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import EXCITED_LEVELS, BasisIndex
from .errors import ConfigError
from .pulses import PulseSchedule

WINDOW_DEFAULTS = {2.0: (-6.0, 10.0), 200.0: (-40.0, 60.0)}


@dataclass
class SystemParams:
    """Physical constants plus truncation and integration settings.

    Frequencies are in units of the reference Rabi frequency omega0, time in
    units of 1/omega0. tau is the pulse time scale (1/omega0 units), t0 the
    pulse delay (tau units), step the integrator step (tau units). kappa and
    gamma are stored here already converted to omega0 units; the config layer
    accepts them in units of g as well.
    """

    omega0: float = 1.0
    g: float = 5.0
    tau: float = 1.0
    t0: float = 2.0
    kappa: float = 0.025
    gamma: float = 0.025
    width_divisor: float = 2.0
    n_max: int = 1
    t_start: float | None = None  # tau units; None -> width-dependent default
    t_end: float | None = None
    step: float = 5e-4  # tau units
    record_every: int | None = None  # None -> about 1000 output rows

    def __post_init__(self):
        for name in ("kappa", "gamma"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0, got {getattr(self, name)}")
        for name in ("omega0", "g", "tau", "step", "width_divisor"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be > 0, got {getattr(self, name)}")
        if self.n_max < 1:
            raise ConfigError(f"n_max: must be >= 1, got {self.n_max}")
        if self.record_every is not None and self.record_every < 1:
            raise ConfigError(f"record_every: must be >= 1, got {self.record_every}")
        lo, hi = self.resolved_window()
        if not (hi > lo):
            raise ConfigError(f"t_end: window [{lo}, {hi}] is not increasing")

    def resolved_window(self) -> tuple:
        """Window in tau units, substituting width-dependent defaults."""
        if self.width_divisor in WINDOW_DEFAULTS:
            lo, hi = WINDOW_DEFAULTS[self.width_divisor]
        else:
            scale = math.sqrt(self.width_divisor / 2.0)
            lo, hi = -6.0 * scale, 10.0 * scale
        t_start = self.t_start if self.t_start is not None else lo
        t_end = self.t_end if self.t_end is not None else hi
        return float(t_start), float(t_end)

    def describe(self) -> dict:
        out = {
            "omega0": self.omega0,
            "g": self.g,
            "tau": self.tau,
            "t0": self.t0,
            "kappa": self.kappa,
            "gamma": self.gamma,
            "width_divisor": self.width_divisor,
            "n_max": self.n_max,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "step": self.step,
            "record_every": self.record_every,
        }
        return out


@dataclass
class CouplingPatterns:
    """The four unit-amplitude coupling matrices; H0(t) is their combination."""

    omega_a: np.ndarray
    omega_b: np.ndarray
    g_a: np.ndarray
    g_b: np.ndarray

    def combine(self, oa: float, ob: float, ga: float, gb: float) -> np.ndarray:
        return oa * self.omega_a + ob * self.omega_b + ga * self.g_a + gb * self.g_b

    def spectral_norms(self) -> tuple:
        return tuple(
            float(np.linalg.norm(m, 2))
            for m in (self.omega_a, self.omega_b, self.g_a, self.g_b)
        )


def coupling_patterns(idx: BasisIndex) -> CouplingPatterns:
    dim = idx.dim
    p_oa = np.zeros((dim, dim))
    p_ob = np.zeros((dim, dim))
    p_ga = np.zeros((dim, dim))
    p_gb = np.zeros((dim, dim))

    def add(pattern, target_tuple, source_i, coeff):
        target_i = idx.index_of(*target_tuple)
        pattern[target_i, source_i] += coeff

    for i, s in enumerate(idx.states):
        a, b, nr, nl = s.as_tuple()
        # each term raises the excited-atom count, so conjugates never collide
        if a == "g_a":
            add(p_oa, ("e_0", b, nr, nl), i, 1.0)
        if a == "g_R" and nr >= 1:
            add(p_ga, ("e_0", b, nr - 1, nl), i, math.sqrt(nr))
        if a == "g_L" and nl >= 1:
            add(p_ga, ("e_0", b, nr, nl - 1), i, math.sqrt(nl))
        if b == "g_0" and nr >= 1:
            add(p_gb, (a, "e_L", nr - 1, nl), i, math.sqrt(nr))
        if b == "g_0" and nl >= 1:
            add(p_gb, (a, "e_R", nr, nl - 1), i, math.sqrt(nl))
        if b == "g_L":
            add(p_ob, (a, "e_L", nr, nl), i, 1.0)
        if b == "g_R":
            add(p_ob, (a, "e_R", nr, nl), i, 1.0)

    return CouplingPatterns(
        omega_a=p_oa + p_oa.T,
        omega_b=p_ob + p_ob.T,
        g_a=p_ga + p_ga.T,
        g_b=p_gb + p_gb.T,
    )


def decay_diagonal(params: SystemParams, idx: BasisIndex) -> np.ndarray:
    """Loss rate per basis state: kappa per photon, gamma per excited atom."""
    dec = np.empty(idx.dim)
    for i, s in enumerate(idx.states):
        n_exc = (s.atom_a in EXCITED_LEVELS) + (s.atom_b in EXCITED_LEVELS)
        dec[i] = params.kappa * (s.n_r + s.n_l) + params.gamma * n_exc
    return dec


def assemble_H0(
    t: float,
    schedule: PulseSchedule,
    idx: BasisIndex,
    patterns: CouplingPatterns | None = None,
) -> np.ndarray:
    if patterns is None:
        patterns = coupling_patterns(idx)
    oa, ob, ga, gb = schedule.evaluate(t)
    return patterns.combine(float(oa), float(ob), float(ga), float(gb)).astype(complex)


def assemble_Hnh(
    t: float,
    schedule: PulseSchedule,
    params: SystemParams,
    idx: BasisIndex,
    patterns: CouplingPatterns | None = None,
) -> np.ndarray:
    h = assemble_H0(t, schedule, idx, patterns)
    h[np.diag_indices_from(h)] -= 1j * decay_diagonal(params, idx)
    return h


def restrict(matrix: np.ndarray, idx: BasisIndex) -> np.ndarray:
    """8x8 block of a full-space operator on the invariant subspace."""
    sub = list(idx.subspace)
    return matrix[np.ix_(sub, sub)]


def check_invariance(
    idx: BasisIndex, schedule: PulseSchedule, times
) -> tuple[float, float]:
    """Max out-of-subspace leakage of H0 applied to each subspace basis state.

    Returns (max leakage, max Frobenius norm of H0 over the grid); the
    subspace is closed when the first is <= 1e-12 times the second.
    """
    patterns = coupling_patterns(idx)
    sub = list(idx.subspace)
    max_leak = 0.0
    max_norm = 0.0
    for t in times:
        h = assemble_H0(float(t), schedule, idx, patterns)
        max_norm = max(max_norm, float(np.linalg.norm(h)))
        cols = h[:, sub].copy()
        cols[sub, :] = 0.0
        leak = float(np.max(np.linalg.norm(cols, axis=0)))
        max_leak = max(max_leak, leak)
    return max_leak, max_norm


def lr_permutation(idx: BasisIndex) -> np.ndarray:
    """Index permutation swapping L and R labels on both atoms and both modes."""
    swap = {"g_L": "g_R", "g_R": "g_L", "e_L": "e_R", "e_R": "e_L"}
    perm = np.empty(idx.dim, dtype=int)
    for i, s in enumerate(idx.states):
        perm[i] = idx.index_of(
            swap.get(s.atom_a, s.atom_a),
            swap.get(s.atom_b, s.atom_b),
            s.n_l,  # photon modes exchange occupation
            s.n_r,
        )
    return perm
