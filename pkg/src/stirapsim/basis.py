"""Product basis for two seven-level atoms and two cavity modes.

A basis state is |A, B, n_R, n_L> with A, B atomic levels and n_R, n_L
photon numbers up to the configured truncation. The full basis is ordered
lexicographically on (atomA, atomB, nR, nL), with atomic levels in the
canonical order below. The protocol dynamics lives entirely inside an
8-state subspace S whose canonical ordering defines the population labels
P1..P8 used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

# canonical level order; ground manifold first, then excited
LEVELS = ("g_a", "g_L", "g_0", "g_R", "e_L", "e_0", "e_R")
GROUND_LEVELS = frozenset({"g_a", "g_L", "g_0", "g_R"})
EXCITED_LEVELS = frozenset({"e_L", "e_0", "e_R"})

# the invariant subspace, in the order that defines P1..P8
S_LABELS = (
    ("g_a", "g_0", 0, 0),
    ("e_0", "g_0", 0, 0),
    ("g_L", "g_0", 0, 1),
    ("g_L", "e_R", 0, 0),
    ("g_L", "g_R", 0, 0),
    ("g_R", "g_0", 1, 0),
    ("g_R", "e_L", 0, 0),
    ("g_R", "g_L", 0, 0),
)


@dataclass(frozen=True)
class BasisState:
    atom_a: str
    atom_b: str
    n_r: int
    n_l: int

    def __post_init__(self):
        if self.atom_a not in LEVELS or self.atom_b not in LEVELS:
            raise ValueError(f"unknown atomic level in {self}")
        if self.n_r < 0 or self.n_l < 0:
            raise ValueError(f"negative photon number in {self}")

    def as_tuple(self):
        return (self.atom_a, self.atom_b, self.n_r, self.n_l)


class BasisIndex:
    """Bijection between basis states and contiguous indices, plus the S map."""

    def __init__(self, n_max: int = 1):
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        self.n_max = n_max
        photons = range(n_max + 1)
        self.states = tuple(
            BasisState(a, b, nr, nl)
            for a, b, nr, nl in product(LEVELS, LEVELS, photons, photons)
        )
        self._index = {s.as_tuple(): i for i, s in enumerate(self.states)}
        self.dim = len(self.states)
        self.subspace = tuple(self._index[lbl] for lbl in S_LABELS)

    def encode(self, state: BasisState) -> int:
        try:
            return self._index[state.as_tuple()]
        except KeyError:
            raise ValueError(f"{state} outside basis with n_max={self.n_max}") from None

    def index_of(self, atom_a: str, atom_b: str, n_r: int, n_l: int) -> int:
        try:
            return self._index[(atom_a, atom_b, n_r, n_l)]
        except KeyError:
            raise ValueError(
                f"|{atom_a},{atom_b},{n_r},{n_l}> outside basis with n_max={self.n_max}"
            ) from None

    def decode(self, i: int) -> BasisState:
        return self.states[i]

    def unit_vector(self, state: BasisState) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.encode(state)] = 1.0
        return v

    def initial_state(self) -> np.ndarray:
        """|g_a, g_0, 0, 0>, the protocol's starting state (S position 1)."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.subspace[0]] = 1.0
        return v

    def describe(self) -> dict:
        """JSON-friendly dump used by the CLI --dump-basis flag."""
        return {
            "n_max": self.n_max,
            "dim": self.dim,
            "levels": list(LEVELS),
            "ordering": "lexicographic on (atomA, atomB, nR, nL)",
            "states": [
                {"atomA": s.atom_a, "atomB": s.atom_b, "nR": s.n_r, "nL": s.n_l}
                for s in self.states
            ],
            "subspace": list(self.subspace),
        }


def build_basis(n_max: int = 1) -> BasisIndex:
    return BasisIndex(n_max)


def project_to_subspace(v: np.ndarray, idx: BasisIndex):
    """Split a full-space vector into its S amplitudes and the leakage.

    Returns the 8 amplitudes in canonical S order and the squared norm of
    everything outside S.
    """
    v = np.asarray(v)
    if v.shape != (idx.dim,):
        raise ValueError(
            f"state has shape {v.shape}, basis dimension is {idx.dim}"
        )
    sub = v[list(idx.subspace)]
    leakage = float(np.sum(np.abs(v) ** 2) - np.sum(np.abs(sub) ** 2))
    return sub, max(leakage, 0.0)
