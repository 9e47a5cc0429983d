"""Normal modes of translation-invariant harmonic chains.

The discrete Fourier transform of site coordinates diagonalizes any
circulant coupling matrix, so each mode evolves under its own one-body
Hamiltonian.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SYMMETRY_TOL = 1e-12
DECOUPLING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OscillatorChain:
    """Unit-mass oscillators with potential ``q^T K q / 2``."""

    coupling: np.ndarray

    def __post_init__(self):
        k = np.array(self.coupling, dtype=float)
        k.setflags(write=False)
        object.__setattr__(self, "coupling", k)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValidationError("coupling matrix must be square")
        if k.shape[0] < 2:
            raise ValidationError("a chain needs at least two sites")
        if np.max(np.abs(k - k.T)) > SYMMETRY_TOL:
            raise ValidationError("coupling matrix is not symmetric")

    @classmethod
    def from_first_row(cls, first_row) -> OscillatorChain:
        row = np.asarray(first_row, dtype=float)
        size = row.size
        return cls(np.array([np.roll(row, i) for i in range(size)]))

    @classmethod
    def ring(cls, size: int, spring: float = 1.0, onsite: float = 0.0) -> OscillatorChain:
        row = np.zeros(size)
        row[0] = 2 * spring + onsite
        row[1] -= spring
        row[-1] -= spring
        return cls.from_first_row(row)

    @property
    def num_sites(self) -> int:
        return self.coupling.shape[0]

    def is_circulant(self, tol: float = SYMMETRY_TOL) -> bool:
        k = self.coupling
        return all(np.max(np.abs(np.roll(k[0], i) - k[i])) <= tol for i in range(self.num_sites))


def _defaults(size: int, prefactor, alpha):
    pre = 1 / math.sqrt(size) if prefactor is None else prefactor
    al = 2 * math.pi / size if alpha is None else alpha
    if not is_unitary_transform(size, pre, al):
        warnings.warn("normal-mode transform with these constants is not unitary", stacklevel=3)
    return pre, al


def is_unitary_transform(size: int, prefactor: complex, alpha: float) -> bool:
    mat = prefactor * np.exp(-1j * alpha * np.outer(np.arange(size), np.arange(size)))
    return bool(np.allclose(mat @ mat.conj().T, np.eye(size), atol=1e-12))


def normal_mode_transform(q, prefactor=None, alpha=None) -> np.ndarray:
    """``Q_k = prefactor * sum_l exp(-i alpha l k) q_l``."""
    q = np.asarray(q, dtype=complex).ravel()
    if q.size < 2:
        raise ValidationError("need at least two sites")
    pre, al = _defaults(q.size, prefactor, alpha)
    l = np.arange(q.size)
    return pre * (np.exp(-1j * al * np.outer(l, l)) @ q)


def inverse_normal_mode_transform(modes) -> np.ndarray:
    """Inverse of the default (unitary) transform."""
    modes = np.asarray(modes, dtype=complex).ravel()
    if modes.size < 2:
        raise ValidationError("need at least two modes")
    size = modes.size
    l = np.arange(size)
    return np.exp(2j * math.pi * np.outer(l, l) / size) @ modes / math.sqrt(size)


@dataclass(frozen=True, eq=False)
class ModeReport:
    frequencies_squared: np.ndarray
    unstable: np.ndarray
    residual: float

    @property
    def decoupled(self) -> bool:
        return self.residual < DECOUPLING_TOL

    def to_dict(self) -> dict:
        return {
            "frequencies_squared": [float(w) for w in self.frequencies_squared],
            "unstable_modes": [int(k) for k in np.flatnonzero(self.unstable)],
            "offdiagonal_residual": self.residual,
            "decoupled": self.decoupled,
        }


def decouple(chain: OscillatorChain) -> ModeReport:
    """Rotate a circulant coupling matrix into the Fourier basis.

    Non-circulant couplings are rejected; use a symmetric eigensolver
    (``numpy.linalg.eigh``) for those.
    """
    if not chain.is_circulant():
        raise ValidationError("coupling matrix is not circulant; use a general symmetric eigensolver")
    size = chain.num_sites
    l = np.arange(size)
    f = np.exp(-2j * math.pi * np.outer(l, l) / size) / math.sqrt(size)
    rotated = f @ chain.coupling @ f.conj().T
    diag = np.diag(rotated).real.copy()
    off = rotated - np.diag(np.diag(rotated))
    return ModeReport(diag, diag < 0, float(np.max(np.abs(off))))
