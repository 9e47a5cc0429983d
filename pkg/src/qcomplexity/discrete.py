"""Finite grids, the discrete Fourier pair and position/momentum operators.

Fourier sign convention: the forward transform sends ``|c>`` to
``N**-0.5 * sum_a exp(-2 pi i a c / N) |a>``, the conjugate of the usual
quantum-computing QFT.  Applied to a vector this is ``numpy.fft.fft`` with
orthonormal scaling.

The momentum operator is ``QFT^-1 sqrt(N) (F - I/2) QFT`` with the fraction
operator ``F = diag(a / N)``; its spectrum is ``sqrt(N) (c/N - 1/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardError, ValidationError
from .statevec import HermitianOperator, PureState

MAX_OPERATOR_QUBITS = 10
MAX_RESIDUAL_QUBITS = 8


@dataclass(frozen=True)
class Grid:
    x0: float
    dx: float
    num_points: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValidationError("grid spacing must be positive")
        if self.num_points < 2 or self.num_points & (self.num_points - 1):
            raise ValidationError(f"number of grid points {self.num_points} is not a power of two")

    @classmethod
    def default(cls, n: int) -> Grid:
        """``N = 2**n`` cells covering ``[0, sqrt(N)]``."""
        dim = 2**n
        return cls(0.0, 1.0 / math.sqrt(dim), dim)

    @property
    def num_qubits(self) -> int:
        return self.num_points.bit_length() - 1

    def points(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.num_points)


def discretize_wavefunction(samples, grid: Grid) -> tuple[PureState, float]:
    """Cell amplitudes ``psi(x_j) sqrt(dx)``, normalized.

    Also returns the raw norm ``sum |psi(x_j)|^2 dx`` as a discretization
    diagnostic.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size != grid.num_points:
        raise ValidationError(f"expected {grid.num_points} samples, got {samples.size}")
    amps = samples * math.sqrt(grid.dx)
    raw = float(np.vdot(amps, amps).real)
    if raw == 0:
        raise ValidationError("all samples are zero; cannot normalize")
    return PureState(grid.num_qubits, amps / math.sqrt(raw)), raw


def qft_matrix(n: int, direction: str = "forward") -> np.ndarray:
    if n > MAX_OPERATOR_QUBITS:
        raise GuardError(f"dense Fourier matrix limited to {MAX_OPERATOR_QUBITS} qubits")
    dim = 2**n
    a = np.arange(dim)
    sign = _sign(direction)
    return np.exp(sign * 2j * np.pi * np.outer(a, a) / dim) / math.sqrt(dim)


def _sign(direction: str) -> int:
    if direction == "forward":
        return -1
    if direction == "inverse":
        return 1
    raise ValidationError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def qft(state: PureState, direction: str = "forward", method: str = "fft") -> PureState:
    """Apply the Fourier pair.  ``method='dense'`` multiplies by the explicit matrix."""
    sign = _sign(direction)
    if method == "dense":
        out = qft_matrix(state.num_qubits, direction) @ state.amplitudes
    elif method == "fft":
        amps = state.amplitudes
        out = np.fft.fft(amps, norm="ortho") if sign < 0 else np.fft.ifft(amps, norm="ortho")
    else:
        raise ValidationError(f"unknown method {method!r}")
    return PureState(state.num_qubits, out)


def _guard(n: int, limit: int = MAX_OPERATOR_QUBITS):
    if n < 1:
        raise ValidationError("need at least one qubit")
    if n > limit:
        raise GuardError(f"operator construction limited to {limit} qubits, got {n}")


def position_operator(n: int) -> HermitianOperator:
    """``diag(a / sqrt(N))``: coordinates on ``[0, sqrt(N))``."""
    _guard(n)
    dim = 2**n
    return HermitianOperator(n, np.diag(np.arange(dim) / math.sqrt(dim)).astype(complex))


def fraction_operator(n: int) -> HermitianOperator:
    """``diag(a / N)``."""
    _guard(n)
    dim = 2**n
    return HermitianOperator(n, np.diag(np.arange(dim) / dim).astype(complex))


def momentum_eigenvalues(n: int) -> np.ndarray:
    dim = 2**n
    return math.sqrt(dim) * (np.arange(dim) / dim - 0.5)


def momentum_operator(n: int) -> HermitianOperator:
    _guard(n)
    q = qft_matrix(n, "forward")
    qinv = qft_matrix(n, "inverse")
    mat = qinv @ np.diag(momentum_eigenvalues(n)) @ q
    return HermitianOperator(n, mat)


def phase_diagonal(n: int) -> np.ndarray:
    """``diag((-1)**a)`` as a dense matrix."""
    _guard(n)
    return np.diag((-1.0) ** np.arange(2**n)).astype(complex)


def momentum_alternate_form(n: int) -> np.ndarray:
    """``A^-1 QFT^-1 sqrt(N) F QFT A`` with ``A = phase_diagonal(n)``."""
    _guard(n)
    dim = 2**n
    a = phase_diagonal(n)
    core = qft_matrix(n, "inverse") @ np.diag(math.sqrt(dim) * np.arange(dim) / dim) @ qft_matrix(n, "forward")
    return np.linalg.inv(a) @ core @ a


def momentum_alternate_form_residual(n: int) -> float:
    """Max entry of ``|p - p_alt|`` between the two momentum expressions."""
    _guard(n, MAX_RESIDUAL_QUBITS)
    return float(np.max(np.abs(momentum_operator(n).matrix - momentum_alternate_form(n))))


def canonical_commutator(state: PureState, momentum: np.ndarray | None = None) -> complex:
    """``<psi| [X, P] |psi>`` with the coordinate operator and a momentum matrix."""
    n = state.num_qubits
    x = position_operator(n).matrix
    p = momentum_operator(n).matrix if momentum is None else np.asarray(momentum)
    comm = x @ p - p @ x
    return complex(np.vdot(state.amplitudes, comm @ state.amplitudes))
