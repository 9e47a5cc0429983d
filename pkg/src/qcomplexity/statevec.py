"""State vectors, Hermitian operators and qubit partitions.

Index convention
----------------
Qubit ``i`` contributes ``2**i`` to a basis index (little-endian), so the bit
string ``a_0 a_1 ... a_{n-1}`` is the basis index ``sum(a_i * 2**i)``.  Pauli
strings follow the same convention: character ``i`` acts on qubit ``i``.  As a
consequence the dense matrix of a Pauli string is the Kronecker product taken
from the last character to the first.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import GuardError, ValidationError

NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-10
PAULI_CHARS = "IXYZ"
MAX_PAULI_QUBITS = 10

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _num_qubits_for(length: int) -> int:
    if length < 2 or length & (length - 1):
        raise ValidationError(f"dimension {length} is not a power of two >= 2")
    return length.bit_length() - 1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AffineLabel:
    """Reporting-only physical label ``j -> offset + scale * j``."""

    offset: float = 0.0
    scale: float = 1.0

    def __call__(self, j):
        return self.offset + self.scale * np.asarray(j)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``2**num_qubits`` basis states."""

    num_qubits: int
    amplitudes: np.ndarray
    label: AffineLabel | None = field(default=None)

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        object.__setattr__(self, "amplitudes", amps)
        if self.num_qubits < 1:
            raise ValidationError("a state needs at least one qubit")
        if amps.size != 2**self.num_qubits:
            raise ValidationError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} "
                f"qubits, got {amps.size}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized: sum |amp|^2 = {norm!r}")

    @classmethod
    def from_vector(cls, vec: Sequence[complex], normalize: bool = False, label=None) -> PureState:
        vec = np.asarray(vec, dtype=complex).ravel()
        n = _num_qubits_for(vec.size)
        if normalize:
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ValidationError("cannot normalize the zero vector")
            vec = vec / norm
        return cls(n, vec, label)

    @classmethod
    def basis(cls, n: int, index: int) -> PureState:
        if not 0 <= index < 2**n:
            raise ValidationError(f"basis index {index} out of range for {n} qubits")
        vec = np.zeros(2**n, dtype=complex)
        vec[index] = 1.0
        return cls(n, vec)

    @classmethod
    def uniform(cls, n: int) -> PureState:
        return cls(n, np.full(2**n, 2 ** (-n / 2), dtype=complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def allclose(self, other: PureState, atol: float = 1e-10) -> bool:
        return self.dim == other.dim and np.allclose(self.amplitudes, other.amplitudes, atol=atol)

    def __repr__(self):
        return f"PureState(num_qubits={self.num_qubits})"


def pauli_matrix(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string, character ``i`` acting on qubit ``i``."""
    if not string or any(c not in PAULI_CHARS for c in string):
        raise ValidationError(f"invalid Pauli string {string!r}")
    mat = np.ones((1, 1), dtype=complex)
    for ch in string:
        mat = np.kron(_PAULI[ch], mat)
    return mat


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix on ``num_qubits`` qubits.

    ``pauli_terms`` is kept when the operator was built from a Pauli sum and
    is checked against the dense matrix on construction.
    """

    num_qubits: int
    matrix: np.ndarray
    pauli_terms: Mapping[str, float] | None = None

    def __post_init__(self):
        mat = _frozen(self.matrix)
        object.__setattr__(self, "matrix", mat)
        dim = 2**self.num_qubits
        if mat.shape != (dim, dim):
            raise ValidationError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        dev = float(np.max(np.abs(mat - mat.conj().T))) if dim else 0.0
        if dev > HERMITIAN_TOL:
            raise ValidationError(f"matrix is not Hermitian: max |H - H^dagger| = {dev!r}")
        if self.pauli_terms is not None:
            terms = {s: float(c) for s, c in self.pauli_terms.items()}
            object.__setattr__(self, "pauli_terms", terms)
            recon = _pauli_sum_matrix(self.num_qubits, terms)
            dev = float(np.max(np.abs(recon - mat)))
            if dev > HERMITIAN_TOL:
                raise ValidationError(f"Pauli terms disagree with dense matrix by {dev!r}")

    @classmethod
    def from_matrix(cls, matrix) -> HermitianOperator:
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError(f"operator matrix must be square, got shape {matrix.shape}")
        return cls(_num_qubits_for(matrix.shape[0]), matrix)

    @classmethod
    def from_pauli(cls, n: int, terms: Mapping[str, float]) -> HermitianOperator:
        for s in terms:
            if len(s) != n:
                raise ValidationError(f"Pauli string {s!r} has length {len(s)}, expected {n}")
        return cls(n, _pauli_sum_matrix(n, terms), dict(terms))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"HermitianOperator(num_qubits={self.num_qubits})"


def _pauli_sum_matrix(n: int, terms: Mapping[str, float]) -> np.ndarray:
    mat = np.zeros((2**n, 2**n), dtype=complex)
    for s, c in terms.items():
        if len(s) != n:
            raise ValidationError(f"Pauli string {s!r} has length {len(s)}, expected {n}")
        mat += c * pauli_matrix(s)
    return mat


@dataclass(frozen=True)
class QubitPartition:
    """Disjoint nonempty qubit blocks covering ``0..n-1``.

    Blocks are stored as sorted tuples, ordered by their smallest element.
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(set(b))) for b in self.blocks), key=lambda b: b[:1]))
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValidationError("partition blocks must be nonempty")
            if seen.intersection(b):
                raise ValidationError("partition blocks must be disjoint")
            seen.update(b)
        if seen != set(range(len(seen))):
            raise ValidationError(f"partition does not cover 0..{len(seen) - 1}: {sorted(seen)}")

    @property
    def num_qubits(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def max_block(self) -> int:
        return max(len(b) for b in self.blocks)

    def relabel(self, sigma: Sequence[int]) -> QubitPartition:
        return QubitPartition(tuple(tuple(sigma[q] for q in b) for b in self.blocks))

    def as_lists(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def tensor_product(left: PureState, right: PureState) -> PureState:
    """``left`` on the low qubits, ``right`` on the high qubits."""
    amps = np.kron(right.amplitudes, left.amplitudes)
    return PureState(left.num_qubits + right.num_qubits, amps / np.linalg.norm(amps))


def fidelity(a: PureState, b: PureState) -> float:
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def apply_operator(op: HermitianOperator, state: PureState) -> np.ndarray:
    """Unnormalized product ``H @ psi``."""
    if op.dim != state.dim:
        raise ValidationError(f"dimension mismatch: operator {op.dim} vs state {state.dim}")
    return op.matrix @ state.amplitudes


def pauli_coefficient_tensor(matrix: np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``Tr(P H) / 2**n`` for all Pauli strings at once.

    The result has shape ``(4,) * n`` where axis ``i`` indexes the Pauli
    letter (I, X, Y, Z) on qubit ``i``.
    """
    t = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * n))
    # reshaped axis a is row bit n-1-a, axis n+a is column bit n-1-a
    order = [ax for q in range(n) for ax in (n - 1 - q, 2 * n - 1 - q)]
    t = np.transpose(t, order).reshape((4,) * n)
    # to_pauli[p, 2r + c] = sigma_p[c, r] / 2
    to_pauli = np.stack([_PAULI[ch].T.ravel() for ch in PAULI_CHARS]) / 2.0
    for q in range(n):
        t = np.moveaxis(np.tensordot(to_pauli, t, axes=([1], [q])), 0, q)
    return t


def pauli_decompose(op: HermitianOperator, tol: float = HERMITIAN_TOL) -> dict[str, float]:
    """Real Pauli coefficients of ``op`` (all 4**n strings, zeros included)."""
    n = op.num_qubits
    if n > MAX_PAULI_QUBITS:
        raise GuardError(f"Pauli decomposition limited to {MAX_PAULI_QUBITS} qubits, got {n}")
    coeffs = pauli_coefficient_tensor(op.matrix, n)
    worst = float(np.max(np.abs(coeffs.imag)))
    if worst > tol:
        raise ValidationError(f"imaginary Pauli coefficient {worst!r}: operator is not Hermitian")
    out = {}
    for idx in itertools.product(range(4), repeat=n):
        out["".join(PAULI_CHARS[i] for i in idx)] = float(coeffs[idx].real)
    return out


def nonzero_terms(coeffs: Mapping[str, float], tol: float = HERMITIAN_TOL) -> dict[str, float]:
    return {s: c for s, c in coeffs.items() if abs(c) > tol}


def reconstruct(coeffs: Mapping[str, float], n: int | None = None) -> np.ndarray:
    if n is None:
        n = len(next(iter(coeffs)))
    return _pauli_sum_matrix(n, coeffs)


def basis_bits(index: int, n: int) -> list[int]:
    return [(index >> i) & 1 for i in range(n)]


def bipartition_matrix(amplitudes: np.ndarray, n: int, subset: Iterable[int]) -> np.ndarray:
    """Reshape amplitudes to ``2**|S| x 2**(n-|S|)``.

    Row index is built from the bits of ``subset`` (ascending, little-endian),
    column index from the remaining qubits in the same way.
    """
    subset = sorted(subset)
    rest = [q for q in range(n) if q not in subset]
    t = np.asarray(amplitudes).reshape((2,) * n)
    # axis a of the reshaped tensor carries qubit n-1-a
    order = [n - 1 - q for q in reversed(subset)] + [n - 1 - q for q in reversed(rest)]
    return np.transpose(t, order).reshape(2 ** len(subset), 2 ** len(rest))


def from_block_tensor(mat: np.ndarray, n: int, subset: Iterable[int]) -> np.ndarray:
    """Inverse of :func:`bipartition_matrix`: flatten back to global indices."""
    subset = sorted(subset)
    rest = [q for q in range(n) if q not in subset]
    t = np.asarray(mat).reshape((2,) * n)
    order = [n - 1 - q for q in reversed(subset)] + [n - 1 - q for q in reversed(rest)]
    return np.transpose(t, np.argsort(order)).reshape(2**n)
