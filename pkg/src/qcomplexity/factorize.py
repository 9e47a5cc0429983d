"""Naive complexity: finest tensor factorization of states and Hamiltonians."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import GuardError, ValidationError
from .statevec import (
    HERMITIAN_TOL,
    MAX_PAULI_QUBITS,
    PAULI_CHARS,
    HermitianOperator,
    PureState,
    QubitPartition,
    bipartition_matrix,
    pauli_coefficient_tensor,
    pauli_matrix,
)

EPS_FAC = 1e-8
MAX_FACTOR_QUBITS = 12


@dataclass(frozen=True, eq=False)
class FactorizationReport:
    """Finest product decomposition of a pure state.

    ``factors[i]`` lives on ``partition.blocks[i]``; local qubit ``k`` of a
    factor is the ``k``-th smallest qubit of its block.
    """

    partition: QubitPartition
    factors: tuple
    residual: float
    nu: int


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size:
        lead = vec[nz[0]]
        vec = vec * (abs(lead) / lead)
        vec[nz[0]] = abs(lead)
    return vec / np.linalg.norm(vec)


def _check_subset(n: int, subset: Iterable[int]) -> tuple[int, ...]:
    subset = tuple(sorted(set(subset)))
    if not subset or len(subset) >= n:
        raise ValidationError(f"subset must be a nonempty proper subset of 0..{n - 1}")
    if subset[0] < 0 or subset[-1] >= n:
        raise ValidationError(f"subset {subset} out of range for {n} qubits")
    return subset


def is_product_across(state: PureState, subset: Iterable[int], eps: float = EPS_FAC):
    """Rank-1 test across ``subset | complement``.

    Returns ``(factor_on_subset, factor_on_complement)`` or ``None``.
    """
    n = state.num_qubits
    subset = _check_subset(n, subset)
    mat = bipartition_matrix(state.amplitudes, n, subset)
    u, s, vh = np.linalg.svd(mat)
    total = float(np.sum(s**2))
    if total - s[0] ** 2 > eps * total:
        return None
    left = _fix_phase(u[:, 0])
    right = _fix_phase(vh[0])
    return (
        PureState(len(subset), left),
        PureState(n - len(subset), right),
    )


def assemble(partition: QubitPartition, factors) -> np.ndarray:
    """Tensor block factors back into a global amplitude vector."""
    n = partition.num_qubits
    out = np.ones(2**n, dtype=complex)
    idx = np.arange(2**n)
    for block, factor in zip(partition.blocks, factors):
        local = np.zeros(2**n, dtype=np.int64)
        for k, q in enumerate(block):
            local |= ((idx >> q) & 1) << k
        out *= factor.amplitudes[local]
    return out


def finest_factorization(state: PureState, eps: float = EPS_FAC) -> FactorizationReport:
    """Partition with the most blocks such that the state is their product.

    Candidate blocks are tried by increasing size, then in lexicographic
    order, each against the whole state; the first product cut is peeled and
    the search continues on the remaining qubits.  A remainder with no product
    cut up to half its size is itself a block.
    """
    n = state.num_qubits
    if n > MAX_FACTOR_QUBITS:
        raise GuardError(f"factorization limited to {MAX_FACTOR_QUBITS} qubits, got {n}")
    remaining = list(range(n))
    blocks = []
    while remaining:
        found = None
        for k in range(1, len(remaining) // 2 + 1):
            for subset in combinations(remaining, k):
                if is_product_across(state, subset, eps) is not None:
                    found = subset
                    break
            if found:
                break
        block = found if found else tuple(remaining)
        blocks.append(block)
        remaining = [q for q in remaining if q not in block]

    partition = QubitPartition(tuple(blocks))
    factors = []
    for block in partition.blocks:
        if len(block) == n:
            factors.append(PureState(n, _fix_phase(state.amplitudes.copy())))
            continue
        mat = bipartition_matrix(state.amplitudes, n, block)
        u, _, _ = np.linalg.svd(mat)
        factors.append(PureState(len(block), _fix_phase(u[:, 0])))
    recon = assemble(partition, factors)
    overlap = np.vdot(recon, state.amplitudes)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    residual = float(np.max(np.abs(recon * phase - state.amplitudes)))
    return FactorizationReport(partition, tuple(factors), residual, partition.max_block)


def naive_state_complexity(state: PureState, eps: float = EPS_FAC) -> int:
    if state.num_qubits > MAX_FACTOR_QUBITS:
        raise GuardError(f"factorization limited to {MAX_FACTOR_QUBITS} qubits, got {state.num_qubits}")
    return int(kernels.state_nu(state.amplitudes, state.num_qubits, eps))


def _check_pauli_guard(op: HermitianOperator):
    if op.num_qubits > MAX_PAULI_QUBITS:
        raise GuardError(f"Hamiltonian analysis limited to {MAX_PAULI_QUBITS} qubits, got {op.num_qubits}")


def _supported_terms(op: HermitianOperator, tol: float):
    coeffs = pauli_coefficient_tensor(op.matrix, op.num_qubits)
    worst = float(np.max(np.abs(coeffs.imag)))
    if worst > HERMITIAN_TOL:
        raise ValidationError(f"imaginary Pauli coefficient {worst!r}: operator is not Hermitian")
    letters = np.argwhere(np.abs(coeffs.real) > tol)
    return [(tuple(int(x) for x in idx), float(coeffs[tuple(idx)].real)) for idx in letters]


def interaction_partition(op: HermitianOperator, tol: float = HERMITIAN_TOL) -> QubitPartition:
    """Connected components of the qubit graph induced by Pauli supports."""
    _check_pauli_guard(op)
    n = op.num_qubits
    rows, cols = [], []
    for letters, _ in _supported_terms(op, tol):
        support = [q for q, p in enumerate(letters) if p]
        for q in support[1:]:
            rows.append(support[0])
            cols.append(q)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    blocks: dict[int, list[int]] = {}
    for q, lab in enumerate(labels):
        blocks.setdefault(int(lab), []).append(q)
    return QubitPartition(tuple(tuple(b) for b in blocks.values()))


def block_hamiltonians(op: HermitianOperator, partition: QubitPartition | None = None,
                       tol: float = HERMITIAN_TOL) -> list[dict[str, float]]:
    """Per-block Pauli sums ``H_i`` with local strings (block qubit order).

    The identity term goes to the first block.
    """
    if partition is None:
        partition = interaction_partition(op, tol)
    owner = {}
    for b, block in enumerate(partition.blocks):
        for q in block:
            owner[q] = b
    parts: list[dict[str, float]] = [{} for _ in partition.blocks]
    for letters, coeff in _supported_terms(op, tol):
        support = [q for q, p in enumerate(letters) if p]
        b = owner[support[0]] if support else 0
        if any(owner[q] != b for q in support):
            raise ValidationError("Pauli term crosses partition blocks")
        local = "".join(PAULI_CHARS[letters[q]] for q in partition.blocks[b])
        parts[b][local] = parts[b].get(local, 0.0) + coeff
    return parts


def embed_block(n: int, block: tuple[int, ...], string: str) -> str:
    chars = ["I"] * n
    for q, ch in zip(block, string):
        chars[q] = ch
    return "".join(chars)


def reassembly_residual(op: HermitianOperator, partition: QubitPartition | None = None,
                        tol: float = HERMITIAN_TOL) -> float:
    """Max entry of ``|sum_i H_i (x) I_i - H|``."""
    if partition is None:
        partition = interaction_partition(op, tol)
    n = op.num_qubits
    total = np.zeros_like(op.matrix)
    for block, terms in zip(partition.blocks, block_hamiltonians(op, partition, tol)):
        for s, c in terms.items():
            total = total + c * pauli_matrix(embed_block(n, block, s))
    return float(np.max(np.abs(total - op.matrix)))


def naive_ham_complexity(op: HermitianOperator, tol: float = HERMITIAN_TOL) -> int:
    return interaction_partition(op, tol).max_block
