import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcomplexity.errors import GuardError, ValidationError
from qcomplexity.factorize import (
    assemble,
    block_hamiltonians,
    embed_block,
    finest_factorization,
    interaction_partition,
    is_product_across,
    naive_ham_complexity,
    naive_state_complexity,
    reassembly_residual,
)
from qcomplexity.grover import GsaParams, gsa_state
from qcomplexity.statevec import HermitianOperator, PureState, QubitPartition, pauli_matrix, tensor_product

S = 1 / math.sqrt(2)
BELL = PureState(2, [S, 0, 0, S])
GHZ3 = PureState(3, [S, 0, 0, 0, 0, 0, 0, S])


def random_partition(rng, n):
    order = rng.permutation(n)
    blocks, i = [], 0
    while i < n:
        size = int(rng.integers(1, n - i + 1))
        blocks.append(sorted(int(q) for q in order[i:i + size]))
        i += size
    return QubitPartition(blocks)


def planted_state(rng, partition):
    factors = []
    for block in partition.blocks:
        v = rng.normal(size=2 ** len(block)) + 1j * rng.normal(size=2 ** len(block))
        factors.append(PureState.from_vector(v, normalize=True))
    return PureState(partition.num_qubits, assemble(partition, factors))


def brute_rank_one(state, subset):
    # rank test written with explicit loops over indices
    n = state.num_qubits
    rest = [q for q in range(n) if q not in subset]
    mat = np.zeros((2 ** len(subset), 2 ** len(rest)), dtype=complex)
    for j in range(2**n):
        r = sum(((j >> q) & 1) << k for k, q in enumerate(subset))
        c = sum(((j >> q) & 1) << k for k, q in enumerate(rest))
        mat[r, c] = state.amplitudes[j]
    return np.linalg.matrix_rank(mat, tol=1e-8) == 1


def test_is_product_across_examples():
    zz = PureState.basis(2, 0)
    a, b = is_product_across(zz, [0])
    assert np.allclose(a.amplitudes, [1, 0]) and np.allclose(b.amplitudes, [1, 0])
    assert is_product_across(BELL, [0]) is None
    s = tensor_product(PureState(1, [S, S]), BELL)
    assert is_product_across(s, [0]) is not None
    assert is_product_across(s, [1]) is None
    assert brute_rank_one(s, [0]) and not brute_rank_one(s, [1])


def test_is_product_across_reproduces_state():
    rng = np.random.default_rng(4)
    p = QubitPartition([[0, 2], [1]])
    s = planted_state(rng, p)
    left, right = is_product_across(s, [0, 2])
    recon = assemble(p, [left, right])
    overlap = abs(np.vdot(recon, s.amplitudes))
    assert overlap == pytest.approx(1, abs=1e-12)


def test_is_product_across_rejects_bad_subsets():
    with pytest.raises(ValidationError):
        is_product_across(BELL, [])
    with pytest.raises(ValidationError):
        is_product_across(BELL, [0, 1])


def test_finest_factorization_examples():
    rep = finest_factorization(PureState.basis(3, 0b010))
    assert rep.partition.as_lists() == [[0], [1], [2]] and rep.nu == 1
    rep = finest_factorization(GHZ3)
    assert rep.partition.as_lists() == [[0, 1, 2]] and rep.nu == 3
    for subset in ([0], [1], [2]):
        assert not brute_rank_one(GHZ3, subset)
    s = gsa_state(GsaParams(2, 0.7, 3))
    assert finest_factorization(s).nu == 2
    assert not brute_rank_one(s, [0]) and not brute_rank_one(s, [1])


def test_single_qubit():
    rep = finest_factorization(PureState(1, [S, S]))
    assert rep.partition.as_lists() == [[0]] and rep.nu == 1


def test_naive_state_complexity_examples():
    for n in (1, 3, 6):
        assert naive_state_complexity(PureState.uniform(n)) == 1
    assert naive_state_complexity(tensor_product(BELL, PureState.basis(1, 0))) == 2
    assert naive_state_complexity(gsa_state(GsaParams(3, 0.7, 0))) == 3


def test_factor_phase_convention():
    s = PureState(2, np.exp(0.3j) * np.array([S, 0, 0, S]))
    rep = finest_factorization(s)
    f = rep.factors[0].amplitudes
    assert f[0].imag == 0 and f[0].real > 0


def test_guard():
    class Big:
        num_qubits = 13

    with pytest.raises(GuardError):
        finest_factorization(Big())


def test_planted_product_states_recovered():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        n = int(rng.integers(1, 7))
        p = random_partition(rng, n)
        s = planted_state(rng, p)
        rep = finest_factorization(s)
        assert rep.partition == p
        assert rep.residual < 1e-8
        assert naive_state_complexity(s) == p.max_block


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_relabeling_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    p = random_partition(rng, n)
    s = planted_state(rng, p)
    sigma = [int(v) for v in rng.permutation(n)]
    idx = np.arange(2**n)
    image = np.zeros_like(idx)
    for q in range(n):
        image |= ((idx >> q) & 1) << sigma[q]
    moved = np.zeros(2**n, dtype=complex)
    moved[image] = s.amplitudes
    moved_state = PureState(n, moved)
    assert naive_state_complexity(moved_state) == naive_state_complexity(s)
    assert finest_factorization(moved_state).partition == p.relabel(sigma)


def test_soundness_on_entangled_states():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        rep = finest_factorization(PureState.from_vector(v, normalize=True))
        assert rep.residual < 1e-8


def test_interaction_partition_examples():
    h = HermitianOperator.from_pauli(2, {"XI": 1.0, "IX": 1.0})
    assert interaction_partition(h).as_lists() == [[0], [1]]
    assert naive_ham_complexity(h) == 1
    m = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]], dtype=complex)
    h = HermitianOperator(2, m)
    assert interaction_partition(h).as_lists() == [[0, 1]]
    assert naive_ham_complexity(h) == 2
    heis = HermitianOperator.from_pauli(2, {"XX": 1.0, "YY": 1.0, "ZZ": 1.0})
    assert interaction_partition(heis).as_lists() == [[0, 1]]
    assert naive_ham_complexity(HermitianOperator(2, np.eye(4))) == 1


def test_block_hamiltonians_identity_to_first_block():
    h = HermitianOperator.from_pauli(3, {"III": 2.0, "ZIZ": 1.0, "IXI": 0.5})
    p = interaction_partition(h)
    assert p.as_lists() == [[0, 2], [1]]
    parts = block_hamiltonians(h, p)
    assert parts[0] == pytest.approx({"II": 2.0, "ZZ": 1.0})
    assert parts[1] == pytest.approx({"X": 0.5})
    assert reassembly_residual(h, p) < 1e-12


def test_block_hamiltonians_rejects_crossing_terms():
    h = HermitianOperator.from_pauli(2, {"XX": 1.0})
    with pytest.raises(ValidationError):
        block_hamiltonians(h, QubitPartition([[0], [1]]))


def planted_hamiltonian(rng, partition):
    n = partition.num_qubits
    terms = {}
    for block in partition.blocks:
        for _ in range(4):
            local = "".join(rng.choice(list("IXYZ"), size=len(block)))
            if set(local) == {"I"} and len(block) > 1:
                continue
            s = embed_block(n, block, local)
            terms[s] = terms.get(s, 0.0) + float(rng.normal())
        # guarantee the block is connected: a chain of ZZ couplings
        for a, b in zip(block, block[1:]):
            chars = ["I"] * n
            chars[a] = chars[b] = "Z"
            terms["".join(chars)] = terms.get("".join(chars), 0.0) + 1.0 + float(rng.random())
        if len(block) == 1:
            chars = ["I"] * n
            chars[block[0]] = "X"
            terms["".join(chars)] = terms.get("".join(chars), 0.0) + 1.0
    return HermitianOperator.from_pauli(n, terms)


def naive_reassembly(op, partition):
    # independent check: sum of embedded block terms, rebuilt from scratch
    n = op.num_qubits
    total = np.zeros((2**n, 2**n), dtype=complex)
    for block, terms in zip(partition.blocks, block_hamiltonians(op, partition)):
        for s, c in terms.items():
            total += c * pauli_matrix(embed_block(n, block, s))
    return np.max(np.abs(total - op.matrix))


def test_planted_block_hamiltonians_recovered():
    rng = np.random.default_rng(77)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        p = random_partition(rng, n)
        h = planted_hamiltonian(rng, p)
        got = interaction_partition(h)
        assert got == p
        assert reassembly_residual(h, got) < 1e-9
        assert naive_reassembly(h, got) < 1e-9


def test_brute_force_graph_components():
    # the partition is the finest one admitting a block decomposition
    h = HermitianOperator.from_pauli(4, {"XIXI": 1.0, "IZIZ": 0.3, "YIII": 0.1})
    p = interaction_partition(h)
    assert p.as_lists() == [[0, 2], [1, 3]]
    for k in (1,):
        for subset in itertools.combinations(range(4), k):
            rest = [q for q in range(4) if q not in subset]
            with pytest.raises(ValidationError):
                block_hamiltonians(h, QubitPartition([list(subset), rest]))
