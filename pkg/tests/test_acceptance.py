"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import contextlib
import json
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from qcomplexity.budget import (
    TruncationPolicy,
    exact_propagate,
    hopping_hamiltonian,
    reconstruct_probabilities,
    sample_measurements,
    truncated_evolve,
)
from qcomplexity.canonical import (
    BasisPermutation,
    SearchLimits,
    conjugate_hamiltonian,
    evolution_complexity_bound_check,
    true_ham_complexity,
    true_state_complexity,
)
from qcomplexity.cli import fixture_path, main
from qcomplexity.discrete import momentum_eigenvalues, momentum_operator, qft, qft_matrix
from qcomplexity.factorize import (
    assemble,
    embed_block,
    finest_factorization,
    interaction_partition,
    naive_state_complexity,
    reassembly_residual,
)
from qcomplexity.formats import read_chain, read_operator, read_state
from qcomplexity.grover import GsaParams, gsa_state, q_probe, two_value_certificate
from qcomplexity.oscillators import decouple
from qcomplexity.statevec import HermitianOperator, PureState, QubitPartition, fidelity, pauli_matrix


@contextlib.contextmanager
def criterion(number, title, limit):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"runtime {elapsed:.2f}s exceeds {limit}s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        line = f"criterion {number} {status}: {title} ({elapsed:.2f}s, limit {limit}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)


def random_partition(rng, n):
    order = rng.permutation(n)
    blocks, i = [], 0
    while i < n:
        size = int(rng.integers(1, n - i + 1))
        blocks.append(sorted(int(q) for q in order[i:i + size]))
        i += size
    return QubitPartition(blocks)


def test_criterion_1_cnot_worked_example(capsys):
    with criterion(1, "CNOT worked example", 1.0):
        code = main(["reduce", str(fixture_path("cnot_example_ham")), "--family", "cnot-circuit", "--depth", "2"])
        out = capsys.readouterr().out
        assert code == 0
        r = json.loads(out)["result"]
        assert r["best_c"] == 1
        witness = BasisPermutation.from_json(r["witness"])
        # the witness is a single CNOT gate
        assert len(r["witness"]["params"]) == 1 and r["witness"]["params"][0][0] == "CNOT"
        op = read_operator(fixture_path("cnot_example_ham"))
        target = pauli_matrix("XI") + pauli_matrix("IX")
        assert np.max(np.abs(conjugate_hamiltonian(op, witness).matrix - target)) < 1e-10


def test_criterion_2_gsa_complexity_meter():
    with criterion(2, "GSA complexity meter", 30.0):
        for n in (2, 3):
            s = gsa_state(GsaParams(n, 0.7, 2**n - 1))
            rep = true_state_complexity(s, "sn")
            assert rep.best_c == n and rep.certificate == "exhaustive-exact"
            assert rep.candidates_examined == math.factorial(2**n)
            assert two_value_certificate(s) == n
            basis = gsa_state(GsaParams(n, math.pi / 2, 1))
            assert np.allclose(np.abs(basis.amplitudes), np.eye(2**n)[1])
            assert naive_state_complexity(basis) == 1
            uniform = gsa_state(GsaParams(n, math.atan(1 / math.sqrt(2**n - 1)), 1))
            assert np.allclose(uniform.amplitudes, 2 ** (-n / 2))
            assert naive_state_complexity(uniform) == 1
        fixture = read_state(fixture_path("gsa_n3"))
        assert true_state_complexity(fixture, "sn").best_c == 3


def test_criterion_3_bell_disentangling():
    with criterion(3, "Bell disentangling", 1.0):
        bell = read_state(fixture_path("bell"))
        rep = true_state_complexity(bell, "affine")
        assert rep.best_c == 1 and rep.witness.affine_form() is not None
        exact = true_state_complexity(bell, "sn")
        assert exact.best_c == 1 and exact.certificate == "exhaustive-exact"


def test_criterion_4_evolution_bound():
    with criterion(4, "evolution complexity bound", 5.0):
        op = read_operator(fixture_path("cnot_example_ham"))
        rep = true_ham_complexity(op, "cnot-circuit", SearchLimits(depth=2))
        times = np.linspace(2 * np.pi / 20, 2 * np.pi, 20)
        check = evolution_complexity_bound_check(op, rep.witness, times)
        assert len(check.per_time) == 20
        assert check.max_complexity <= 1 and check.passed


def test_criterion_5_discrete_operators():
    with criterion(5, "discrete operators", 30.0):
        for n in range(1, 9):
            q = qft_matrix(n)
            assert np.max(np.abs(q @ q.conj().T - np.eye(2**n))) < 1e-10
        for n in range(1, 7):
            dim = 2**n
            p = momentum_operator(n).matrix
            assert np.max(np.abs(p - p.conj().T)) < 1e-10
            closed = math.sqrt(dim) * (np.arange(dim) / dim - 0.5)
            assert np.max(np.abs(np.sort(np.linalg.eigvalsh(p)) - closed)) < 1e-8
            qinv = qft_matrix(n, "inverse")
            for a, lam in enumerate(momentum_eigenvalues(n)):
                assert np.max(np.abs(p @ qinv[:, a] - lam * qinv[:, a])) < 1e-8
            for r in (d for d in range(1, dim + 1) if dim % d == 0):
                for offset in range(r):
                    v = np.zeros(dim)
                    v[offset::r] = 1
                    out = qft(PureState.from_vector(v, normalize=True)).amplitudes
                    assert np.all(np.flatnonzero(np.abs(out) > 1e-10) % (dim // r) == 0)


def test_criterion_6_factorization_oracle():
    with criterion(6, "factorization oracle equivalence", 60.0):
        rng = np.random.default_rng(6)
        for _ in range(500):
            n = int(rng.integers(1, 7))
            part = random_partition(rng, n)
            factors = []
            for block in part.blocks:
                v = rng.normal(size=2 ** len(block)) + 1j * rng.normal(size=2 ** len(block))
                factors.append(PureState.from_vector(v, normalize=True))
            s = PureState(n, assemble(part, factors))
            assert finest_factorization(s).partition == part
        for _ in range(200):
            n = int(rng.integers(1, 7))
            part = random_partition(rng, n)
            terms = {}
            for block in part.blocks:
                # a connected chain inside each block plus random local terms
                for a, b in zip(block, block[1:]):
                    chars = ["I"] * n
                    chars[a], chars[b] = "X", "Y"
                    terms["".join(chars)] = 1.0 + float(rng.random())
                chars = ["I"] * n
                chars[block[0]] = "Z"
                terms["".join(chars)] = float(rng.normal()) + 2.0
                for _ in range(3):
                    local = "".join(rng.choice(list("IXYZ"), size=len(block)))
                    s_ = embed_block(n, block, local)
                    terms[s_] = terms.get(s_, 0.0) + float(rng.normal())
            op = HermitianOperator.from_pauli(n, terms)
            got = interaction_partition(op)
            assert got == part
            assert reassembly_residual(op, got) < 1e-9


def test_criterion_7_oscillator_decoupling():
    with criterion(7, "oscillator decoupling", 1.0):
        chain = read_chain(fixture_path("ring8"))
        rep = decouple(chain)
        k = np.arange(8)
        assert rep.residual < 1e-10
        assert np.max(np.abs(rep.frequencies_squared - (2 - 2 * np.cos(2 * np.pi * k / 8)))) < 1e-10


def test_criterion_8_budget_engine():
    with criterion(8, "budget engine", 120.0):
        s = gsa_state(GsaParams(3, 0.7, 0))
        p = s.probabilities()
        wins = 0
        for seed in range(100):
            lo = reconstruct_probabilities(sample_measurements(s, 10**2, [seed, 0]), 8)
            hi = reconstruct_probabilities(sample_measurements(s, 10**4, [seed, 1]), 8)
            wins += np.max(np.abs(hi.probabilities - p)) < np.max(np.abs(lo.probabilities - p))
        assert wins >= 95

        h = hopping_hamiltonian(6)
        start = PureState.basis(6, 0)
        full = truncated_evolve(h, start, 0.01, 100, TruncationPolicy(0.0, 0.0, 64))
        assert fidelity(full.states[-1], exact_propagate(h, start, 1.0)) >= 1 - 1e-6

        # paired comparison: each seed picks one start, both policies share it
        for seed in range(10):
            j = int(np.random.default_rng(seed).integers(64))
            s0 = PureState.basis(6, j)
            exact = exact_propagate(h, s0, 1.0)
            grow = truncated_evolve(h, s0, 0.01, 100, TruncationPolicy(1e-6, 1e-8, 16))
            amp = truncated_evolve(h, s0, 0.01, 100, TruncationPolicy(1e-6, None, 16))
            assert fidelity(grow.states[-1], exact) >= fidelity(amp.states[-1], exact)


def test_criterion_9_q_probe(capsys):
    with criterion(9, "q_probe determinism and monotonicity", 120.0):
        outs = []
        for workers in ("1", "1", "4"):
            assert main(["q-probe", "--Q", "40", "--seed", "7", "--trials", "200", "--workers", workers]) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1] == outs[2]
        values = [q_probe(q, trials=200, seed=7).max_workable_n for q in (1, 5, 10, 20, 40, 80)]
        assert values == sorted(values)
