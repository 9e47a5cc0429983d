import os
import subprocess
import sys

import numpy as np
import pytest

from qcomplexity import _kernels_py, kernels
from qcomplexity.canonical import FamilyEnumerator
from qcomplexity.factorize import EPS_FAC, finest_factorization
from qcomplexity.statevec import HERMITIAN_TOL, HermitianOperator, PureState, QubitPartition

try:
    from qcomplexity import _kernels as ext
except ImportError:
    ext = None

needs_ext = pytest.mark.skipif(ext is None, reason="compiled extension not built")


def planted(rng, n):
    order = rng.permutation(n)
    blocks, i = [], 0
    while i < n:
        size = int(rng.integers(1, n - i + 1))
        blocks.append(sorted(int(q) for q in order[i:i + size]))
        i += size
    p = QubitPartition(blocks)
    amps = np.ones(2**n, dtype=complex)
    idx = np.arange(2**n)
    for block in p.blocks:
        v = rng.normal(size=2 ** len(block)) + 1j * rng.normal(size=2 ** len(block))
        v /= np.linalg.norm(v)
        local = np.zeros(2**n, dtype=np.int64)
        for k, q in enumerate(block):
            local |= ((idx >> q) & 1) << k
        amps *= v[local]
    return amps, p


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    forced = bool(os.environ.get("QCOMPLEXITY_PURE_PYTHON"))
    if ext is not None:
        assert kernels.BACKEND == ("python" if forced else "cython")


def test_pure_python_env_override():
    code = "from qcomplexity import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"QCOMPLEXITY_PURE_PYTHON": "1", "PATH": ""}, check=True)
    assert out.stdout.strip() == "python"


def test_python_blocks_match_factorization():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        amps, p = planted(rng, n)
        masks = _kernels_py.state_blocks(amps, n, EPS_FAC)
        got = QubitPartition([[q for q in range(n) if m >> q & 1] for m in masks])
        assert got == p == finest_factorization(PureState(n, amps)).partition


@needs_ext
def test_state_kernels_agree():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n = int(rng.integers(1, 8))
        amps, _ = planted(rng, n)
        assert ext.state_blocks(amps, n, EPS_FAC) == _kernels_py.state_blocks(amps, n, EPS_FAC)


@needs_ext
def test_state_kernels_agree_on_entangled_and_sparse():
    rng = np.random.default_rng(2)
    cases = [np.array([1, 0, 0, 1]) / np.sqrt(2), np.eye(8)[3], np.ones(16) / 4]
    for _ in range(50):
        v = rng.normal(size=16) * (rng.random(16) < 0.3)
        if np.any(v):
            cases.append(v / np.linalg.norm(v))
    for amps in cases:
        n = int(np.log2(amps.size))
        assert ext.state_nu(amps, n, EPS_FAC) == _kernels_py.state_nu(amps, n, EPS_FAC)


@needs_ext
@pytest.mark.parametrize("family", ["sn", "affine"])
def test_batch_state_agree(family):
    rng = np.random.default_rng(3)
    n = 2 if family == "sn" else 3
    enum = FamilyEnumerator(n, family)
    tables = enum.tables(0, len(enum))
    for _ in range(5):
        v = rng.normal(size=2**n) * (rng.random(2**n) < 0.6) + 0j
        v[0] += 1
        v /= np.linalg.norm(v)
        a = ext.batch_state_nu(v, tables, n, EPS_FAC)
        b = _kernels_py.batch_state_nu(v, tables, n, EPS_FAC)
        assert np.array_equal(a, b)


@needs_ext
def test_ham_kernels_agree():
    rng = np.random.default_rng(4)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        h = np.zeros((2**n, 2**n), dtype=complex)
        for _ in range(int(rng.integers(1, 4))):
            i, j = rng.integers(2**n, size=2)
            c = rng.normal() + 1j * rng.normal() * (i != j)
            h[i, j] += c
            h[j, i] += np.conj(c)
        op = HermitianOperator(n, h)
        tables = np.array([rng.permutation(2**n) for _ in range(200)])
        a = ext.batch_ham_nu(op.matrix, tables, n, HERMITIAN_TOL)
        b = _kernels_py.batch_ham_nu(op.matrix, tables, n, HERMITIAN_TOL)
        assert np.array_equal(a, b)
        assert ext.ham_nu(op.matrix, n, HERMITIAN_TOL) == _kernels_py.ham_nu(op.matrix, n, HERMITIAN_TOL)


@needs_ext
def test_ext_accepts_read_only_input():
    amps = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    amps.setflags(write=False)
    assert ext.state_nu(amps, 2, EPS_FAC) == 2
    with pytest.raises(ValueError):
        ext.state_blocks(amps, 3, EPS_FAC)
