"""Compare the compiled and numpy complexity kernels on permutation searches.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from qcomplexity import _kernels_py
from qcomplexity.canonical import FamilyEnumerator
from qcomplexity.factorize import EPS_FAC
from qcomplexity.grover import GsaParams, gsa_state
from qcomplexity.statevec import HERMITIAN_TOL

try:
    from qcomplexity import _kernels as ext
except ImportError:
    ext = None


def workloads():
    state = gsa_state(GsaParams(3, 0.7, 5)).amplitudes
    sn = FamilyEnumerator(3, "sn")
    yield "state nu, S_8 (40320 tables)", "batch_state_nu", state, sn.tables(0, len(sn)), 3, EPS_FAC

    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    local = (a + a.conj().T) / 2
    ham = np.kron(np.eye(4), local) + np.kron(local, np.eye(4))
    aff = FamilyEnumerator(4, "affine")
    yield "hamiltonian nu, affine n=4 (first 20000)", "batch_ham_nu", ham, aff.tables(0, 20000), 4, HERMITIAN_TOL

    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    v /= np.linalg.norm(v)
    rel = FamilyEnumerator(6, "relabel")
    yield "state nu, relabel n=6 (720 tables)", "batch_state_nu", v, rel.tables(0, len(rel)), 6, EPS_FAC


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if ext is None:
        print("compiled extension not built; only the numpy backend is timed")
    print(f"{'workload':<46}{'numpy [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, func, payload, tables, n, tol in workloads():
        t_py, r_py = best_of(lambda: getattr(_kernels_py, func)(payload, tables, n, tol), 1)
        if ext is None:
            print(f"{name:<46}{t_py:>12.3f}{'-':>14}{'-':>10}")
            continue
        t_ext, r_ext = best_of(lambda: getattr(ext, func)(payload, tables, n, tol), args.repeat)
        assert np.array_equal(r_py, r_ext), f"backends disagree on {name}"
        print(f"{name:<46}{t_py:>12.3f}{t_ext:>14.4f}{t_py / t_ext:>9.0f}x")


if __name__ == "__main__":
    main()
