"""Grover-search states, the two-amplitude complexity certificate and the Q probe."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .budget import accuracy_for, sample_measurements
from .errors import GuardError, ValidationError
from .statevec import PureState

MAX_GROVER_QUBITS = 12
CERT_RTOL = 1e-9


@dataclass(frozen=True)
class GsaParams:
    n: int
    t: float
    j0: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("need at least one qubit")
        if not 0 <= self.j0 < 2**self.n:
            raise ValidationError(f"marked index {self.j0} out of range for {self.n} qubits")


def gsa_state(p: GsaParams) -> PureState:
    """``sin t`` on the marked index, ``cos t / sqrt(N-1)`` everywhere else."""
    dim = 2**p.n
    amps = np.full(dim, math.cos(p.t) / math.sqrt(dim - 1), dtype=complex)
    amps[p.j0] = math.sin(p.t)
    return PureState(p.n, amps)


def grover_angle(n: int) -> float:
    return math.asin(1.0 / math.sqrt(2**n))


def grover_iterate(n: int, j0: int, k: int) -> PureState:
    """``k`` rounds of (mark ``j0``, invert about the mean) from the uniform state."""
    if n > MAX_GROVER_QUBITS:
        raise GuardError(f"Grover simulation limited to {MAX_GROVER_QUBITS} qubits, got {n}")
    if k < 0:
        raise ValidationError("iteration count must be nonnegative")
    GsaParams(n, 0.0, j0)
    amps = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    for _ in range(k):
        amps[j0] = -amps[j0]
        amps = 2 * amps.mean() - amps
    return PureState(n, amps / np.linalg.norm(amps))


def optimal_iterations(n: int) -> int:
    """``round(pi / (4 theta) - 1/2)``, rounding halves up."""
    target = math.pi / (4 * grover_angle(n)) - 0.5
    return max(0, int(math.floor(target + 0.5)))


def _clusters(values: np.ndarray, rtol: float) -> list[tuple[complex, int]]:
    reps: list[list] = []
    for v in values:
        for rep in reps:
            if abs(v - rep[0]) <= rtol * max(abs(v), abs(rep[0])):
                rep[1] += 1
                break
        else:
            reps.append([v, 1])
            if len(reps) > 2:
                break
    return [(r[0], r[1]) for r in reps]


def two_value_certificate(state: PureState, rtol: float = CERT_RTOL) -> int | None:
    """Exact complexity ``n`` for states with the (N-1, 1) two-amplitude pattern.

    The pattern survives every basis permutation, and no product of two
    factors of dimension >= 2 can produce it, so the state is irreducible
    under any permutation.  Returns ``None`` when the pattern is absent.
    """
    n = state.num_qubits
    if n < 2:
        return None
    amps = state.amplitudes
    scale = float(np.max(np.abs(amps)))
    clusters = _clusters(amps, rtol)
    if len(clusters) != 2:
        return None
    if any(abs(v) <= rtol * scale for v, _ in clusters):
        return None
    if sorted(c for _, c in clusters) != [1, state.dim - 1]:
        return None
    return n


@dataclass(frozen=True)
class QProbeReport:
    Q: int
    per_n: tuple
    max_workable_n: int
    seed: int
    success_threshold: float
    trials: int

    def to_dict(self) -> dict:
        return {
            "Q": self.Q,
            "per_n": [dict(row) for row in self.per_n],
            "max_workable_n": self.max_workable_n,
            "seed": self.seed,
            "success_threshold": self.success_threshold,
            "trials": self.trials,
        }


def _probe_n(args) -> dict:
    Q, n, trials, seed = args
    copies = accuracy_for(Q, n)
    k = optimal_iterations(n)
    if copies == 0:
        return {"n": n, "A": 0, "iterations": k, "success_rate": 0.0}
    base = grover_iterate(n, 0, k)
    hits = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, n, trial])
        j0 = int(rng.integers(2**n))
        # relabel the marked index 0 -> j0
        amps = np.roll(base.amplitudes, j0)
        counts = sample_measurements(PureState(n, amps), copies, rng)
        top = max(counts.values())
        modes = [j for j, c in counts.items() if c == top]
        hits += len(modes) == 1 and modes[0] == j0
    return {"n": n, "A": copies, "iterations": k, "success_rate": hits / trials}


def q_probe(Q: int, success_threshold: float = 2 / 3, trials: int = 200, seed: int = 0,
            max_n: int = MAX_GROVER_QUBITS, workers: int = 1) -> QProbeReport:
    """Largest n for which Grover search still works with ``floor(Q/n)`` copies.

    A trial succeeds when the unique most frequent outcome among the copies
    is the marked index; ties count as failures.
    """
    if Q < 1:
        raise ValidationError("Q must be at least 1")
    if not 0 < success_threshold < 1:
        raise ValidationError("success threshold must lie in (0, 1)")
    if trials < 1:
        raise ValidationError("need at least one trial")
    if max_n > MAX_GROVER_QUBITS:
        raise GuardError(f"Q probe limited to {MAX_GROVER_QUBITS} qubits")
    jobs = [(Q, n, trials, seed) for n in range(1, max_n + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_probe_n, jobs))
    else:
        rows = [_probe_n(j) for j in jobs]
    ok = [r["n"] for r in rows if r["A"] > 0 and r["success_rate"] >= success_threshold]
    return QProbeReport(Q, tuple(rows), max(ok, default=0), seed, success_threshold, trials)
