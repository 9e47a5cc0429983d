"""Accuracy-complexity budget, shot tomography and truncated evolution.

A fixed resource ``Q`` buys ``floor(Q / C)`` measurable copies of a state of
complexity ``C``.  The evolution engine keeps a bounded working set of basis
indices and decides what to drop by amplitude and by one-step growth.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import GuardError, StabilityError, ValidationError
from .statevec import HermitianOperator, PureState

MAX_EVOLVE_QUBITS = 12
STEP_ERROR_LIMIT = 1e-3


@dataclass(frozen=True)
class Budget:
    Q: int

    def __post_init__(self):
        if self.Q < 1:
            raise ValidationError("Q must be a positive integer")

    def accuracy(self, complexity: int) -> int:
        return accuracy_for(self.Q, complexity)


def accuracy_for(Q: int, C: int) -> int:
    if Q < 1 or C < 1:
        raise ValidationError(f"Q and C must be positive, got Q={Q}, C={C}")
    return Q // C


def sample_measurements(state: PureState, copies: int, seed=None) -> dict[int, int]:
    """Born-rule outcome counts for ``copies`` independent measurements.

    ``seed`` may be anything accepted by ``numpy.random.default_rng``,
    including an existing generator.
    """
    if copies < 0:
        raise ValidationError("number of copies must be nonnegative")
    if copies == 0:
        return {}
    rng = np.random.default_rng(seed)
    p = state.probabilities()
    counts = rng.multinomial(copies, p / p.sum())
    return {int(j): int(counts[j]) for j in np.flatnonzero(counts)}


@dataclass(frozen=True, eq=False)
class TomographyEstimate:
    probabilities: np.ndarray
    half_width: float
    lower: np.ndarray
    upper: np.ndarray
    copies: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "estimate", "half_width"])
        for j, p in enumerate(self.probabilities):
            writer.writerow([j, repr(float(p)), repr(self.half_width)])
        return buf.getvalue()


def _wilson(counts: np.ndarray, total: int, z: float = 1.96):
    p = counts / total
    denom = 1 + z * z / total
    centre = (p + z * z / (2 * total)) / denom
    spread = z * np.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return np.clip(centre - spread, 0, 1), np.clip(centre + spread, 0, 1)


def reconstruct_probabilities(counts: Mapping[int, int], dim: int) -> TomographyEstimate:
    """Frequency estimate with the single ``1/sqrt(A)`` resolution and per-bin Wilson intervals."""
    vec = np.zeros(dim, dtype=np.int64)
    for j, c in counts.items():
        if not 0 <= int(j) < dim:
            raise ValidationError(f"outcome {j} out of range for dimension {dim}")
        if c < 0:
            raise ValidationError("counts must be nonnegative")
        vec[int(j)] += int(c)
    total = int(vec.sum())
    if total == 0:
        raise ValidationError("no measurement copies to reconstruct from")
    lo, hi = _wilson(vec.astype(float), total)
    return TomographyEstimate(vec / total, 1.0 / math.sqrt(total), lo, hi, total)


@dataclass(frozen=True)
class TruncationPolicy:
    """Retention rule for the working set.

    An index survives a step if ``|amp| >= amplitude_floor`` or, when
    ``growth_floor`` is set, ``|(H psi)_j| * dt >= growth_floor``; survivors
    are then trimmed to the ``max_working_set`` largest amplitudes.
    """

    amplitude_floor: float = 0.0
    growth_floor: float | None = None
    max_working_set: int | None = None

    def __post_init__(self):
        if self.amplitude_floor < 0 or (self.growth_floor is not None and self.growth_floor < 0):
            raise ValidationError("truncation floors must be nonnegative")
        if self.max_working_set is not None and self.max_working_set < 1:
            raise ValidationError("working set bound must be at least 1")
        if self.amplitude_floor == 0 and self.growth_floor is None and self.max_working_set is None:
            raise ValidationError("at least one truncation limit must be active")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple
    working_set_sizes: np.ndarray
    step_discarded_weight: np.ndarray
    cumulative_discarded_weight: np.ndarray

    def to_jsonl(self, top: int = 32) -> str:
        lines = []
        for t, s, w, d in zip(self.times, self.states, self.working_set_sizes,
                              self.cumulative_discarded_weight):
            amps = s.amplitudes
            order = np.lexsort((np.arange(amps.size), -np.abs(amps)))
            order = [j for j in order[:top] if amps[j] != 0]
            rec = {
                "t": float(t),
                "working_set": int(w),
                "discarded": float(d),
                "top": [[int(j), float(amps[j].real), float(amps[j].imag)] for j in order],
            }
            lines.append(json.dumps(rec))
        return "\n".join(lines) + "\n"


def _rk4(h: np.ndarray, psi: np.ndarray, dt: float) -> np.ndarray:
    def f(v):
        return -1j * (h @ v)

    k1 = f(psi)
    k2 = f(psi + 0.5 * dt * k1)
    k3 = f(psi + 0.5 * dt * k2)
    k4 = f(psi + dt * k3)
    return psi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _trim(idx: np.ndarray, amps: np.ndarray, keep: np.ndarray, limit: int | None):
    idx, amps = idx[keep], amps[keep]
    if limit is not None and idx.size > limit:
        order = np.lexsort((idx, -np.abs(amps)))[:limit]
        order.sort()
        idx, amps = idx[order], amps[order]
    return idx, amps


def truncated_evolve(op: HermitianOperator, start: PureState, dt: float, steps: int,
                     policy: TruncationPolicy) -> Trajectory:
    """Evolve ``i dpsi/dt = H psi`` on an adaptive working set of basis indices.

    Each step grows the working set by every index coupled to it through a
    nonzero matrix entry, takes one fourth-order Runge-Kutta step on that
    subspace, applies the retention rule and renormalizes.
    """
    n = op.num_qubits
    if n > MAX_EVOLVE_QUBITS:
        raise GuardError(f"truncated evolution limited to {MAX_EVOLVE_QUBITS} qubits, got {n}")
    if op.dim != start.dim:
        raise ValidationError(f"dimension mismatch: operator {op.dim} vs state {start.dim}")
    if dt <= 0 or steps < 1:
        raise ValidationError("need dt > 0 and at least one step")
    h = op.matrix
    coupled = h != 0
    limit = policy.max_working_set

    idx = np.flatnonzero(start.amplitudes)
    amps = start.amplitudes[idx].copy()
    weight0 = float(np.vdot(amps, amps).real)
    idx, amps = _trim(idx, amps, np.ones(idx.size, dtype=bool), limit)
    first_loss = 1.0 - float(np.vdot(amps, amps).real) / weight0
    amps = amps / np.linalg.norm(amps)

    def snapshot(ix, a):
        full = np.zeros(op.dim, dtype=complex)
        full[ix] = a
        return PureState(n, full)

    times = [0.0]
    states = [snapshot(idx, amps)]
    sizes = [idx.size]
    step_loss = [first_loss]
    kept_fraction = 1.0 - first_loss
    cumulative = [first_loss]

    for s in range(1, steps + 1):
        cand = np.flatnonzero(coupled[idx].any(axis=0) | np.isin(np.arange(op.dim), idx))
        sub = h[np.ix_(cand, cand)]
        norm_inf = float(np.max(np.sum(np.abs(sub), axis=1))) if cand.size else 0.0
        if (dt * norm_inf) ** 5 / 120.0 > STEP_ERROR_LIMIT:
            raise StabilityError(
                f"step error estimate {(dt * norm_inf) ** 5 / 120.0:.3g} exceeds {STEP_ERROR_LIMIT}; reduce dt"
            )
        psi = np.zeros(cand.size, dtype=complex)
        psi[np.searchsorted(cand, idx)] = amps
        psi = _rk4(sub, psi, dt)

        keep = np.abs(psi) >= policy.amplitude_floor
        if policy.growth_floor is not None:
            keep |= np.abs(sub @ psi) * dt >= policy.growth_floor
        before = float(np.vdot(psi, psi).real)
        idx, amps = _trim(cand, psi, keep, limit)
        after = float(np.vdot(amps, amps).real)
        if after == 0.0:
            raise ValidationError("truncation discarded the entire state")
        loss = 1.0 - after / before
        amps = amps / np.sqrt(after)

        kept_fraction *= 1.0 - loss
        times.append(s * dt)
        states.append(snapshot(idx, amps))
        sizes.append(idx.size)
        step_loss.append(loss)
        cumulative.append(1.0 - kept_fraction)

    return Trajectory(
        np.array(times),
        tuple(states),
        np.array(sizes, dtype=np.int64),
        np.array(step_loss),
        np.array(cumulative),
    )


def exact_propagate(op: HermitianOperator, start: PureState, t: float) -> PureState:
    """Dense ``exp(-i H t) psi`` via the Hermitian eigendecomposition."""
    evals, evecs = np.linalg.eigh(op.matrix)
    out = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ start.amplitudes))
    return PureState(start.num_qubits, out / np.linalg.norm(out))


def hopping_hamiltonian(n: int, hopping: float = 1.0, periodic: bool = False) -> HermitianOperator:
    """Nearest-neighbour hopping ``-J (|j><j+1| + h.c.)`` on the ``2**n`` basis chain."""
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    j = np.arange(dim - 1)
    h[j, j + 1] = h[j + 1, j] = -hopping
    if periodic and dim > 2:
        h[0, dim - 1] = h[dim - 1, 0] = -hopping
    return HermitianOperator(n, h)
