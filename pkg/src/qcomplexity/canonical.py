"""Basis permutations and minimization of naive complexity over them.

Permutation direction: ``(tau psi)[tau(j)] = psi[j]``.  The permutation
matrix ``P`` has a one at ``(tau(j), j)``, so a Hamiltonian is conjugated as
``P^-1 H P``, i.e. ``H'[j, k] = H[tau(j), tau(k)]``.

Searches evaluate candidates in chunks through :mod:`qcomplexity.kernels`
and reduce with the key ``(nu, image table)``, which makes the witness
independent of chunking and of the number of worker processes.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .errors import GuardError, ValidationError
from .factorize import EPS_FAC, MAX_FACTOR_QUBITS, naive_ham_complexity, naive_state_complexity
from .statevec import HERMITIAN_TOL, HermitianOperator, PureState

FAMILIES = ("sn", "relabel", "affine", "cnot-circuit")
MAX_SN_DIM = 8
MAX_RELABEL_QUBITS = 8
MAX_AFFINE_FULL_QUBITS = 4
MAX_HAM_QUBITS = 8
MAX_CIRCUIT_MAPS = 1_000_000
CHUNK = 4096


def _gate_tuple(gate) -> tuple:
    name = str(gate[0]).upper()
    args = tuple(int(a) for a in gate[1:])
    if name == "CNOT" and len(args) == 2 and args[0] != args[1]:
        return (name, *args)
    if name == "NOT" and len(args) == 1:
        return (name, *args)
    if name == "SWAP" and len(args) == 2 and args[0] != args[1]:
        return (name, *args)
    raise ValidationError(f"invalid gate {gate!r}")


def _apply_gate(idx: np.ndarray, gate: tuple) -> np.ndarray:
    name = gate[0]
    if name == "CNOT":
        c, t = gate[1], gate[2]
        return idx ^ (((idx >> c) & 1) << t)
    if name == "NOT":
        return idx ^ (1 << gate[1])
    i, j = gate[1], gate[2]
    diff = ((idx >> i) ^ (idx >> j)) & 1
    return idx ^ ((diff << i) | (diff << j))


def affine_form(table: np.ndarray, n: int):
    """Return ``(rows, offset_bits)`` if ``table`` is affine over GF(2), else None."""
    table = np.asarray(table, dtype=np.int64)
    b = int(table[0])
    cols = [int(table[1 << c]) ^ b for c in range(n)]
    if not np.array_equal(_affine_table(cols, b, n), table):
        return None
    rows = [[(cols[c] >> r) & 1 for c in range(n)] for r in range(n)]
    return rows, [(b >> r) & 1 for r in range(n)]


def _affine_table(cols: Sequence[int], b: int, n: int) -> np.ndarray:
    x = np.arange(2**n, dtype=np.int64)
    out = np.full(2**n, b, dtype=np.int64)
    for c in range(n):
        out ^= ((x >> c) & 1) * cols[c]
    return out


def _gf2_rank(cols: Sequence[int]) -> int:
    rank = 0
    vecs = list(cols)
    while vecs:
        pivot = vecs.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        vecs = [v ^ pivot if v & low else v for v in vecs]
    return rank


@dataclass(frozen=True, eq=False)
class BasisPermutation:
    """A bijection of basis indices, tagged with the family that produced it.

    ``params`` holds the family description: an image list (explicit), a
    qubit permutation (relabel), ``{"matrix", "offset"}`` bit lists (affine) or
    a gate list (cnot-circuit).
    """

    n: int
    family: str
    params: object
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        if table.shape != (2**self.n,):
            raise ValidationError(f"image table must have {2**self.n} entries")
        if not np.array_equal(np.sort(table), np.arange(2**self.n)):
            raise ValidationError("image table is not a bijection")

    @classmethod
    def explicit(cls, table: Sequence[int]) -> BasisPermutation:
        table = [int(t) for t in table]
        n = len(table).bit_length() - 1
        if len(table) != 2**n or n < 1:
            raise ValidationError(f"image table length {len(table)} is not a power of two")
        return cls(n, "explicit", table, table)

    @classmethod
    def identity(cls, n: int) -> BasisPermutation:
        return cls.explicit(range(2**n))

    @classmethod
    def relabel(cls, sigma: Sequence[int]) -> BasisPermutation:
        sigma = [int(s) for s in sigma]
        n = len(sigma)
        if sorted(sigma) != list(range(n)):
            raise ValidationError(f"{sigma} is not a permutation of 0..{n - 1}")
        x = np.arange(2**n, dtype=np.int64)
        table = np.zeros_like(x)
        for i, s in enumerate(sigma):
            table |= ((x >> i) & 1) << s
        return cls(n, "relabel", sigma, table)

    @classmethod
    def affine(cls, matrix: Sequence[Sequence[int]], offset: Sequence[int]) -> BasisPermutation:
        """``x -> L x + b`` over GF(2); bit ``r`` of the image is row ``r`` of ``L`` dotted with ``x``."""
        rows = [[int(v) & 1 for v in row] for row in matrix]
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows) or len(offset) != n:
            raise ValidationError("affine map needs an n x n bit matrix and n offset bits")
        cols = [sum(rows[r][c] << r for r in range(n)) for c in range(n)]
        if _gf2_rank(cols) != n:
            raise ValidationError("affine matrix is singular over GF(2)")
        b = sum((int(v) & 1) << r for r, v in enumerate(offset))
        params = {"matrix": rows, "offset": [int(v) & 1 for v in offset]}
        return cls(n, "affine", params, _affine_table(cols, b, n))

    @classmethod
    def cnot_circuit(cls, n: int, gates) -> BasisPermutation:
        gates = [_gate_tuple(g) for g in gates]
        idx = np.arange(2**n, dtype=np.int64)
        for g in gates:
            if max(g[1:]) >= n or min(g[1:]) < 0:
                raise ValidationError(f"gate {g} out of range for {n} qubits")
            idx = _apply_gate(idx, g)
        if affine_form(idx, n) is None:
            raise ValidationError("circuit does not compose to an affine map")
        return cls(n, "cnot-circuit", [list(g) for g in gates], idx)

    def __call__(self, j):
        return self.table[j]

    def inverse(self) -> BasisPermutation:
        return BasisPermutation.explicit(np.argsort(self.table))

    def compose(self, first: BasisPermutation) -> BasisPermutation:
        """``self o first``: apply ``first``, then ``self``."""
        if first.n != self.n:
            raise ValidationError("cannot compose permutations of different sizes")
        return BasisPermutation.explicit(self.table[first.table])

    def affine_form(self):
        return affine_form(self.table, self.n)

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n, "params": self.params}

    @classmethod
    def from_json(cls, data: dict) -> BasisPermutation:
        family, params = data["family"], data["params"]
        if family == "explicit":
            return cls.explicit(params)
        if family == "relabel":
            return cls.relabel(params)
        if family == "affine":
            return cls.affine(params["matrix"], params["offset"])
        if family == "cnot-circuit":
            return cls.cnot_circuit(int(data["n"]), params)
        raise ValidationError(f"unknown permutation family {family!r}")


def apply_permutation(state: PureState, tau: BasisPermutation) -> PureState:
    if tau.n != state.num_qubits:
        raise ValidationError(f"permutation on {tau.n} qubits applied to {state.num_qubits}-qubit state")
    out = np.empty_like(state.amplitudes)
    out[tau.table] = state.amplitudes
    return PureState(state.num_qubits, out)


def conjugate_hamiltonian(op: HermitianOperator, tau: BasisPermutation) -> HermitianOperator:
    """``P^-1 H P`` for the permutation matrix of ``tau``."""
    if tau.n != op.num_qubits:
        raise ValidationError(f"permutation on {tau.n} qubits applied to {op.num_qubits}-qubit operator")
    t = tau.table
    return HermitianOperator(op.num_qubits, op.matrix[np.ix_(t, t)])


@dataclass(frozen=True)
class SearchLimits:
    depth: int = 2
    samples: int | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {"depth": self.depth, "samples": self.samples, "seed": self.seed}


@lru_cache(maxsize=None)
def _invertible_columns(n: int) -> tuple:
    """All invertible n x n GF(2) matrices as column tuples, by integer code."""
    out = []
    for code in range(2 ** (n * n)):
        cols = tuple((code >> (c * n)) & ((1 << n) - 1) for c in range(n))
        if _gf2_rank(cols) == n:
            out.append(cols)
    return tuple(out)


def _cols_to_rows(cols: Sequence[int], n: int) -> list[list[int]]:
    return [[(cols[c] >> r) & 1 for c in range(n)] for r in range(n)]


def _generators(n: int) -> list[tuple]:
    gens = [("CNOT", c, t) for c in range(n) for t in range(n) if c != t]
    gens += [("NOT", t) for t in range(n)]
    gens += [("SWAP", i, j) for i in range(n) for j in range(i + 1, n)]
    return gens


@lru_cache(maxsize=32)
def _circuit_bfs(n: int, depth: int) -> tuple:
    """Circuits up to ``depth`` gates, breadth-first, one per distinct map."""
    ident = tuple(range(2**n))
    seen = {ident}
    found = [((), ident)]
    frontier = [((), np.arange(2**n, dtype=np.int64))]
    gens = _generators(n)
    for _ in range(depth):
        nxt = []
        for gates, idx in frontier:
            for g in gens:
                new = _apply_gate(idx, g)
                key = tuple(new.tolist())
                if key in seen:
                    continue
                seen.add(key)
                found.append((gates + (g,), key))
                nxt.append((gates + (g,), new))
                if len(found) > MAX_CIRCUIT_MAPS:
                    raise GuardError(f"circuit enumeration exceeds {MAX_CIRCUIT_MAPS} maps")
        frontier = nxt
        if not frontier:
            break
    return tuple(found)


class FamilyEnumerator:
    """Indexable, restartable enumeration of one permutation family.

    Orders: ``sn`` lexicographic image tables; ``relabel`` lexicographic qubit
    permutations; ``affine`` invertible matrices by integer code (entry
    ``(r, c)`` is bit ``c*n + r``) times offsets ``0..N-1``, or, when
    ``limits.samples`` is set, the identity followed by distinct seeded
    samples; ``cnot-circuit`` breadth-first over the generator list
    ``CNOT(c, t)``, ``NOT(t)``, ``SWAP(i, j)``.
    """

    def __init__(self, n: int, family: str, limits: SearchLimits | None = None):
        self.n = n
        self.family = family
        self.limits = limits or SearchLimits()
        self.dim = 2**n
        self.sampled = False
        if family not in FAMILIES:
            raise ValidationError(f"unknown family {family!r}; choose from {FAMILIES}")
        if family == "sn":
            if self.dim > MAX_SN_DIM:
                raise GuardError(f"full S_N enumeration limited to N <= {MAX_SN_DIM}, got N = {self.dim}")
            self._len = math.factorial(self.dim)
        elif family == "relabel":
            if n > MAX_RELABEL_QUBITS:
                raise GuardError(f"qubit relabeling limited to n <= {MAX_RELABEL_QUBITS}, got {n}")
            self._len = math.factorial(n)
        elif family == "affine":
            if self.limits.samples is not None:
                self.sampled = True
                self._samples = self._draw_affine_samples()
                self._len = len(self._samples)
            else:
                if n > MAX_AFFINE_FULL_QUBITS:
                    raise GuardError(
                        f"full affine enumeration limited to n <= {MAX_AFFINE_FULL_QUBITS}; "
                        "pass a sample count"
                    )
                self._len = len(_invertible_columns(n)) * self.dim
        else:
            if self.limits.depth < 0:
                raise ValidationError("circuit depth must be nonnegative")
            self._circuits = _circuit_bfs(n, self.limits.depth)
            self._len = len(self._circuits)

    def __len__(self):
        return self._len

    def _draw_affine_samples(self) -> list:
        n = self.n
        rng = np.random.default_rng(self.limits.seed)
        ident = (tuple(1 << c for c in range(n)), 0)
        out, seen = [ident], {ident}
        target = int(self.limits.samples)
        attempts = 0
        while len(out) < target + 1 and attempts < 50 * (target + 1):
            attempts += 1
            cols = tuple(int(v) for v in rng.integers(0, self.dim, size=n))
            b = int(rng.integers(0, self.dim))
            if _gf2_rank(cols) != n or (cols, b) in seen:
                continue
            seen.add((cols, b))
            out.append((cols, b))
        return out

    def _affine_params(self, i: int):
        if self.sampled:
            return self._samples[i]
        mats = _invertible_columns(self.n)
        return mats[i // self.dim], i % self.dim

    def tables(self, start: int, stop: int) -> np.ndarray:
        stop = min(stop, self._len)
        if start >= stop:
            return np.empty((0, self.dim), dtype=np.int64)
        if self.family == "sn":
            rows = itertools.islice(itertools.permutations(range(self.dim)), start, stop)
            return np.array(list(rows), dtype=np.int64)
        if self.family == "relabel":
            sigmas = np.array(list(itertools.islice(itertools.permutations(range(self.n)), start, stop)))
            x = np.arange(self.dim, dtype=np.int64)
            bits = (x[None, :, None] >> np.arange(self.n)[None, None, :]) & 1
            return np.sum(bits << sigmas[:, None, :], axis=2).astype(np.int64)
        if self.family == "affine":
            params = [self._affine_params(i) for i in range(start, stop)]
            cols = np.array([p[0] for p in params], dtype=np.int64)
            offs = np.array([p[1] for p in params], dtype=np.int64)
            x = np.arange(self.dim, dtype=np.int64)
            out = np.repeat(offs[:, None], self.dim, axis=1)
            for c in range(self.n):
                out ^= ((x >> c) & 1)[None, :] * cols[:, c][:, None]
            return out
        return np.array([c[1] for c in self._circuits[start:stop]], dtype=np.int64)

    def permutation(self, i: int) -> BasisPermutation:
        if not 0 <= i < self._len:
            raise IndexError(i)
        if self.family == "sn":
            return BasisPermutation.explicit(self.tables(i, i + 1)[0])
        if self.family == "relabel":
            sigma = next(itertools.islice(itertools.permutations(range(self.n)), i, None))
            return BasisPermutation.relabel(sigma)
        if self.family == "affine":
            cols, b = self._affine_params(i)
            return BasisPermutation.affine(_cols_to_rows(cols, self.n), [(b >> r) & 1 for r in range(self.n)])
        return BasisPermutation.cnot_circuit(self.n, self._circuits[i][0])


def enumerate_family(n: int, family: str, limits: SearchLimits | None = None,
                     start: int = 0) -> Iterator[BasisPermutation]:
    enum = FamilyEnumerator(n, family, limits)
    for i in range(start, len(enum)):
        yield enum.permutation(i)


@dataclass(frozen=True, eq=False)
class ComplexityReport:
    naive_nu: int
    best_c: int
    witness: BasisPermutation
    family: str
    certificate: str
    candidates_examined: int
    limits: SearchLimits = field(default_factory=SearchLimits)

    def to_dict(self) -> dict:
        return {
            "naive_nu": self.naive_nu,
            "best_c": self.best_c,
            "witness": self.witness.to_json(),
            "witness_table": [int(t) for t in self.witness.table],
            "family": self.family,
            "certificate": self.certificate,
            "candidates_examined": self.candidates_examined,
            "limits": self.limits.to_dict(),
        }


def _chunk_best(nus: np.ndarray, tables: np.ndarray, offset: int):
    best = int(nus.min())
    rows = np.flatnonzero(nus == best)
    sub = tables[rows]
    # lexsort treats the last key as primary
    order = np.lexsort(sub.T[::-1])
    r = int(rows[order[0]])
    return best, tuple(int(v) for v in tables[r]), offset + r


def _score_chunk(args):
    kind, payload, n, family, limits, start, stop, tol = args
    enum = FamilyEnumerator(n, family, limits)
    tables = enum.tables(start, stop)
    if kind == "state":
        nus = kernels.batch_state_nu(payload, tables, n, tol)
    else:
        nus = kernels.batch_ham_nu(payload, tables, n, tol)
    return _chunk_best(nus, tables, start)


def _search(kind, payload, n, family, limits, tol, workers):
    enum = FamilyEnumerator(n, family, limits)
    total = len(enum)
    jobs = [(kind, payload, n, family, limits, s, min(s + CHUNK, total), tol)
            for s in range(0, total, CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_score_chunk, jobs))
    else:
        results = [_score_chunk(j) for j in jobs]
    best = min(results, key=lambda r: (r[0], r[1], r[2]))
    return best[0], enum.permutation(best[2]), total


def true_state_complexity(state: PureState, family: str = "affine", limits: SearchLimits | None = None,
                          workers: int = 1, eps: float = EPS_FAC) -> ComplexityReport:
    """Minimum naive complexity of ``state`` over a permutation family."""
    from .grover import two_value_certificate

    limits = limits or SearchLimits()
    n = state.num_qubits
    if n > MAX_FACTOR_QUBITS:
        raise GuardError(f"state search limited to {MAX_FACTOR_QUBITS} qubits, got {n}")
    best, witness, count = _search("state", np.asarray(state.amplitudes), n, family, limits, eps, workers)
    if family == "sn":
        cert = "exhaustive-exact"
    elif n >= 2 and two_value_certificate(state) is not None:
        cert = "two-value-exact"
    else:
        cert = "family-upper-bound"
    return ComplexityReport(naive_state_complexity(state, eps), best, witness, family, cert, count, limits)


def true_ham_complexity(op: HermitianOperator, family: str = "affine", limits: SearchLimits | None = None,
                        workers: int = 1, tol: float = HERMITIAN_TOL) -> ComplexityReport:
    """Minimum interaction-block size of ``P^-1 H P`` over a permutation family."""
    limits = limits or SearchLimits()
    n = op.num_qubits
    if n > MAX_HAM_QUBITS:
        raise GuardError(f"Hamiltonian search limited to {MAX_HAM_QUBITS} qubits, got {n}")
    best, witness, count = _search("ham", np.asarray(op.matrix), n, family, limits, tol, workers)
    cert = "exhaustive-exact" if family == "sn" else "family-upper-bound"
    return ComplexityReport(naive_ham_complexity(op, tol), best, witness, family, cert, count, limits)


@dataclass(frozen=True)
class EvolutionBoundReport:
    bound: int
    max_complexity: int
    per_time: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "max_complexity": self.max_complexity,
            "per_time": [list(p) for p in self.per_time],
            "passed": self.passed,
        }


def evolution_complexity_bound_check(op: HermitianOperator, witness: BasisPermutation, t_samples,
                                     bound: int | None = None, starts=None) -> EvolutionBoundReport:
    """Check that ``tau^-1 exp(-itH)|j>`` never exceeds the block bound.

    ``bound`` defaults to the naive complexity of ``P^-1 H P``; ``starts``
    defaults to every basis state.
    """
    n = op.num_qubits
    if n > 4:
        raise GuardError(f"dense evolution check limited to 4 qubits, got {n}")
    if bound is None:
        bound = naive_ham_complexity(conjugate_hamiltonian(op, witness))
    starts = range(op.dim) if starts is None else starts
    evals, evecs = np.linalg.eigh(op.matrix)
    inv = witness.inverse()
    per_time = []
    worst = 0
    for t in t_samples:
        u = (evecs * np.exp(-1j * evals * float(t))) @ evecs.conj().T
        top = 0
        for j in starts:
            col = u[:, j]
            evolved = PureState(n, col / np.linalg.norm(col))
            top = max(top, naive_state_complexity(apply_permutation(evolved, inv)))
        per_time.append((float(t), top))
        worst = max(worst, top)
    return EvolutionBoundReport(int(bound), worst, tuple(per_time), worst <= bound)
