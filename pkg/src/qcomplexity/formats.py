"""JSON readers and writers for states, operators and oscillator chains.

State:    {"n": int, "amplitudes": [[re, im], ...]}
Operator: {"n": int, "dense": [[[re, im], ...], ...]}
          {"n": int, "pauli": [{"string": "XIZ", "coeff": float}, ...]}
Chain:    {"N": int, "first_row": [float, ...]}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .oscillators import OscillatorChain
from .statevec import HERMITIAN_TOL, NORM_TOL, PAULI_CHARS, HermitianOperator, PureState


def _pairs(values, what: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValidationError(f"{what}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _pair_list(values: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in np.ravel(values)]


def _load(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top-level JSON value must be an object")
    return data


def _qubits(data: dict) -> int:
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise ValidationError("field 'n' must be a positive integer")
    return n


def state_from_dict(data: dict) -> PureState:
    n = _qubits(data)
    if "amplitudes" not in data:
        raise ValidationError("state file needs an 'amplitudes' field")
    amps = _pairs(data["amplitudes"], "amplitudes")
    if amps.ndim != 1 or amps.size != 2**n:
        raise ValidationError(f"expected {2**n} amplitudes for n={n}, got {amps.size}")
    return PureState(n, amps)


def state_to_dict(state: PureState) -> dict:
    return {"n": state.num_qubits, "amplitudes": _pair_list(state.amplitudes)}


def operator_from_dict(data: dict) -> HermitianOperator:
    n = _qubits(data)
    if "dense" in data:
        mat = _pairs(data["dense"], "dense")
        if mat.shape != (2**n, 2**n):
            raise ValidationError(f"expected a {2**n}x{2**n} dense matrix, got shape {mat.shape}")
        return HermitianOperator(n, mat)
    if "pauli" in data:
        terms: dict[str, float] = {}
        for term in data["pauli"]:
            s = term.get("string", "")
            if len(s) != n or any(c not in PAULI_CHARS for c in s):
                raise ValidationError(f"invalid Pauli string {s!r} for n={n}")
            terms[s] = terms.get(s, 0.0) + float(term["coeff"])
        return HermitianOperator.from_pauli(n, terms)
    raise ValidationError("operator file needs a 'dense' or 'pauli' field")


def operator_to_dict(op: HermitianOperator, pauli: bool = False) -> dict:
    if pauli and op.pauli_terms is not None:
        return {"n": op.num_qubits,
                "pauli": [{"string": s, "coeff": c} for s, c in sorted(op.pauli_terms.items())]}
    return {"n": op.num_qubits, "dense": [[[float(v.real), float(v.imag)] for v in row] for row in op.matrix]}


def chain_from_dict(data: dict) -> OscillatorChain:
    size = data.get("N")
    row = data.get("first_row")
    if not isinstance(size, int) or row is None or len(row) != size:
        raise ValidationError("chain file needs integer 'N' and a 'first_row' of length N")
    return OscillatorChain.from_first_row(row)


def chain_to_dict(chain: OscillatorChain) -> dict:
    return {"N": chain.num_sites, "first_row": [float(v) for v in chain.coupling[0]]}


def read_state(path) -> PureState:
    return state_from_dict(_load(path))


def read_operator(path) -> HermitianOperator:
    return operator_from_dict(_load(path))


def read_chain(path) -> OscillatorChain:
    return chain_from_dict(_load(path))


def read_any(path):
    data = _load(path)
    if "amplitudes" in data:
        return state_from_dict(data)
    if "dense" in data or "pauli" in data:
        return operator_from_dict(data)
    if "first_row" in data:
        return chain_from_dict(data)
    raise ValidationError(f"{path}: unrecognized file kind")


def write_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def validate(path) -> str:
    """Check a state, operator or chain file and describe the first problem.

    Returns ``"ok"`` for a valid file.
    """
    try:
        data = _load(path)
    except (OSError, ValidationError) as exc:
        return str(exc)
    if "amplitudes" in data:
        amps = _safe_pairs(data["amplitudes"])
        if isinstance(amps, str):
            return amps
        size = amps.size
        if size < 2 or size & (size - 1):
            return f"amplitude count {size} is not a power of two"
        if data.get("n") != size.bit_length() - 1:
            return f"field 'n' = {data.get('n')!r} does not match {size} amplitudes"
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1) > NORM_TOL:
            return f"state is not normalized: sum |amp|^2 = {norm!r}"
        return "ok"
    if "dense" in data:
        mat = _safe_pairs(data["dense"])
        if isinstance(mat, str):
            return mat
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            return f"dense matrix is not square: shape {mat.shape}"
        size = mat.shape[0]
        if size < 2 or size & (size - 1):
            return f"matrix dimension {size} is not a power of two"
        if data.get("n") != size.bit_length() - 1:
            return f"field 'n' = {data.get('n')!r} does not match dimension {size}"
        dev = np.abs(mat - mat.conj().T)
        if dev.max() > HERMITIAN_TOL:
            r, c = np.unravel_index(int(np.argmax(dev)), dev.shape)
            return f"matrix is not Hermitian at entry ({r}, {c}): deviation {dev[r, c]!r}"
        return "ok"
    try:
        read_any(path)
    except ValidationError as exc:
        return str(exc)
    except (KeyError, TypeError, ValueError) as exc:
        return f"malformed file: {exc!r}"
    return "ok"


def _safe_pairs(values):
    try:
        return _pairs(values, "entries")
    except ValidationError as exc:
        return str(exc)
