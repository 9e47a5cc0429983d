"""Command-line interface.

Every command writes a JSON report ``{"schema_version", "command", "config",
"result"}`` to ``--out`` or stdout.  Exit status is 0 on success, 1 for
invalid input and 2 when a size guard is exceeded.  Input paths of the form
``fixture:NAME`` resolve to the bundled fixture files.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import budget, canonical, discrete, factorize, formats, grover, oscillators
from .errors import GuardError, StabilityError, ValidationError
from .statevec import HermitianOperator, PureState, nonzero_terms, pauli_decompose

SCHEMA_VERSION = 1
FIXTURES = ("bell", "ghz3", "gsa_n3", "cnot_example_ham", "ring8")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise ValidationError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return Path(str(resources.files("qcomplexity") / "fixtures" / f"{name}.json"))


def _resolve(path: str) -> Path:
    if path.startswith("fixture:"):
        return fixture_path(path.split(":", 1)[1])
    return Path(path)


def _emit(args, result: dict, config: dict) -> None:
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": config,
        "result": result,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _limits(args) -> canonical.SearchLimits:
    return canonical.SearchLimits(depth=args.depth, samples=args.samples, seed=args.seed)


def _state_dict(state: PureState) -> dict:
    return formats.state_to_dict(state)


def cmd_analyze_state(args):
    state = formats.read_state(_resolve(args.input))
    rep = factorize.finest_factorization(state)
    result = {
        "nu": rep.nu,
        "partition": rep.partition.as_lists(),
        "factors": [_state_dict(f) for f in rep.factors],
        "residual": rep.residual,
    }
    return result, {"input": args.input}


def cmd_analyze_ham(args):
    op = formats.read_operator(_resolve(args.input))
    part = factorize.interaction_partition(op)
    result = {
        "nu": part.max_block,
        "partition": part.as_lists(),
        "block_hamiltonians": factorize.block_hamiltonians(op, part),
        "reassembly_residual": factorize.reassembly_residual(op, part),
    }
    return result, {"input": args.input}


def cmd_reduce(args):
    obj = formats.read_any(_resolve(args.input))
    limits = _limits(args)
    if isinstance(obj, PureState):
        rep = canonical.true_state_complexity(obj, args.family, limits, workers=args.workers)
        kind = "state"
    elif isinstance(obj, HermitianOperator):
        rep = canonical.true_ham_complexity(obj, args.family, limits, workers=args.workers)
        kind = "hamiltonian"
    else:
        raise ValidationError("reduce expects a state or operator file")
    result = dict(rep.to_dict(), kind=kind)
    if kind == "hamiltonian":
        conj = canonical.conjugate_hamiltonian(obj, rep.witness)
        result["conjugated_pauli"] = nonzero_terms(pauli_decompose(conj))
    config = {"input": args.input, "family": args.family, "limits": limits.to_dict()}
    return result, config


def cmd_qft(args):
    state = formats.read_state(_resolve(args.input))
    out = discrete.qft(state, args.direction)
    return {"state": _state_dict(out)}, {"input": args.input, "direction": args.direction}


def cmd_momentum_check(args):
    n = args.n
    p = discrete.momentum_operator(n).matrix
    herm = float(np.max(np.abs(p - p.conj().T)))
    spectrum = np.sort(np.linalg.eigvalsh(p))
    expected = np.sort(discrete.momentum_eigenvalues(n))
    qinv = discrete.qft_matrix(n, "inverse")
    eig_err = 0.0
    for a, lam in enumerate(discrete.momentum_eigenvalues(n)):
        v = qinv[:, a]
        eig_err = max(eig_err, float(np.max(np.abs(p @ v - lam * v))))
    result = {
        "hermiticity_error": herm,
        "spectrum_error": float(np.max(np.abs(spectrum - expected))),
        "eigenvector_error": eig_err,
    }
    if n <= discrete.MAX_RESIDUAL_QUBITS:
        result["alternate_form_residual"] = discrete.momentum_alternate_form_residual(n)
    return result, {"n": n}


def cmd_grover(args):
    if args.mode == "state":
        state = grover.gsa_state(grover.GsaParams(args.n, args.t, args.j0))
        config = {"mode": "state", "n": args.n, "t": args.t, "j0": args.j0}
    elif args.mode == "iterate":
        state = grover.grover_iterate(args.n, args.j0, args.k)
        config = {"mode": "iterate", "n": args.n, "j0": args.j0, "k": args.k}
    else:
        state = formats.read_state(_resolve(args.input))
        config = {"mode": "certificate", "input": args.input}
    cert = grover.two_value_certificate(state)
    result = {
        "state": _state_dict(state),
        "certificate": cert,
        "certificate_kind": "two-value-exact" if cert is not None else None,
        "marked_probability": float(np.max(state.probabilities())),
    }
    return result, config


def cmd_q_probe(args):
    rep = grover.q_probe(args.Q, args.threshold, args.trials, args.seed, workers=args.workers)
    config = {"Q": args.Q, "seed": args.seed, "trials": args.trials, "threshold": args.threshold}
    return rep.to_dict(), config


def cmd_tomography(args):
    state = formats.read_state(_resolve(args.input))
    complexity = factorize.naive_state_complexity(state)
    copies = args.copies if args.copies is not None else budget.accuracy_for(args.Q, complexity)
    counts = budget.sample_measurements(state, copies, args.seed)
    if copies == 0:
        raise ValidationError(f"budget Q={args.Q} leaves no copies for complexity {complexity}")
    est = budget.reconstruct_probabilities(counts, state.dim)
    if args.csv:
        Path(args.csv).write_text(est.to_csv())
    result = {
        "copies": copies,
        "complexity": complexity,
        "half_width": est.half_width,
        "estimate": [float(p) for p in est.probabilities],
        "wilson_lower": [float(p) for p in est.lower],
        "wilson_upper": [float(p) for p in est.upper],
        "max_abs_error": float(np.max(np.abs(est.probabilities - state.probabilities()))),
    }
    config = {"input": args.input, "Q": args.Q, "copies": args.copies, "seed": args.seed}
    return result, config


def cmd_evolve(args):
    op = formats.read_operator(_resolve(args.input))
    if args.start is not None:
        start = formats.read_state(_resolve(args.start))
    else:
        start = PureState.basis(op.num_qubits, args.start_index)
    policy = budget.TruncationPolicy(args.amp_floor, args.growth_floor, args.max_set)
    traj = budget.truncated_evolve(op, start, args.dt, args.steps, policy)
    if args.trajectory:
        Path(args.trajectory).write_text(traj.to_jsonl())
    exact = budget.exact_propagate(op, start, args.dt * args.steps) if op.num_qubits <= 10 else None
    final = traj.states[-1]
    result = {
        "steps": args.steps,
        "final_time": float(traj.times[-1]),
        "max_working_set": int(traj.working_set_sizes.max()),
        "cumulative_discarded": float(traj.cumulative_discarded_weight[-1]),
        "final_state_top": json.loads(traj.to_jsonl().splitlines()[-1])["top"],
    }
    if exact is not None:
        from .statevec import fidelity

        result["fidelity_vs_exact"] = fidelity(final, exact)
    config = {
        "input": args.input,
        "start": args.start,
        "start_index": args.start_index,
        "dt": args.dt,
        "amplitude_floor": args.amp_floor,
        "growth_floor": args.growth_floor,
        "max_working_set": args.max_set,
    }
    return result, config


def cmd_modes(args):
    chain = formats.read_chain(_resolve(args.input))
    rep = oscillators.decouple(chain)
    size = chain.num_sites
    result = rep.to_dict()
    result["eigh_frequencies_squared"] = [float(v) for v in np.linalg.eigvalsh(chain.coupling)]
    result["num_sites"] = size
    return result, {"input": args.input}


def cmd_validate(args):
    msg = formats.validate(_resolve(args.input))
    print(msg)
    return 0 if msg == "ok" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcomplexity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, search=False):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--Q", type=int, default=40, help="quantum memory budget")
        p.add_argument("--workers", type=int, default=1)
        if search:
            p.add_argument("--family", choices=canonical.FAMILIES, default="affine")
            p.add_argument("--depth", type=int, default=2, help="cnot-circuit depth")
            p.add_argument("--samples", type=int, default=None, help="affine sample count")
        return p

    p = common(sub.add_parser("analyze-state", help="finest tensor factorization"))
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze_state)

    p = common(sub.add_parser("analyze-ham", help="interaction partition of a Hamiltonian"))
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze_ham)

    p = common(sub.add_parser("reduce", help="minimize complexity over a permutation family"), search=True)
    p.add_argument("input")
    p.set_defaults(func=cmd_reduce)

    p = common(sub.add_parser("qft", help="apply the discrete Fourier pair"))
    p.add_argument("input")
    p.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    p.set_defaults(func=cmd_qft)

    p = common(sub.add_parser("momentum-check", help="checks of the discrete momentum operator"))
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_momentum_check)

    p = common(sub.add_parser("grover", help="GSA states, iterations and certificates"))
    modes = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    m = modes.add_parser("state")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--t", type=float, required=True)
    m.add_argument("--j0", type=int, default=0)
    m = modes.add_parser("iterate")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--j0", type=int, default=0)
    m.add_argument("--k", type=int, required=True)
    m = modes.add_parser("certificate")
    m.add_argument("input")
    p.set_defaults(func=cmd_grover)

    p = common(sub.add_parser("q-probe", help="largest n for which Grover search works under Q"))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--threshold", type=float, default=2 / 3)
    p.set_defaults(func=cmd_q_probe)

    p = common(sub.add_parser("tomography", help="shot-based probability estimate"))
    p.add_argument("input")
    p.add_argument("--copies", type=int, default=None, help="override floor(Q / complexity)")
    p.add_argument("--csv", help="write the index,estimate,half_width table here")
    p.set_defaults(func=cmd_tomography)

    p = common(sub.add_parser("evolve", help="truncated working-set evolution"))
    p.add_argument("input", help="Hamiltonian file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--start", help="initial state file")
    group.add_argument("--start-index", type=int, help="initial basis index")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--amp-floor", type=float, default=0.0)
    p.add_argument("--growth-floor", type=float, default=None)
    p.add_argument("--max-set", type=int, default=None)
    p.add_argument("--trajectory", help="write per-step JSON lines here")
    p.set_defaults(func=cmd_evolve)

    p = common(sub.add_parser("modes", help="normal modes of a circulant oscillator chain"))
    p.add_argument("input")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("validate", help="check a state, operator or chain file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
        if isinstance(out, int):
            return out
        result, config = out
        _emit(args, result, config)
    except (GuardError, StabilityError) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
