"""Batch command-line front end: compile, marginal, sample, oracle, gadget,
verify, graph-info.

Machine-readable JSON goes to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 input error, 2 internal invariant failure.  Floats are emitted
with Python's shortest round-trip repr, so double-precision values survive a
parse-emit cycle unchanged.  Output is deterministic given identical inputs
and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import compiler, ir, oracle, tnsim
from .cyclotomic import Cyclotomic


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _degree_report(cost) -> dict:
    graph = ir.interaction_graph(cost)
    hist: dict[str, int] = {}
    for d in graph.degrees().values():
        hist[str(d)] = hist.get(str(d), 0) + 1
    return {"max_degree": graph.max_degree,
            "degree_histogram": dict(sorted(hist.items()))}


def _cmd_compile(args) -> int:
    circuit = ir.circuit_from_json(ir.load_json(args.infile))
    if args.iqp and args.monotone:
        raise ValueError("--monotone applies to QAOA compilation only")
    if args.iqp:
        program = compiler.compile_iqp(circuit)
        ir.dump_json(ir.circuit_to_json(program.to_circuit()), args.out)
        cost, n_compiled, register = program.cost, program.n, program.post_select
    else:
        instance = compiler.compile_circuit(circuit, monotone=args.monotone)
        ir.dump_json(ir.instance_to_json(instance), args.out)
        cost, n_compiled, register = instance.cost, instance.n, instance.post_select
    report = {
        "out": args.out,
        "iqp": args.iqp,
        "monotone": args.monotone,
        "n_source": circuit.n_qubits,
        "n_compiled": n_compiled,
        "auxiliary_count": n_compiled - circuit.n_qubits,
        "post_selection_register_size": len(register),
    }
    report.update(_degree_report(cost))
    _emit(report)
    return 0


def _cmd_marginal(args) -> int:
    instance = ir.instance_from_json(ir.load_json(args.infile))
    subset = [int(q) for q in args.subset.split(",") if q != ""]
    outcome = args.outcome or ""
    prob = tnsim.marginal(instance, subset, outcome)
    _emit({"subset": subset, "outcome": outcome, "probability": prob})
    return 0


def _cmd_sample(args) -> int:
    instance = ir.instance_from_json(ir.load_json(args.infile))
    strings = tnsim.sample(instance, args.seed, args.count)
    if args.out:
        with open(args.out, "w") as f:
            f.writelines(s + "\n" for s in strings)
        _emit({"count": args.count, "seed": args.seed, "out": args.out})
    else:
        for s in strings:
            sys.stdout.write(s + "\n")
    return 0


def _cmd_oracle(args) -> int:
    circuit = ir.circuit_from_json(ir.load_json(args.infile))
    dist = oracle.post_selected_distribution(circuit, backend=args.backend)
    _emit({"outcomes": dist.float_outcomes(),
           "conditioning_probability": oracle._to_float(dist.conditioning_probability)})
    return 0


def _parse_f_matrix(text: str):
    if text.startswith("["):
        rows = json.loads(text)
        return tuple(tuple(complex(e[0], e[1]) if isinstance(e, list) else complex(e)
                           for e in row) for row in rows)
    return compiler.named_gate_matrix(text)


def _complex_pair(z) -> list[float]:
    z = z.to_complex() if isinstance(z, Cyclotomic) else complex(z)
    return [z.real, z.imag]


def _cmd_gadget(args) -> int:
    spec = compiler.gadget_solve(_parse_f_matrix(args.f), args.lambda_phase)
    payload = {
        "exact": spec.exact,
        "r0": _complex_pair(spec.r0),
        "r1": _complex_pair(spec.r1),
        "lambda": _complex_pair(spec.lam),
        "w": [_complex_pair(x) for x in spec.w],
    }
    if spec.exact:
        payload["w_text"] = [str(x) for x in spec.w]
        payload["lambda_text"] = str(spec.lam)
    _emit(payload)
    return 0


def _cmd_verify(args) -> int:
    circuit = ir.circuit_from_json(ir.load_json(args.infile))
    if args.iqp:
        compiled = compiler.compile_iqp(circuit).to_circuit()
        n_compiled = compiled.n_qubits
    else:
        instance = compiler.compile_circuit(circuit)
        compiled = ir.qaoa_to_circuit(instance)
        n_compiled = instance.n
    source_dist = oracle.post_selected_distribution(circuit, backend=args.backend)
    compiled_dist = oracle.post_selected_distribution(compiled, backend=args.backend)
    error = oracle.multiplicative_error(source_dist, compiled_dist)
    src = source_dist.float_outcomes()
    cmp_ = compiled_dist.float_outcomes()
    deviation = max(abs(src.get(x, 0.0) - cmp_.get(x, 0.0)) for x in set(src) | set(cmp_))

    def _fmt(v):
        return str(v) if isinstance(v, Cyclotomic) else v

    _emit({
        "backend": args.backend,
        "iqp": args.iqp,
        "n_source": circuit.n_qubits,
        "n_compiled": n_compiled,
        "multiplicative_error": error,
        "max_pointwise_deviation": deviation,
        "exact_match": error == 1.0,
        "outcomes": {x: {"source": _fmt(source_dist.outcomes.get(x, 0.0)),
                         "compiled": _fmt(compiled_dist.outcomes.get(x, 0.0))}
                     for x in sorted(set(source_dist.outcomes) | set(compiled_dist.outcomes))},
    })
    return 0


def _cmd_graph_info(args) -> int:
    instance = ir.instance_from_json(ir.load_json(args.infile))
    graph = ir.interaction_graph(instance.cost)
    info = {"n": instance.n, "p": instance.p,
            "edges": sorted(list(e) for e in graph.edges)}
    info.update(_degree_report(instance.cost))
    if graph.max_degree <= 2:
        info["components"] = [
            {"kind": c.kind, "vertices": list(c.vertices),
             "edges": [list(e) for e in c.edges]}
            for c in tnsim.decompose(graph)]
    else:
        info["components"] = None
        print("interaction degree exceeds 2; component decomposition skipped",
              file=sys.stderr)
    profile = tnsim.cut_width(instance)
    info["cut_profile"] = {"ordering": list(profile.ordering),
                           "deltas": list(profile.deltas),
                           "max_delta": profile.max_delta,
                           "circuit_cut_width": profile.circuit_cut_width}
    _emit(info)
    return 0


_INPUT_ERRORS = (
    ValueError, KeyError, OSError, json.JSONDecodeError,
    compiler.UnsupportedGate, compiler.InvariantViolated,
    compiler.NonDiagonalResidue, compiler.NotIntegerValued,
    compiler.ZeroMatrixElement, compiler.NoUnitaryW,
    oracle.TooManyQubits, oracle.ExactBackendUnsupportedGate,
    oracle.ZeroPostSelectionProbability, tnsim.DegreeTooHigh,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdich")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a {H, Tdg, CZ} circuit to depth-1 QAOA")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iqp", action="store_true")
    p.add_argument("--monotone", action="store_true")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("marginal", help="exact marginal of a degree-2 instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--subset", default="")
    p.add_argument("--outcome", default="")
    p.set_defaults(func=_cmd_marginal)

    p = sub.add_parser("sample", help="exact chain-rule sampling")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("oracle", help="post-selected output distribution")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--backend", choices=("exact", "float"), default="float")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gadget", help="solve the diagonal coupling for a gate F")
    p.add_argument("--F", dest="f", required=True,
                   help="name (H, Htilde, Tdg, xrot:<radians>) or JSON matrix")
    p.add_argument("--lambda-phase", dest="lambda_phase", type=float, default=0.0)
    p.set_defaults(func=_cmd_gadget)

    p = sub.add_parser("verify", help="compile and compare against the oracle")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.add_argument("--iqp", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("graph-info", help="components, degrees, and cut profile")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_graph_info)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        return args.func(args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # internal invariant failure
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
