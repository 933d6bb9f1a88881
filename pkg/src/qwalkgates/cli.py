"""Command-line interface: ``qwalkgates <subcommand> [options]``.

Exit codes: 0 success, 1 infeasible solver request (or a failed
``verify --strict``), 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .engine import classify_all, classify_return, evolve, integer_spectrum_report, trajectory_csv
from .graphs import WalkGraph, chain_graph, format_label, parse_label
from .register import (
    RegisterModel,
    cavity_sweep,
    group_summary,
    spectrum,
    transition_groups_two_dot,
    translation_splitting,
)
from .solvers import (
    InfeasibleError,
    chain2_family,
    chain3_integer_solutions,
    chain3_solve,
    chain4_integer,
    chain4_solve,
    chain5_family,
    chain5_integer_symmetric,
    chain5_solve,
    euclid_triples,
    fan_family,
    square_solve,
)
from .synthesis import (
    GateName,
    GateSpec,
    PulseSequence,
    Synthesis,
    synth_ccz_single_pulse,
    synth_ccz_three_pulse,
    synth_cz_adjacent,
    synth_cz_next_nearest,
    synth_cz_pi_pulses,
    synth_single_qubit,
)
from .verify import check_closure, gate_unitary

SCHEMA_VERSION = 1

PRESETS = {
    "two-dot": dict(num_dots=2, detuning=10.0, omega_e=1.0, omega_t=1 / 3),
    "three-dot": dict(num_dots=3, detuning=10.0, omega_e=1.0, omega_t=1 / 3),
    "four-dot": dict(num_dots=4, detuning=30.0, omega_e=3.0, omega_t=1.0),
}


class UsageError(ValueError):
    pass


# ----------------------------------------------------------------------
# helpers


def _envelope(command, params, body):
    doc = {"schema_version": SCHEMA_VERSION, "tool": "qwalkgates", "version": __version__,
           "command": command, "parameters": params}
    doc.update(body)
    return doc


def _clean(obj):
    # numpy scalars and complex numbers to plain JSON
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _emit(args, payload, text=None):
    if args.format == "csv" and text is not None:
        out = text
    elif args.format == "pretty":
        out = text if text is not None and not isinstance(payload, dict) else _pretty(payload)
    else:
        out = json.dumps(_clean(payload), indent=2) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(out)
    else:
        Path(args.output).write_text(out)


def _pretty(doc, indent=0):
    lines = []
    pad = "  " * indent
    if isinstance(doc, dict):
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}{k}: {_short(v)}")
    elif isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}-")
                lines.append(_pretty(v, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}- {_short(v)}")
    else:
        lines.append(pad + _short(doc))
    return "\n".join(lines) + "\n"


def _is_flat(v):
    if isinstance(v, dict):
        return set(v) <= {"re", "im"}
    return all(not isinstance(x, (dict, list)) or _is_flat(x) for x in v) and len(v) <= 8


def _short(v):
    v = _clean(v)
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        z = complex(v.get("re", 0.0), v.get("im", 0.0))
        return f"{z.real:+.10g}{z.imag:+.10g}j"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg}") from None


def _load_graph(args):
    if getattr(args, "chain", None):
        return chain_graph([complex(x) for x in args.chain.split(",")])
    if not getattr(args, "graph", None):
        raise UsageError("give --graph FILE or --chain AMPLITUDES")
    doc = _load_json(args.graph)
    g = WalkGraph.from_dict(doc.get("graph", doc))
    if "sequence" in doc:
        # a synthesis file: drive the graph with one of its pulses
        seq = PulseSequence.from_dict(doc["sequence"])
        if not 0 <= args.pulse < len(seq.pulses):
            raise UsageError(f"--pulse {args.pulse} out of range (0..{len(seq.pulses) - 1})")
        g = g.with_amplitudes(seq.pulses[args.pulse].activations)
    return g


def _model(args) -> RegisterModel:
    kw = dict(PRESETS[args.preset])
    for name, key in (("dots", "num_dots"), ("g", "g"), ("delta", "detuning"),
                      ("omega0", "omega0"), ("omega_e", "omega_e"), ("omega_t", "omega_t"),
                      ("truncation", "truncation")):
        v = getattr(args, name)
        if v is not None:
            kw[key] = v
    if args.cavity:
        kw["cavity_frequencies"] = tuple(float(x) for x in args.cavity.split(","))
    kw["restricted"] = args.restricted
    kw["blue_on_even"] = not args.red_on_even
    return RegisterModel(**kw)


def _sets(pairs):
    out = {}
    for p in pairs or []:
        k, sep, v = p.partition("=")
        if not sep:
            raise UsageError(f"--set expects name=value, got {p!r}")
        out[k.strip()] = float(v)
    return out


# ----------------------------------------------------------------------
# subcommands


def cmd_walk(args):
    g = _load_graph(args)
    start = parse_label(args.start)
    g.index(start)
    params = {"start": format_label(start), "samples": args.samples}
    if args.format == "json":
        st = evolve(g, start, args.fraction)
        params["fraction"] = args.fraction
        body = {"nodes": [format_label(n) for n in g.nodes],
                "amplitudes": [complex(a) for a in st.amplitudes]}
        _emit(args, _envelope("walk", params, body))
    else:
        _emit(args, None, trajectory_csv(g, start, args.samples))


def cmd_classify(args):
    g = _load_graph(args)
    rep = integer_spectrum_report(g, args.tol)
    if args.start:
        starts = {parse_label(args.start): classify_return(g, args.start, args.tol)}
    else:
        allc = classify_all(g, args.tol)
        starts = {n: allc[n] for n in (g.boolean_nodes or g.nodes)}
    body = {
        "spectrum": rep.to_dict(),
        "returns": {format_label(n): c.to_dict() for n, c in starts.items()},
    }
    if args.start:
        body["local_spectrum"] = integer_spectrum_report(g, args.tol, parse_label(args.start)).to_dict()
    _emit(args, _envelope("classify", {"tol": args.tol, "start": args.start}, body))


def _family(args):
    f = args.family
    if f == "chain2":
        return chain2_family(args.k if args.k is not None else 2)
    if f == "chain3":
        return chain3_solve(args.n or 1)
    if f == "chain4":
        return chain4_solve(args.n or 3, args.m or 1)
    if f == "chain5":
        return chain5_family(args.n or 4, args.m or 2)
    if f == "fan":
        return fan_family(args.k if args.k is not None else 2, args.spokes)
    if f == "square":
        target = args.target or "Rpi"
        # Rpi needs the non-symmetric branch; R0 without --m takes the symmetric one
        m = args.m if args.m is not None else (1 if target == "Rpi" else None)
        return square_solve(target, complex(args.a1), complex(args.a2), args.n or 3, m)
    raise UsageError(f"unknown family {f}")


def cmd_solve(args):
    params = {k: getattr(args, k) for k in
              ("family", "n", "m", "k", "a", "b", "a1", "a2", "spokes", "target", "count", "seed")}
    fixed = _sets(args.set)
    params["set"] = fixed
    if args.family == "chain5" and args.a is not None and args.b is not None:
        c, d = chain5_solve(args.n or 4, args.m or 2, args.a, args.b)
        rec = {"solver": "chain5", "params": {"n": args.n or 4, "m": args.m or 2},
               "amplitudes": [{"re": x, "im": 0.0} for x in (args.a, args.b, c, d)],
               "predicted": "R0"}
        _emit(args, _envelope("solve", params, {"solutions": [rec]}))
        return
    if args.family == "chain4" and args.a is not None:
        fixed.setdefault("a", args.a)
    fam = _family(args)
    unknown = set(fixed) - set(fam.free_parameters)
    if unknown:
        raise UsageError(f"{args.family} has no free parameter(s) {sorted(unknown)}")
    records = []
    if not args.random:
        # one deterministic representative: zero phases, midpoint magnitudes
        vals = {k: 0.0 if k.startswith("phi") else 0.5 * (lo + hi)
                for k, (lo, hi) in fam.free_parameters.items()}
        vals.update(fixed)
        samples = [vals]
    else:
        rng = np.random.default_rng(args.seed)
        samples = []
        for _ in range(1000 * args.count):
            vals = dict(fam.sample(rng), **fixed)
            try:
                fam.evaluate(**vals)
            except InfeasibleError:
                continue
            samples.append(vals)
            if len(samples) == args.count:
                break
        else:
            raise InfeasibleError("no feasible member found for the requested family", "family")
    for vals in samples:
        rec = fam.record(**vals)
        rec["residual"] = fam.residual(**vals)
        rec["graph"] = fam.graph(**vals).to_dict()
        records.append(rec)
    params["free_parameters"] = {k: list(v) for k, v in fam.free_parameters.items()}
    _emit(args, _envelope("solve", params, {"solutions": records}))


def cmd_enumerate(args):
    f = args.family
    params = {"family": f, "n": args.n, "limit": args.limit}
    if f == "pythagorean":
        rows = [{"legs": [a, b], "hypotenuse": c, "chain3": [2 * a, 2 * b], "n": c}
                for a, b, c in euclid_triples(args.limit)]
    elif f == "chain3":
        if not args.n:
            raise UsageError("enumerate chain3 needs --n")
        rows = [{"a": a, "b": b} for a, b in chain3_integer_solutions(args.n)]
    elif f == "chain4-integer":
        rows = []
        for a in range(2, args.limit + 1):
            try:
                rows.append({"amplitudes": list(chain4_integer(a)), "n": a * a, "m": 1})
            except InfeasibleError as exc:
                rows.append({"a": a, "rejected": str(exc)})
    elif f == "chain5-symmetric":
        rows = []
        for n in range(4, args.limit + 1, 2):
            for m in range(2, n, 2):
                rows.append({"n": n, "m": m, "amplitudes": list(chain5_integer_symmetric(n, m))})
    else:
        raise UsageError(f"unknown family {f}")
    _emit(args, _envelope("enumerate", params, {"rows": rows}))


def _synthesize(args) -> Synthesis:
    gate = args.gate
    if gate == "z":
        return synth_single_qubit(GateSpec(1, GateName.Z))
    if gate == "swap":
        return synth_single_qubit(GateSpec(1, GateName.SWAP_PHASE, phi=args.phi))
    if gate == "hadamard":
        return synth_single_qubit(GateSpec(1, GateName.HADAMARD))
    if gate == "cz":
        method = args.method or "square"
        if method == "pi-pulses":
            return synth_cz_pi_pulses()
        if method == "square":
            return synth_cz_adjacent("square", n1=args.n1 or 2, n2=args.n2 if args.n2 is not None else 2,
                                     m=args.m or 1, n=args.n or 3, phi_i=args.phi_i, phi_ii=args.phi_ii)
        if method == "chain":
            return synth_cz_adjacent("chain", n1=args.n1 or 3, m=args.m or 2, n=args.n or 4)
        raise UsageError(f"cz supports methods square, chain, pi-pulses; got {method}")
    if gate == "cz-nn":
        return synth_cz_next_nearest(args.m or 1, args.n or 3, args.k or 2)
    if gate == "ccz":
        method = args.method or "three-pulse"
        if method == "three-pulse":
            return synth_ccz_three_pulse(args.state or "111")
        if method == "single-pulse":
            return synth_ccz_single_pulse(args.n or 1, args.m or 2, args.m_prime or 2,
                                          args.k or 4, args.k_prime or 2,
                                          free_phases=(args.phi_i, args.phi_ii if args.phi_ii_set else math.pi))
        raise UsageError(f"ccz supports methods three-pulse, single-pulse; got {method}")
    raise UsageError(f"unknown gate {gate}")


def cmd_synth(args):
    args.phi_ii_set = args.phi_ii is not None
    args.phi_ii = args.phi_ii or 0.0
    syn = _synthesize(args)
    doc = syn.to_dict()
    doc.update({"tool": "qwalkgates", "version": __version__, "command": "synth"})
    doc["parameters"] = dict(doc["parameters"], gate=args.gate, method=args.method, state=args.state)
    _emit(args, doc)


def _target(args, doc_spec, num_qubits):
    if args.target in (None, "auto"):
        return doc_spec
    if args.target == "none":
        return None
    name = {"z": GateName.Z, "swap": GateName.SWAP_PHASE, "hadamard": GateName.HADAMARD,
            "cz": GateName.CZ, "ccz": GateName.CCZ}[args.target]
    if args.minus:
        minus = tuple(args.minus.split(","))
    elif doc_spec is not None and doc_spec.name is name and doc_spec.num_qubits == num_qubits:
        minus = doc_spec.minus_states
    else:
        minus = ()
    return GateSpec(num_qubits, name, minus, args.phi)


def cmd_verify(args):
    doc = _load_json(args.pulses)
    if "sequence" in doc:
        seq = PulseSequence.from_dict(doc["sequence"])
    elif "pulses" in doc:
        seq = PulseSequence.from_dict(doc)
    else:
        raise UsageError(f"{args.pulses} holds no pulse sequence")
    if args.graph:
        gdoc = _load_json(args.graph)
        graph = WalkGraph.from_dict(gdoc.get("graph", gdoc))
    elif "graph" in doc:
        graph = WalkGraph.from_dict(doc["graph"])
    else:
        raise UsageError("pulse file has no graph; pass --graph FILE")
    spec = GateSpec.from_dict(doc["gate"]) if "gate" in doc else None
    nq = len(graph.boolean_nodes).bit_length() - 1
    target = _target(args, spec, nq)
    try:
        rep = gate_unitary(graph, seq, target, args.tol)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    closure = check_closure(rep, args.tol)
    fid = rep.dressed_fidelity if rep.dressed_fidelity is not None else float("nan")
    passed = closure.passed and (target is None or fid >= 1 - args.tol)
    body = rep.to_dict()
    body.update({"closure": {"passed": closure.passed, "leakage": closure.leakage},
                 "passed": passed, "command": "verify", "tool": "qwalkgates",
                 "parameters": {"pulses": str(args.pulses), "target": args.target,
                                "tol": args.tol, "minus": args.minus}})
    _emit(args, body)
    if args.strict and not passed:
        return 1
    return 0


def cmd_spectrum(args):
    model = _model(args)
    params = model.to_dict()
    body = {}
    if args.groups:
        groups = transition_groups_two_dot(model)
        body["groups"] = {k: [{"name": n, "value": v} for n, v in vals] for k, vals in groups.items()}
        body["summary"] = group_summary(groups)
    elif args.splitting:
        body["translation_splitting"] = translation_splitting(model)
    else:
        states = args.states.split(",") if args.states else None
        table = spectrum(model, states=states)
        body["spectrum"] = table.to_dict()
    if args.format == "csv" and "spectrum" in body:
        s = body["spectrum"]
        lines = ["energy,label,overlap"] + [
            f"{e!r},{lab},{o!r}" for e, lab, o in zip(s["energies"], s["labels"], s["overlaps"])
        ]
        _emit(args, None, "\n".join(lines) + "\n")
        return
    _emit(args, _envelope("spectrum", params, body))


def cmd_sweep(args):
    model = _model(args)
    if args.values:
        values = [float(x) for x in args.values.split(",")]
    else:
        lo = args.start if args.start is not None else model.omega0 - model.detuning
        hi = args.stop if args.stop is not None else model.omega0 + 2 * model.detuning
        values = list(np.linspace(lo, hi, args.points))
    quantities = args.quantity or None
    res = cavity_sweep(model, values, quantities, locked=not args.unlocked, workers=args.workers)
    res.manifest["parameters"] = {"values": values, "quantities": quantities,
                                  "locked": not args.unlocked}
    if args.format == "json":
        _emit(args, _envelope("sweep", res.manifest, {"rows": res.rows}))
        return
    _emit(args, None, res.to_csv())
    manifest_path = args.manifest
    if manifest_path is None and args.output not in (None, "-"):
        manifest_path = str(args.output) + ".manifest.json"
    if manifest_path:
        Path(manifest_path).write_text(res.manifest_json(indent=2) + "\n")


# ----------------------------------------------------------------------
# parser


def _model_options(p):
    p.add_argument("--preset", choices=sorted(PRESETS), default="two-dot")
    p.add_argument("--dots", type=int)
    p.add_argument("--g", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--omega-e", dest="omega_e", type=float)
    p.add_argument("--omega-t", dest="omega_t", type=float)
    p.add_argument("--truncation", type=int)
    p.add_argument("--cavity", help="comma-separated cavity frequencies")
    p.add_argument("--restricted", action="store_true",
                   help="one transition type per cavity mode")
    p.add_argument("--red-on-even", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalkgates",
        description="Synthesize and verify quantum-walk gates; run register spectra.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv", "pretty"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", parents=[common], help="walk trajectory from a start node")
    p.add_argument("--graph")
    p.add_argument("--chain", help="comma-separated chain amplitudes instead of --graph")
    p.add_argument("--pulse", type=int, default=0, help="pulse index when --graph is a synthesis file")
    p.add_argument("--start", required=True)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--fraction", type=float, default=1.0)
    p.set_defaults(func=cmd_walk, default_format="csv")

    p = sub.add_parser("classify", parents=[common], help="return classes and spectrum parity")
    p.add_argument("--graph")
    p.add_argument("--chain")
    p.add_argument("--pulse", type=int, default=0, help="pulse index when --graph is a synthesis file")
    p.add_argument("--start")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_classify, default_format="json")

    p = sub.add_parser("solve", parents=[common], help="closed-form return-walk amplitudes")
    p.add_argument("--family", required=True,
                   choices=("chain2", "chain3", "chain4", "chain5", "fan", "square"))
    for name in ("n", "m", "k"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--a1", type=complex, default=2)
    p.add_argument("--a2", type=complex, default=2)
    p.add_argument("--spokes", type=int, default=3)
    p.add_argument("--target", choices=("R0", "Rpi"))
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="fix a free parameter (repeatable)")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--random", action="store_true", help="sample free parameters")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve, default_format="json")

    p = sub.add_parser("enumerate", parents=[common], help="integer solution catalogs")
    p.add_argument("--family", required=True,
                   choices=("pythagorean", "chain3", "chain4-integer", "chain5-symmetric"))
    p.add_argument("--n", type=int)
    p.add_argument("--limit", type=int, default=30)
    p.set_defaults(func=cmd_enumerate, default_format="json")

    p = sub.add_parser("synth", parents=[common], help="pulse sequence for a named gate")
    p.add_argument("--gate", required=True, choices=("z", "swap", "hadamard", "cz", "cz-nn", "ccz"))
    p.add_argument("--method", choices=("square", "chain", "pi-pulses", "single-pulse", "three-pulse"))
    p.add_argument("--state", help="target basis state for the three-pulse CCZ")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--phi-i", dest="phi_i", type=float, default=0.0)
    p.add_argument("--phi-ii", dest="phi_ii", type=float)
    for name in ("n", "m", "k", "n1", "n2"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--m-prime", dest="m_prime", type=int)
    p.add_argument("--k-prime", dest="k_prime", type=int)
    p.set_defaults(func=cmd_synth, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="gate report for a pulse sequence")
    p.add_argument("--pulses", required=True)
    p.add_argument("--graph")
    p.add_argument("--target", choices=("auto", "none", "z", "swap", "hadamard", "cz", "ccz"),
                   default="auto")
    p.add_argument("--minus", help="comma-separated basis states carrying -1")
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--strict", action="store_true", help="exit 1 when the gate fails")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("spectrum", parents=[common], help="dot-cavity register spectrum")
    _model_options(p)
    p.add_argument("--states", help="only blocks containing these states, e.g. 1010;100")
    p.add_argument("--groups", action="store_true", help="two-dot transition groups")
    p.add_argument("--splitting", action="store_true", help="four-dot translation splitting")
    p.set_defaults(func=cmd_spectrum, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="cavity-frequency sweep to CSV")
    _model_options(p)
    p.add_argument("--values", help="comma-separated first-cavity frequencies")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--quantity", action="append",
                   help="difference like 200,000-202,002 or group_i_max (repeatable)")
    p.add_argument("--unlocked", action="store_true")
    p.add_argument("--workers", type=int, help="evaluate sweep points on this many threads")
    p.add_argument("--manifest", help="manifest path (default <output>.manifest.json)")
    p.set_defaults(func=cmd_sweep, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    try:
        return int(args.func(args) or 0)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
