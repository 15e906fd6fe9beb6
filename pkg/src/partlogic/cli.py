"""Command-line interface: ``partlogic <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (a JSON object describing
it goes to stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import polytope, quantum, states, urn
from .diagram import DiagramError, bell_number, load_diagram, validate

__all__ = ["main"]


class DomainError(Exception):
    pass


def _f17(x: float) -> str:
    text = format(float(x), ".17g")
    # keep floats recognisable: 2.0 prints as "2.0", not "2"
    return text if any(ch in text for ch in ".eni") else text + ".0"


def _q(x) -> str:
    return str(Fraction(x))


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _states(args, diagram=None):
    diagram = diagram or load_diagram(args.diagram)
    return states.enumerate_states(diagram, max_nodes=args.max_nodes, workers=getattr(args, "workers", 1))


def _labels_text(logic: states.PartitionLogic) -> str:
    lines = []
    for blocks in logic.contexts():
        # blocks sorted by least element; the JSON form keeps the atom mapping
        blocks = sorted((sorted(b) for b in blocks), key=lambda b: b[0])
        lines.append("{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in blocks) + "}")
    return "\n".join(lines)


# --- subcommands: each returns (json-able dict, text) -------------------------


def cmd_validate(args):
    diagram = load_diagram(args.diagram, check=False)
    problems = validate(diagram)
    result = {"valid": not problems, "violations": [v.to_dict() for v in problems]}
    text = "valid" if not problems else "\n".join(f"{v.kind}: {v.message}" for v in problems)
    return result, text, 0 if not problems else 1


def cmd_states(args):
    ss = _states(args)
    if args.count_only:
        return {"count": len(ss)}, str(len(ss)), 0
    result = {"atoms": list(ss.diagram.atoms), "count": len(ss), "states": [list(s) for s in ss]}
    text = f"{len(ss)} two-valued states over {' '.join(ss.diagram.atoms)}\n" + "\n".join(
        " ".join(map(str, s)) for s in ss
    )
    return result, text.rstrip("\n"), 0


def cmd_partition(args):
    ss = _states(args)
    logic = states.build_partition_logic(ss)
    result = logic.to_dict()
    text = _labels_text(logic)
    code = 0
    if args.expect:
        expected = states.partition_logic_from_json(_read(args.expect), ss.diagram)
        iso = states.find_isomorphism(logic, expected)
        result["expect"] = {"path": args.expect, "isomorphic": iso is not None}
        if iso is not None:
            result["expect"]["bijection"] = {str(k): v for k, v in sorted(iso.items())}
        text += f"\nisomorphic to {args.expect}: {'yes' if iso is not None else 'NO'}"
        code = 0 if iso is not None else 1
    return result, text, code


def cmd_separable(args):
    ss = _states(args)
    sep = states.is_separating(ss)
    result = {"separating": sep.separating, "witness": list(sep.witness) if sep.witness else None,
              "reason": sep.reason, "states": len(ss)}
    text = "separating" if sep else f"not separating: {sep.witness[0]} and {sep.witness[1]} ({sep.reason})"
    return result, text, 0


def cmd_implies(args):
    ss = _states(args)
    try:
        implied = states.true_implies_true(ss, args.atom)
    except (states.VacuousImplication, KeyError) as exc:
        raise DomainError(exc.args[0] if isinstance(exc, KeyError) else str(exc)) from exc
    order = [a for a in ss.diagram.atoms if a in implied]
    return {"target": args.atom, "implied": order, "count": len(order)}, " ".join(order) or "(none)", 0


def _weight(args, diagram):
    return states.parse_weight(_read(args.weight), diagram.atoms)


def cmd_check_weight(args):
    diagram = load_diagram(args.diagram)
    w = _weight(args, diagram)
    res = states.check_weight(diagram, w)
    text = "admissible" if res else "inadmissible\n" + "\n".join(res.violations)
    return {"admissible": res.admissible, "violations": list(res.violations)}, text, 0


def cmd_hull_member(args):
    diagram = load_diagram(args.diagram)
    ss = _states(args, diagram)
    w = _weight(args, diagram)
    chk = states.check_weight(diagram, w)
    if not chk:
        raise DomainError("inadmissible weight: " + "; ".join(chk.violations))
    cert = polytope.hull_membership(ss, w)
    atoms = diagram.atoms
    if cert.member:
        result = {"admissible": True, "member": True,
                  "coefficients": [{"state": list(s), "mu": _q(mu)} for s, mu in cert.coefficients]}
        text = "admissible, in hull\n" + "\n".join(
            f"{_q(mu)} * [{' '.join(map(str, s))}]" for s, mu in cert.coefficients
        )
    else:
        ineq = cert.separating
        value = ineq.value(w)
        result = {"admissible": True, "member": False, "separating": ineq.to_dict(atoms), "value": _q(value)}
        text = f"admissible, NOT in hull, violated inequality: {ineq.format(atoms)} (value {_q(value)})"
    return result, text, 0


def cmd_facets(args):
    ss = _states(args)
    try:
        poly = polytope.enumerate_facets(ss)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    atoms = ss.diagram.atoms
    result = {
        "dimension": poly.dimension,
        "vertices": len(poly.vertices),
        "equalities": [e.to_dict(atoms) for e in poly.equalities()],
        "facets": [f.to_dict(atoms) for f in poly.facets],
    }
    lines = [f"dimension {poly.dimension}, {len(poly.vertices)} vertices, {len(poly.facets)} facets"]
    lines += [f.format(atoms) for f in poly.facets]
    if args.lifted:
        result["lifted"] = [polytope.lift_nonnegative(ss.diagram, f).to_dict(atoms) for f in poly.facets]
        lines.append("lifted to nonnegative coefficients:")
        lines += [polytope.lift_nonnegative(ss.diagram, f).format(atoms) for f in poly.facets]
    return result, "\n".join(lines), 0


def _state_vector(spec: str, tolerance: float):
    try:
        comps = [float(x) for x in spec.split(",")]
    except ValueError as exc:
        raise DomainError(f"bad state vector {spec!r}") from exc
    try:
        return quantum.unit_state(comps, tolerance)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def cmd_bound(args):
    diagram = load_diagram(args.diagram)
    f, _ = polytope.load_functional(_read(args.functional))
    ss = _states(args, diagram)
    if not ss.states:
        raise DomainError("diagram has no two-valued states")
    best, argmax = polytope.classical_max(ss, f)
    result = {"classical": _q(best), "maximizers": len(argmax)}
    lines = [f"classical: {_q(best)}"]
    if args.rep or args.umbrella:
        rep = quantum.pentagon_umbrella_rep(diagram) if args.umbrella else quantum.VectorRep.from_json(_read(args.rep))
        if args.tolerance is not None:
            rep.tolerance = args.tolerance
        c = _state_vector(args.state or ",".join(["1"] + ["0"] * (rep.dimension - 1)), rep.tolerance)
        q = quantum.quantum_value(rep, c, f, diagram.atoms)
        result.update({"quantum": q, "difference": q - float(best)})
        lines += [f"quantum: {_f17(q)}", f"difference: {_f17(q - float(best))}"]
    return result, "\n".join(lines), 0


def cmd_umbrella(args):
    rep = quantum.pentagon_umbrella_rep()
    if args.tolerance is not None:
        rep.tolerance = args.tolerance
    text = rep.to_json(list(rep.vectors))
    return json.loads(text), text, 0


def cmd_check_rep(args):
    diagram = load_diagram(args.diagram)
    rep = quantum.VectorRep.from_json(_read(args.rep))
    if args.tolerance is not None:
        rep.tolerance = args.tolerance
    try:
        report = quantum.check_faithful(diagram, rep)
    except KeyError as exc:
        raise DomainError(exc.args[0] if isinstance(exc, KeyError) else str(exc)) from exc
    result = {
        "faithful": report.faithful,
        "violations": [{"kind": k, "a": a, "b": b, "value": v} for k, a, b, v in report.violations],
    }
    text = "faithful" if report else "not faithful\n" + "\n".join(
        f"{k}: {a} {b} {_f17(v)}" for k, a, b, v in report.violations
    )
    return result, text, 0


def _urn(args):
    return urn.load_urn(_read(args.urn))


def cmd_urn_partition(args):
    u = _urn(args)
    colors = [args.color] if args.color else list(u.colors)
    parts = {c: [list(b) for b in urn.induced_partition(u, c)] for c in colors}
    result = {"partitions": parts}
    lines = [f"{c}: " + "{" + ",".join("{" + ",".join(b) + "}" for b in blocks) + "}" for c, blocks in parts.items()]
    if args.diagram_out:
        diagram, weight = urn.urn_to_diagram(u)
        result["diagram"] = diagram.to_dict()
        result["weight"] = {a: _q(weight[a]) for a in diagram.atoms}
        lines.append("diagram:")
        lines += [" ".join(ctx) for ctx in diagram.contexts]
    return result, "\n".join(lines), 0


def _protocol(spec: str):
    if spec in ("random", "round-robin"):
        return spec
    if ":" in spec:
        a, b = spec.split(":", 1)
        return (a, b)
    raise DomainError(f"unknown protocol {spec!r} (use random, round-robin or ALICE:BOB)")


def cmd_urn_run(args):
    u = _urn(args)
    record = urn.run_experiment(u, _protocol(args.protocol), args.draws, args.seed)
    result = record.to_dict()
    try:
        chsh = urn.chsh_statistic(record, args.variant)
        result["summary"] = chsh.to_dict()
    except urn.UrnError:
        result["summary"] = None
    text = json.dumps(result)
    return result, text, 0


def cmd_urn_chsh(args):
    u = _urn(args)
    exact = urn.chsh_exact(u, args.variant)
    result = {"exact": exact.to_dict()}
    lines = [f"S exact: {_q(exact.S)}"]
    if args.draws:
        record = urn.run_experiment(u, _protocol(args.protocol), args.draws, args.seed)
        emp = urn.chsh_statistic(record, args.variant)
        result["empirical"] = emp.to_dict()
        result["seed"] = args.seed
        lines.append(f"S empirical: {_f17(emp.S)} (n={args.draws}, seed={args.seed})")
        lines += [f"  E({a},{b}) = {_f17(emp.expectations[(a, b)])}  n={emp.counts[(a, b)]}" for a, b in urn.SETTING_PAIRS]
    return result, "\n".join(lines), 0


def cmd_bell(args):
    try:
        b = bell_number(args.n)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    return {"n": args.n, "bell": b}, str(b), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partlogic", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--max-nodes", type=int, default=states.DEFAULT_MAX_NODES)
    search.add_argument("--workers", type=int, default=1)
    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--tolerance", type=float, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, parents=(), **kw):
        p = sub.add_parser(name, parents=[common, *parents], **kw)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, help="check diagram invariants")
    p.add_argument("diagram")
    p = add("states", cmd_states, [search], help="enumerate two-valued states")
    p.add_argument("diagram")
    p.add_argument("--count-only", action="store_true")
    p = add("partition", cmd_partition, [search], help="reconstruct the partition logic")
    p.add_argument("diagram")
    p.add_argument("--expect", help="PartitionLogic JSON to test for isomorphism")
    p = add("separable", cmd_separable, [search], help="test separability by two-valued states")
    p.add_argument("diagram")
    p = add("implies", cmd_implies, [search], help="atoms true whenever ATOM is true")
    p.add_argument("diagram")
    p.add_argument("atom")
    p = add("check-weight", cmd_check_weight, help="test admissibility of a rational weight")
    p.add_argument("diagram")
    p.add_argument("weight")
    p = add("hull-member", cmd_hull_member, [search], help="test membership in the classical polytope")
    p.add_argument("diagram")
    p.add_argument("weight")
    p = add("facets", cmd_facets, [search], help="facets of the classical polytope")
    p.add_argument("diagram")
    p.add_argument("--lifted", action="store_true", help="also print nonnegative lifted forms")
    p = add("bound", cmd_bound, [search, tol], help="classical maximum and quantum value of a functional")
    p.add_argument("diagram")
    p.add_argument("functional")
    p.add_argument("--rep", help="VectorRep JSON")
    p.add_argument("--umbrella", action="store_true", help="use the built-in pentagon umbrella rep")
    p.add_argument("--state", help="comma-separated unit state vector (default e1)")
    p = add("umbrella", cmd_umbrella, [tol], help="pentagon umbrella representation as VectorRep JSON")
    p.set_defaults(raw_json=True)
    p = add("check-rep", cmd_check_rep, [tol], help="test a vector representation for faithfulness")
    p.add_argument("diagram")
    p.add_argument("rep")
    p = add("urn-partition", cmd_urn_partition, help="partitions induced by each color")
    p.add_argument("urn")
    p.add_argument("--color")
    p.add_argument("--diagram", dest="diagram_out", action="store_true", help="also build the pasted diagram")
    for name, func in (("urn-run", cmd_urn_run), ("urn-chsh", cmd_urn_chsh)):
        p = add(name, func, help="run the two-agent urn experiment" if name == "urn-run" else "CHSH statistic")
        p.add_argument("urn")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--draws", type=int, default=1000 if name == "urn-run" else 0)
        p.add_argument("--protocol", default="random")
        p.add_argument("--variant", default="bg", choices=sorted(urn.CHSH_VARIANTS))
    p = add("bell", cmd_bell, help="Bell number B_n")
    p.add_argument("n", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, text, code = args.func(args)
    except (DomainError, DiagramError, states.SearchLimitExceeded, urn.UrnError, ValueError, KeyError,
            OSError, json.JSONDecodeError) as exc:
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        print(json.dumps({"error": type(exc).__name__, "message": msg}), file=sys.stderr)
        return 1
    if args.json and not getattr(args, "raw_json", False):
        print(json.dumps(result, default=_json_default))
    else:
        print(text)
    return code


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(type(x).__name__)


if __name__ == "__main__":
    sys.exit(main())
