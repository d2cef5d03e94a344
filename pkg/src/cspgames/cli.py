"""Command-line surface: JSON in, JSON out, scriptable exit codes.

Exit codes: 0 = success or affirmative answer, 1 = definitive negative (no
homomorphism, imperfect strategy, rejected membership, ...), 2 = usage or
validation error, 3 = a configured resource cap was hit.  Structures,
strategies, and PVMs travel as JSON given inline, as a file path, or as "-"
for standard input.  Randomized commands default to seed 0.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import CapExceededError
from .games import (
    alice_strategy_from_hom,
    bob_strategy_from_hom,
    brute_force_search,
    strategy_from_json,
    strategy_to_json_dict,
    verify_perfect,
)
from .geometry import (
    build_sphere_coloring,
    check_frame_adjacency,
    is_frame,
    sample_adjacent_frames,
)
from .patterns import (
    central_vertices,
    chromatic_number,
    clique_into_alice_power,
    clique_into_alice_power_digraph,
    complete_into_bob_power,
    complete_structure,
    covering_array,
    pattern_of,
)
from .powers import alice_power, bob_power
from .quantum import (
    equality_experiment,
    pvm_from_json_dict,
    quantum_relation_membership,
    quantum_strategy_from_json,
    validate_pvm,
    verify_perfect_quantum,
)
from .structures import (
    Homomorphism,
    RelationalStructure,
    are_isomorphic,
    core_of,
    find_homomorphism,
    is_homomorphism,
)
from . import demos


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    if source.lstrip()[:1] in ("{", "["):
        return source
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def load_structure(source: str) -> RelationalStructure:
    """Structure from a file path, inline JSON, or '-' for stdin."""
    return RelationalStructure.from_json(_read_text(source))


def _emit(data) -> None:
    print(json.dumps(data, indent=2, default=str))


def _counterexample_dict(c) -> dict:
    return {
        "symbol": c.symbol,
        "alice_question": list(c.alice_question),
        "bob_question": c.bob_question,
        "alice_answer": list(c.alice_answer),
        "bob_answer": c.bob_answer,
        "reason": c.reason,
    }


def _cmd_hom(args) -> int:
    x = load_structure(args.source)
    y = load_structure(args.target)
    if args.action == "find":
        h = find_homomorphism(x, y)
        if h is None:
            _emit({"homomorphism": None})
            return 1
        _emit({"homomorphism": list(h.mapping)})
        return 0
    if args.map is None:
        raise SystemExit2("check needs --map")
    mapping = tuple(json.loads(_read_text(args.map)))
    ok = is_homomorphism(mapping, x, y)
    _emit({"is_homomorphism": ok})
    return 0 if ok else 1


def _cmd_core(args) -> int:
    x = load_structure(args.source)
    _emit(core_of(x).to_json_dict())
    return 0


def _cmd_iso(args) -> int:
    x = load_structure(args.source)
    y = load_structure(args.target)
    ok = are_isomorphic(x, y)
    _emit({"isomorphic": ok})
    return 0 if ok else 1


def _cmd_power(args) -> int:
    y = load_structure(args.source)
    build = alice_power if args.mode == "alice" else bob_power
    _emit(build(y, args.k).to_json_dict())
    return 0


def _cmd_pattern(args) -> int:
    if args.action == "covering-array":
        arr = covering_array(args.n, args.strength, tuple(range(args.q)), seed=args.seed)
        if args.csv:
            print(arr.to_csv(), end="")
        else:
            _emit({"rows": arr.rows, "strength": arr.strength,
                   "alphabet": list(arr.alphabet), "width": arr.width,
                   "columns": [list(c) for c in arr.columns]})
        return 0
    if args.source is None:
        raise SystemExit2(f"pattern {args.action} needs a structure argument")
    y = load_structure(args.source)
    if args.action == "show":
        _emit(pattern_of(y).to_json_dict())
        return 0
    if args.action == "complete":
        _emit(complete_structure(args.n, pattern_of(y)).to_json_dict())
        return 0
    if args.action == "chromatic":
        _emit({"chromatic_number": chromatic_number(y)})
        return 0
    central = central_vertices(y)
    _emit({"central_vertices": list(central)})
    return 0 if central else 1


def _cmd_embed(args) -> int:
    y = load_structure(args.source)
    if args.action == "clique-alice":
        k, h = clique_into_alice_power(y, args.n, seed=args.seed)
        _emit({"k": k, "tuples": [list(h.target.tuple_of(v)) for v in h.mapping]})
        return 0
    if args.action == "clique-alice-digraph":
        k, h = clique_into_alice_power_digraph(y, args.m)
        _emit({"k": k, "tuples": [list(h.target.tuple_of(v)) for v in h.mapping]})
        return 0
    result = complete_into_bob_power(y, args.n)
    if result is None:
        _emit({"k": None, "reason": "no central vertex"})
        return 1
    k, h = result
    _emit({"k": k, "mapping": list(h.mapping)})
    return 0


def _cmd_game(args) -> int:
    x = load_structure(args.source)
    y = load_structure(args.target)
    if args.action == "verify":
        if args.strategy is None:
            raise SystemExit2("verify needs --strategy")
        strategy = strategy_from_json(_read_text(args.strategy))
        verdict = verify_perfect(x, y, strategy)
        if verdict.perfect:
            _emit({"perfect": True})
            return 0
        _emit({"perfect": False, "counterexample": _counterexample_dict(verdict.counterexample)})
        return 1
    if args.action == "synth":
        mapping = tuple(json.loads(_read_text(args.map)))
        if args.variant == "alice":
            h = Homomorphism(x, alice_power(y, args.k), mapping)
            strategy = alice_strategy_from_hom(h, x, y, args.k)
        elif args.variant == "bob":
            h = Homomorphism(x, bob_power(y, args.k), mapping)
            strategy = bob_strategy_from_hom(h, x, y, args.k)
        else:
            raise SystemExit2("synth needs --variant alice or bob")
        _emit(strategy_to_json_dict(strategy))
        return 0
    strategy = brute_force_search(x, y, variant=args.variant, k=args.k)
    if strategy is None:
        _emit({"strategy": None})
        return 1
    _emit(strategy_to_json_dict(strategy))
    return 0


def _cmd_quantum(args) -> int:
    if args.action == "validate":
        if args.pvm is None:
            raise SystemExit2("validate needs --pvm")
        pvm = pvm_from_json_dict(json.loads(_read_text(args.pvm)))
        v = validate_pvm(pvm, tol=args.tol)
        _emit({
            "ok": v.ok,
            "hermitian_residual": v.hermitian_residual,
            "idempotency_residual": v.idempotency_residual,
            "orthogonality_residual": v.orthogonality_residual,
            "completeness_residual": v.completeness_residual,
        })
        return 0 if v.ok else 1
    if args.action == "member":
        if args.source is None or args.pvms is None:
            raise SystemExit2("member needs a structure and --pvms")
        y = load_structure(args.source)
        name = args.symbol or y.signature.names[0]
        pvms = tuple(pvm_from_json_dict(d) for d in json.loads(_read_text(args.pvms)))
        joint = quantum_relation_membership(pvms, y.relation(name), tol=args.tol)
        if joint is None:
            _emit({"member": False})
            return 1
        _emit({"member": True, "support": [list(t) for t in joint.outcomes]})
        return 0
    if args.action == "verify":
        if args.source is None or args.target is None or args.strategy is None:
            raise SystemExit2("verify needs source, target, and --strategy")
        x = load_structure(args.source)
        y = load_structure(args.target)
        strategy = quantum_strategy_from_json(_read_text(args.strategy))
        verdict = verify_perfect_quantum(x, y, strategy, tol=args.tol)
        if verdict.perfect:
            _emit({"perfect": True})
            return 0
        _emit({"perfect": False, "counterexample": _counterexample_dict(verdict.counterexample)})
        return 1
    stats = equality_experiment(args.d, args.outcomes, args.trials, seed=args.seed, tol=args.tol)
    _emit(stats)
    clean = stats["false_certifications"] == 0 and stats["missed_equalities"] == 0
    return 0 if clean else 1


def _cmd_geom(args) -> int:
    if args.action == "color-sphere":
        kwargs = {"seed": args.seed, "mode": args.mode}
        if args.theta is not None:
            kwargs["theta"] = args.theta
        coloring = build_sphere_coloring(args.dim, **kwargs)
        _emit(coloring.to_json_dict())
        return 0
    reports = []
    all_ok = True
    for i in range(args.count):
        m, mp, nmat = sample_adjacent_frames(args.n, args.d, seed=args.seed + i)
        ok = bool(
            is_frame(m, args.tol).ok
            and is_frame(mp, args.tol).ok
            and is_frame(nmat, args.tol).ok
            and check_frame_adjacency(m, mp, nmat, args.tol)
        )
        all_ok = all_ok and ok
        entry = {"seed": args.seed + i, "ok": ok}
        if args.audit:
            entry["frame"] = [[[v.real, v.imag] for v in row] for row in np.asarray(m)]
        reports.append(entry)
    _emit({"count": args.count, "all_ok": all_ok, "frames": reports})
    return 0 if all_ok else 1


def _cmd_demo(args) -> int:
    if args.all:
        reports = demos.run_all()
        _emit(reports)
        return 0 if all(r["ok"] for r in reports) else 1
    if args.name is None:
        raise SystemExit2("demo requires a name or --all")
    report = demos.run_demo(args.name)
    _emit(report)
    return 0 if report["ok"] else 1


class SystemExit2(Exception):
    """Usage error raised past argparse (unknown demo, malformed JSON, ...)."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspgames",
        description="Two-prover CSP games: homomorphisms, channel powers, "
        "covering arrays, quantum strategies, sphere colorings.",
    )
    parser.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", help="find or check homomorphisms")
    p.add_argument("action", choices=["find", "check"])
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", help="vertex map as a JSON list (for check)")
    p.set_defaults(fn=_cmd_hom)

    p = sub.add_parser("core", help="compute the core")
    p.add_argument("source")
    p.set_defaults(fn=_cmd_core)

    p = sub.add_parser("iso", help="isomorphism test")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(fn=_cmd_iso)

    p = sub.add_parser("power", help="materialize a channel power")
    p.add_argument("mode", choices=["alice", "bob"])
    p.add_argument("source")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=_cmd_power)

    p = sub.add_parser("pattern", help="pattern calculus and covering arrays")
    p.add_argument(
        "action",
        choices=["show", "complete", "chromatic", "central", "covering-array"],
    )
    p.add_argument("source", nargs="?", help="structure (not used by covering-array)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--strength", type=int, default=2)
    p.add_argument("--q", type=int, default=2, help="alphabet size for covering-array")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", action="store_true", help="emit covering array as CSV")
    p.set_defaults(fn=_cmd_pattern)

    p = sub.add_parser("embed", help="clique and complete-structure embeddings")
    p.add_argument("action", choices=["clique-alice", "clique-alice-digraph", "complete-bob"])
    p.add_argument("source")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_embed)

    p = sub.add_parser("game", help="classical strategies")
    p.add_argument("action", choices=["verify", "synth", "brute"])
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--strategy", help="strategy JSON (for verify)")
    p.add_argument("--map", help="homomorphism into the power, JSON list (for synth)")
    p.add_argument(
        "--variant", "--direction", dest="variant",
        choices=["none", "alice", "bob"], default="none",
    )
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(fn=_cmd_game)

    p = sub.add_parser("quantum", help="projective strategies and certificates")
    p.add_argument("action", choices=["validate", "member", "verify", "equality-experiment"])
    p.add_argument("source", nargs="?")
    p.add_argument("target", nargs="?")
    p.add_argument("--pvm", help="PVM JSON (for validate)")
    p.add_argument("--pvms", help="JSON list of PVMs (for member)")
    p.add_argument("--symbol", help="relation symbol (default: first in signature)")
    p.add_argument("--strategy", help="quantum strategy JSON (for verify)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--outcomes", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_quantum)

    p = sub.add_parser("geom", help="frames and sphere colorings")
    p.add_argument("action", choices=["color-sphere", "frames"])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--mode", choices=["certified", "statistical"], default=None)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--audit", action="store_true", help="include sampled frames in output")
    p.set_defaults(fn=_cmd_geom)

    p = sub.add_parser("demo", help="run a named reproduction, or all of them")
    p.add_argument("name", nargs="?")
    p.add_argument("--all", action="store_true")
    p.set_defaults(fn=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceededError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except (SystemExit2, KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
