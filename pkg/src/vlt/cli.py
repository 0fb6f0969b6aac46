"""Command line interface.

    vlt transfer --target A.svg --source B.svg --out out.svg [--auto]
                 [--optimize BUDGET] [--seed N] [--weights weights.json]
                 [--dump-rules rules.json]
    vlt rules design.svg [--json]
    vlt match A.svg B.svg [--json]
    vlt serve [--port PORT]

Exit codes: 0 success, 1 input errors, 2 infeasible commands.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    InfeasibleRule,
    LockedPropertyViolation,
    MinSizeViolation,
    NotAChain,
    UnmatchedElement,
    VltError,
)
from .matching import correspondence_to_json, match_designs
from .optimize import weights_from_json
from .rules import infer_rules, ruleset_to_json
from .session import create_session
from .svgio import parse_design

DEFAULT_PORT = 7342

_INFEASIBLE = (InfeasibleRule, NotAChain, UnmatchedElement, MinSizeViolation, LockedPropertyViolation)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_transfer(args) -> int:
    session = create_session(_read(args.target), _read(args.source))
    if args.weights:
        session.weights = weights_from_json(json.loads(_read(args.weights)))
    if args.auto:
        session.mutate({"type": "global-copy"})
    if args.optimize is not None:
        session.mutate({"type": "optimize", "budget": args.optimize, "seed": args.seed})
    Path(args.out).write_bytes(session.export_svg())
    if args.dump_rules:
        doc = {
            "target": ruleset_to_json(session.rules_a),
            "source": ruleset_to_json(session.rules_b),
            "output": ruleset_to_json(session.rules_a_star),
        }
        Path(args.dump_rules).write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return 0


def _format_rule(rule: dict) -> str:
    extra = ",".join(f"{k}={v}" for k, v in rule["params"].items() if k != "tree")
    extra = f" [{extra}]" if extra else ""
    return f"{rule['variant']}{extra}: {' '.join(rule['members'])}"


def _cmd_rules(args) -> int:
    design, _ = parse_design(_read(args.design))
    rules = ruleset_to_json(infer_rules(design))
    if args.json:
        print(json.dumps(rules, indent=2))
    else:
        for rule in rules["rules"]:
            print(_format_rule(rule))
    return 0


def _cmd_match(args) -> int:
    a, _ = parse_design(_read(args.a))
    b, _ = parse_design(_read(args.b))
    mapping = correspondence_to_json(match_designs(a, b))
    if args.json:
        print(json.dumps(mapping, indent=2))
    else:
        for pair in mapping["pairs"]:
            print(f"{pair['a']} -> {pair['b']}  ({pair['score']:.3f})")
        for eid in mapping["unmatchedA"]:
            print(f"{eid} -> (unmatched)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import app

    port = args.port or int(os.environ.get("VLT_PORT", DEFAULT_PORT))
    uvicorn.run(app, host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlt", description="Vector graphics layout transfer")
    sub = parser.add_subparsers(dest="command", required=True)

    transfer = sub.add_parser("transfer", help="transfer a source layout onto a target design")
    transfer.add_argument("--target", required=True, help="design to transform (A)")
    transfer.add_argument("--source", required=True, help="reference design (B)")
    transfer.add_argument("--out", required=True, help="output SVG path")
    transfer.add_argument("--auto", action="store_true", help="apply the global layout copy")
    transfer.add_argument("--optimize", type=int, metavar="BUDGET", help="run the reward optimizer")
    transfer.add_argument("--seed", type=int, default=0)
    transfer.add_argument("--weights", help="weight config JSON file")
    transfer.add_argument("--dump-rules", help="write inferred rule sets to this JSON file")
    transfer.set_defaults(func=_cmd_transfer)

    rules = sub.add_parser("rules", help="print the rules inferred from one design")
    rules.add_argument("design")
    rules.add_argument("--json", action="store_true")
    rules.set_defaults(func=_cmd_rules)

    match = sub.add_parser("match", help="print the element correspondence of two designs")
    match.add_argument("a")
    match.add_argument("b")
    match.add_argument("--json", action="store_true")
    match.set_defaults(func=_cmd_match)

    serve = sub.add_parser("serve", help="start the HTTP gateway")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, help=f"default $VLT_PORT or {DEFAULT_PORT}")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INFEASIBLE as exc:
        print(f"vlt: infeasible: {exc}", file=sys.stderr)
        return 2
    except (VltError, OSError, json.JSONDecodeError) as exc:
        print(f"vlt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
