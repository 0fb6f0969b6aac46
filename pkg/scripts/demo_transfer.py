#!/usr/bin/env python3
"""End-to-end demo on the bundled design pair.

Loads the poster pair, copies the source layout onto the target, runs the
reward optimizer, and writes the exported SVG plus the optimizer trace
next to this script (under ./demo-out/).
"""

import json
from pathlib import Path

from vlt.optimize import trace_to_csv
from vlt.rules import ruleset_to_json
from vlt.session import breakdown_to_json, create_session

ROOT = Path(__file__).resolve().parent.parent
PAIR = ROOT / "tests" / "assets" / "pairs" / "pair2"
OUT = Path(__file__).resolve().parent / "demo-out"


def main():
    session = create_session(PAIR.joinpath("a.svg").read_text(), PAIR.joinpath("b.svg").read_text())
    print(f"target elements: {len(session.design_a.elements)}; "
          f"source elements: {len(session.design_b.elements)}")
    print(f"matched pairs: {[(p.a, p.b) for p in session.mapping.pairs]}")
    print(f"target rules: {len(session.rules_a)}; source rules: {len(session.rules_b)}")

    session.mutate({"type": "global-copy"})
    print("\nafter global layout copy:")
    for e in session.a_star.elements:
        g = e.geometry
        print(f"  {e.id}: ({g.x:g}, {g.y:g}) {g.w:g}x{g.h:g} z={g.z}")

    result = session.mutate({"type": "optimize", "budget": 200, "seed": 0})
    trace = result["trace"]
    print(f"\noptimizer: {len(trace) - 1} accepted moves, "
          f"reward {trace[0]['total']:.4f} -> {trace[-1]['total']:.4f}")
    print("final reward:", json.dumps(breakdown_to_json(session.reward_breakdown()), indent=2))

    OUT.mkdir(exist_ok=True)
    OUT.joinpath("transferred.svg").write_bytes(session.export_svg())
    OUT.joinpath("trace.csv").write_text(trace_to_csv(session.last_trace))
    OUT.joinpath("rules.json").write_text(
        json.dumps(ruleset_to_json(session.rules_a_star), indent=2)
    )
    print(f"\nwrote {OUT}/transferred.svg, trace.csv, rules.json")


if __name__ == "__main__":
    main()
