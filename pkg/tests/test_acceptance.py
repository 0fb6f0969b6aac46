"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see per-criterion
lines; every tolerance is pinned here.
"""

import json
import math
import random
import time
from dataclasses import replace

import pytest
from starlette.testclient import TestClient

from vlt.geometry import Delta, Design, Transformation, apply_transformation
from vlt.matching import match_designs
from vlt.optimize import MODE_HARD, WeightConfig, optimize, reward
from vlt.rules import (
    HALIGN,
    InferenceConfig,
    RuleSet,
    infer_rules,
    make_rule,
    rule_residual,
    tolerance_for,
)
from vlt.server import create_app
from vlt.session import SessionStore
from vlt.svgio import parse_design, serialize_design
from vlt.transfer import TransferContext, global_layout_copy
from conftest import ASSETS, CORPUS, design_of, rect
from oracle import oracle_descriptors, random_design, rule_descriptors

ORACLE_DESIGNS = 1000
ORACLE_SEED = 20260809


def _oracle_corpus():
    rng = random.Random(ORACLE_SEED)
    return [random_design(rng) for _ in range(ORACLE_DESIGNS)]


def test_rule_inference_oracle_equivalence():
    """1000 seeded designs (<=12 elements): inference == brute force, <60s."""
    start = time.monotonic()
    corpus = _oracle_corpus()
    agree = 0
    for d in corpus:
        if rule_descriptors(infer_rules(d)) == oracle_descriptors(d):
            agree += 1
    elapsed = time.monotonic() - start
    assert agree == ORACLE_DESIGNS, f"only {agree}/{ORACLE_DESIGNS} designs agree"
    assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"
    print(f"\nACCEPTANCE rule-inference-oracle-equivalence: PASS "
          f"({agree}/{ORACLE_DESIGNS} designs, {elapsed:.1f}s)")


def test_soundness_of_inferred_rules():
    """Every inferred rule has residual <= tolerance on its own design."""
    failures = 0
    checked = 0
    for d in _oracle_corpus():
        rules = infer_rules(d)
        for r in rules:
            checked += 1
            if rule_residual(d, r) > tolerance_for(r, rules.tolerance_config):
                failures += 1
    assert failures == 0, f"{failures} unsound rules"
    print(f"\nACCEPTANCE soundness: PASS (0 failures over {checked} rules)")


def test_one_to_one_exact_transfer():
    """Shuffled/translated/resized copy, equal canvases: exact recovery."""
    kinds = ("rect", "rect", "ellipse", "text", "image", "rect", "ellipse", "text")
    styles = ("fill=red", "fill=blue", "fill=green", "fill=#222", "", "fill=gold", "fill=teal", "fill=#555")
    a_elems = []
    for i, (kind, style) in enumerate(zip(kinds, styles)):
        a_elems.append(
            rect(f"a{i}", 20 + (i % 4) * 90, 20 + (i // 4) * 120, 40 + i * 3, 30 + i * 2,
                 z=i, kind=kind, style=style, text="hi" if kind == "text" else None)
        )
    a = design_of(*a_elems, canvas=(420.0, 300.0))
    rng = random.Random(4)
    shuffled = list(a.elements)
    rng.shuffle(shuffled)
    b_elems = []
    for j, e in enumerate(shuffled):
        g = e.geometry
        b_elems.append(
            replace(
                e,
                id=f"b-{e.id}",
                geometry=replace(
                    g,
                    x=g.x + rng.uniform(-15, 15),
                    y=g.y + rng.uniform(-15, 15),
                    z=j,
                    w=g.w + rng.uniform(0, 8),
                    h=g.h + rng.uniform(0, 8),
                ),
            )
        )
    b = Design(a.canvas_width, a.canvas_height, tuple(b_elems))
    mapping = match_designs(a, b)
    assert not mapping.unmatched_a and not mapping.unmatched_b, "premise: everyone matched"
    ctx = TransferContext(target=a, source=b, mapping=mapping)
    out = apply_transformation(a, global_layout_copy(ctx))
    partners = {p.a: p.b for p in mapping.pairs}
    worst = 0.0
    for e in out.elements:
        pg = b[partners[e.id]].geometry
        for v, pv in ((e.geometry.x, pg.x), (e.geometry.y, pg.y), (e.geometry.w, pg.w), (e.geometry.h, pg.h)):
            worst = max(worst, abs(v - pv))
        assert e.geometry.z == pg.z
    assert worst <= 1e-6, f"worst deviation {worst}"
    print(f"\nACCEPTANCE one-to-one-exact-transfer: PASS (worst deviation {worst:.2e})")


def test_reward_hand_cases():
    """The three worked reward examples match to 1e-9."""
    # (a) satisfied 3-member alignment, 4 unique property buckets
    d = design_of(
        rect("a", 10, 0, 20, 30),
        rect("b", 10, 40, 20, 30, z=1),
        rect("c", 10, 80, 20, 40, z=2),
    )
    rule = make_rule(HALIGN, ("a", "b", "c"), mode="left")
    b1 = reward(d, RuleSet((rule,), InferenceConfig()), WeightConfig(), MODE_HARD)
    assert abs(b1.r_rule - math.log(4)) <= 1e-9
    assert b1.r_off == 0.0
    assert abs(b1.r_con - 0.25) <= 1e-9
    assert abs(b1.total - (math.log(4) + 0.25)) <= 1e-9

    # (b) degenerate floor: no rules, no text, single square element
    single = design_of(rect("only", 5, 5, 12, 12))
    b2 = reward(single, RuleSet((), InferenceConfig()), WeightConfig(), MODE_HARD)
    assert b2.r_rule == 0.0 and b2.r_off == 0.0
    assert b2.e_unique_prop == 1
    assert abs(b2.r_con - 1.0) <= 1e-9

    # (c) doubling every weight doubles every term and the total
    w2 = WeightConfig(rule_weights={rule.rule_id: 2.0}, off_weight=2.0, con_weight=2.0)
    b3 = reward(d, RuleSet((rule,), InferenceConfig()), w2, MODE_HARD)
    for attr in ("r_rule", "r_off", "r_con", "total"):
        assert abs(getattr(b3, attr) - 2 * getattr(b1, attr)) <= 1e-9
    print("\nACCEPTANCE reward-hand-cases: PASS (3 cases at 1e-9)")


def _perturbed_alignment():
    clean = design_of(
        rect("a", 10, 0, 20, 30),
        rect("b", 10, 40, 20, 30, z=1),
        rect("c", 10, 80, 20, 40, z=2),
    )
    rules = infer_rules(clean)
    perturbed = apply_transformation(clean, Transformation({"c": Delta(dx=3.0)}))
    return perturbed, rules


def test_optimizer_monotonicity_and_snap():
    """<=3-unit perturbation, sigma=2, budget 500: snap back in <1s."""
    perturbed, rules = _perturbed_alignment()
    start = time.monotonic()
    t, trace = optimize(perturbed, rules, WeightConfig(sigma=2.0), budget=500, seed=42)
    elapsed = time.monotonic() - start
    out = apply_transformation(perturbed, t)
    for r in rules:
        if r.variant == HALIGN and r.mode == "left":
            assert rule_residual(out, r) == 0.0
    totals = [b.total for b in trace]
    assert all(b > a for a, b in zip(totals, totals[1:])), "trace must increase"
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    print(f"\nACCEPTANCE optimizer-monotone-snap: PASS ({len(trace) - 1} moves, {elapsed * 1000:.0f}ms)")


def test_argmax_weight_invariance():
    """Scaling all weights by 10 leaves the final transformation bit-identical."""
    perturbed, rules = _perturbed_alignment()
    w = WeightConfig(sigma=2.0)
    t1, _ = optimize(perturbed, rules, w, budget=500, seed=42)
    t2, _ = optimize(perturbed, rules, w.scaled(10.0), budget=500, seed=42)
    assert t1.entries == t2.entries
    print("\nACCEPTANCE argmax-weight-invariance: PASS (bit-identical transformation)")


def test_svg_roundtrip_fixpoint():
    """parse -> serialize -> parse fixpoint over the bundled corpus."""
    files = sorted(CORPUS.glob("*.svg"))
    assert len(files) >= 20, "corpus must hold at least 20 files"
    for path in files:
        d1, t1 = parse_design(path.read_text())
        d2, t2 = parse_design(serialize_design(d1, t1))
        assert d2 == d1, path.name
        d3, _ = parse_design(serialize_design(d2, t2))
        assert d3 == d2, path.name
    print(f"\nACCEPTANCE svg-roundtrip-fixpoint: PASS ({len(files)} files)")


def test_scripted_session_reconstruction(tmp_path):
    """Two bundled pairs: <=15 HTTP commands reach the goal geometry
    exactly; replays are byte-for-byte identical."""
    for pair in ("pair1", "pair2"):
        root = ASSETS / "pairs" / pair
        script = json.loads(root.joinpath("script.json").read_text())["commands"]
        assert len(script) <= 15
        goal = json.loads(root.joinpath("goal.json").read_text())["elements"]
        exports = []
        states = []
        for run in range(2):
            app = create_app(store=SessionStore(tmp_path / f"{pair}-{run}"))
            with TestClient(app) as client:
                r = client.post(
                    "/sessions",
                    files={
                        "a": ("a.svg", root.joinpath("a.svg").read_bytes(), "image/svg+xml"),
                        "b": ("b.svg", root.joinpath("b.svg").read_bytes(), "image/svg+xml"),
                    },
                    data={"sessionId": pair},
                )
                assert r.status_code == 200
                for cmd in script:
                    assert client.post(f"/sessions/{pair}/commands", json=cmd).status_code == 200
                state = client.get(f"/sessions/{pair}").json()
                exports.append(client.get(f"/sessions/{pair}/export.svg").content)
                states.append(json.dumps(state, sort_keys=True))
                geo = {e["id"]: e["geometry"] for e in state["aStar"]["elements"]}
                for eid, (x, y, z, w, h) in goal.items():
                    got = geo[eid]
                    assert (got["x"], got["y"], got["z"], got["w"], got["h"]) == (x, y, z, w, h), (
                        pair,
                        eid,
                        got,
                    )
        assert exports[0] == exports[1], f"{pair} export bytes differ between replays"
        assert states[0] == states[1], f"{pair} state differs between replays"
    print("\nACCEPTANCE scripted-session-reconstruction: PASS (2 pairs, exact goals, byte-identical replays)")
