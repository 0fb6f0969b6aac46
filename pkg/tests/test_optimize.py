import math
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlt.geometry import Delta, Transformation, apply_transformation
from vlt.optimize import (
    MODE_HARD,
    MODE_SMOOTH,
    WeightConfig,
    optimize,
    reward,
    smoothed_adherence,
    trace_to_csv,
    weights_from_json,
    weights_to_json,
)
from vlt.rules import HALIGN, InferenceConfig, RuleSet, infer_rules, make_rule, rule_residual
from conftest import design_of, designs, rect


def aligned_trio(off=0.0):
    return design_of(
        rect("a", 10, 0, 20, 30),
        rect("b", 10, 40, 20, 30, z=1),
        rect("c", 10 + off, 80, 20, 40, z=2),
    )


def halign_rule():
    return make_rule(HALIGN, ("a", "b", "c"), mode="left")


def one_rule_set(rule):
    return RuleSet((rule,), InferenceConfig())


def test_smoothed_adherence_exact():
    d = aligned_trio()
    assert smoothed_adherence(d, halign_rule(), sigma=2.0) == 1.0


def test_smoothed_adherence_at_sigma():
    d = aligned_trio(off=2.0)
    v = smoothed_adherence(d, halign_rule(), sigma=2.0)
    assert v == pytest.approx(math.exp(-0.5), abs=1e-12)


def test_smoothed_adherence_monotone_to_zero():
    vals = [smoothed_adherence(aligned_trio(off=o), halign_rule(), 2.0) for o in (0, 1, 2, 5, 20)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-20


def test_smoothed_matches_closed_form():
    for off, sigma in ((0.7, 2.0), (3.3, 1.5), (9.0, 4.0)):
        d = aligned_trio(off=off)
        r = rule_residual(d, halign_rule())
        expect = math.exp(-(r * r) / (2 * sigma * sigma))
        assert abs(smoothed_adherence(d, halign_rule(), sigma) - expect) <= 1e-12


# --- reward hand cases -------------------------------------------------------


def ln4_design():
    # three left-aligned rects: widths {20}, heights {30, 30, 40}, gaps {10, 10}
    # -> 4 distinct property buckets
    return design_of(
        rect("a", 10, 0, 20, 30),
        rect("b", 10, 40, 20, 30, z=1),
        rect("c", 10, 80, 20, 40, z=2),
    )


def test_reward_ln4_hand_case():
    d = ln4_design()
    rules = one_rule_set(halign_rule())
    b = reward(d, rules, WeightConfig(), MODE_HARD)
    assert b.r_rule == pytest.approx(math.log(4), abs=1e-9)
    assert b.r_off == 0.0
    assert b.e_unique_prop == 4
    assert b.r_con == pytest.approx(0.25, abs=1e-9)
    assert b.total == pytest.approx(math.log(4) + 0.25, abs=1e-9)


def test_reward_degenerate_floor():
    d = design_of(rect("only", 10, 10, 15, 15))
    b = reward(d, RuleSet((), InferenceConfig()), WeightConfig(), MODE_HARD)
    assert b.r_rule == 0.0 and b.r_off == 0.0
    assert b.e_unique_prop == 1
    assert b.r_con == pytest.approx(1.0, abs=1e-9)


def test_reward_weight_doubling_is_linear():
    d = ln4_design()
    rules = one_rule_set(halign_rule())
    w1 = WeightConfig(rule_weights={halign_rule().rule_id: 1.0}, off_weight=1.0, con_weight=1.0)
    w2 = w1.scaled(2.0)
    b1 = reward(d, rules, w1, MODE_HARD)
    b2 = reward(d, rules, w2, MODE_HARD)
    for attr in ("r_rule", "r_off", "r_con", "total"):
        assert getattr(b2, attr) == pytest.approx(2 * getattr(b1, attr), abs=1e-9)


def test_reward_total_is_sum_and_nonnegative():
    d = ln4_design()
    rules = infer_rules(d)
    for mode in (MODE_HARD, MODE_SMOOTH):
        b = reward(d, rules, WeightConfig(), mode)
        assert b.total == b.r_rule + b.r_off + b.r_con
        assert b.r_rule >= 0 and b.r_off >= 0 and b.r_con >= 0


def test_text_non_overlap_counting():
    free_text = design_of(
        rect("t", 0, 0, 30, 10, kind="text", text="hi"),
        rect("r", 100, 100, 20, 20, z=1),
    )
    b = reward(free_text, RuleSet((), InferenceConfig()), WeightConfig(off_weight=2.0))
    assert b.t_non_overlap == 1 and b.r_off == 2.0
    occluded = design_of(
        rect("t", 0, 0, 30, 10, kind="text", text="hi"),
        rect("r", 5, 5, 20, 20, z=1),
    )
    b2 = reward(occluded, RuleSet((), InferenceConfig()), WeightConfig(off_weight=2.0))
    assert b2.t_non_overlap == 0 and b2.r_off == 0.0


def test_r_rule_monotone_in_satisfied_rules():
    d = aligned_trio()
    base = reward(d, one_rule_set(halign_rule()), WeightConfig())
    two = RuleSet((halign_rule(), make_rule("SameWidth", ("a", "b", "c"), value=20.0)), InferenceConfig())
    more = reward(d, two, WeightConfig())
    assert more.r_rule > base.r_rule


def test_r_con_non_increasing_in_unique_props():
    uniform = design_of(rect("a", 0, 0, 20, 20), rect("b", 40, 0, 20, 20, z=1))
    varied = design_of(rect("a", 0, 0, 20, 25), rect("b", 40, 0, 30, 35, z=1))
    rs = RuleSet((), InferenceConfig())
    assert reward(uniform, rs, WeightConfig()).r_con >= reward(varied, rs, WeightConfig()).r_con


# --- optimizer ----------------------------------------------------------------


def test_optimize_snaps_perturbed_alignment():
    clean = aligned_trio()
    rules = infer_rules(clean)
    perturbed = apply_transformation(clean, Transformation({"c": Delta(dx=3.0)}))
    t0 = time.monotonic()
    t, trace = optimize(perturbed, rules, WeightConfig(sigma=2.0), budget=500, seed=42)
    elapsed = time.monotonic() - t0
    out = apply_transformation(perturbed, t)
    for rule in rules:
        if rule.variant == HALIGN and rule.mode == "left":
            assert rule_residual(out, rule) == 0.0
    totals = [b.total for b in trace]
    assert all(b > a for a, b in zip(totals, totals[1:]))
    assert elapsed < 1.0


def test_optimize_already_optimal_returns_empty():
    # uniform sizes, exact alignment, equal gaps: no move can raise the reward
    clean = design_of(
        rect("a", 10, 0, 20, 30),
        rect("b", 10, 40, 20, 30, z=1),
        rect("c", 10, 80, 20, 30, z=2),
    )
    rules = infer_rules(clean)
    t, trace = optimize(clean, rules, WeightConfig(), budget=200, seed=1)
    assert t == Transformation()
    assert len(trace) == 1


def test_optimize_budget_zero():
    d = aligned_trio(off=3.0)
    t, trace = optimize(d, infer_rules(aligned_trio()), WeightConfig(), budget=0, seed=0)
    assert t == Transformation()
    assert len(trace) == 1


def test_optimize_respects_locks():
    clean = aligned_trio()
    rules = infer_rules(clean)
    perturbed = apply_transformation(clean, Transformation({"c": Delta(dx=3.0)}))
    t, _ = optimize(
        perturbed,
        rules,
        WeightConfig(),
        locks={"c": {"x", "y", "z", "w", "h"}},
        budget=200,
        seed=3,
    )
    assert t.get("c") == Delta()


def test_optimize_weight_scaling_argmax_invariance():
    clean = aligned_trio()
    rules = infer_rules(clean)
    perturbed = apply_transformation(clean, Transformation({"c": Delta(dx=3.0)}))
    w = WeightConfig(sigma=2.0)
    t1, _ = optimize(perturbed, rules, w, budget=500, seed=42)
    t2, _ = optimize(perturbed, rules, w.scaled(10.0), budget=500, seed=42)
    assert t1 == t2


def test_optimize_selection_restricts_moves():
    clean = aligned_trio()
    rules = infer_rules(clean)
    perturbed = apply_transformation(clean, Transformation({"c": Delta(dx=3.0)}))
    t, _ = optimize(perturbed, rules, WeightConfig(), budget=100, seed=0, selection={"a"})
    assert all(eid == "a" for eid in t.entries)


@given(designs(max_elements=5), st.integers(0, 1000))
@settings(max_examples=20, deadline=None)
def test_optimize_trace_monotone_on_random_designs(d, seed):
    rules = infer_rules(d)
    t, trace = optimize(d, rules, WeightConfig(), budget=15, seed=seed)
    totals = [b.total for b in trace]
    assert all(b > a for a, b in zip(totals, totals[1:]))
    assert totals[-1] >= totals[0]
    apply_transformation(d, t)


def test_trace_csv():
    d = aligned_trio(off=2.0)
    _, trace = optimize(d, infer_rules(aligned_trio()), WeightConfig(), budget=10, seed=0)
    csv = trace_to_csv(trace)
    lines = csv.strip().splitlines()
    assert lines[0] == "iteration,total,r-rule,r-off,r-con"
    assert len(lines) == len(trace) + 1


def test_weights_json_roundtrip():
    w = WeightConfig(rule_weights={"abc": 2.0}, off_weight=0.5, con_weight=3.0, sigma=1.5)
    assert weights_from_json(weights_to_json(w)) == w


def test_weight_validation():
    with pytest.raises(ValueError):
        WeightConfig(off_weight=-1.0)
    with pytest.raises(ValueError):
        WeightConfig(sigma=0.0)
