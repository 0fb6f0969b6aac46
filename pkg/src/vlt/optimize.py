"""Rule-adherence reward and seeded hill-climbing refinement.

The reward of a layout is weighted log-scaled adherence over the rule set,
plus a text non-occlusion count, plus a property-consistency bonus that
grows as the design reuses fewer distinct sizes and gaps. The optimizer
climbs this score with snap-to-rule, group-nudge, and size-unification
moves, never touching locked properties.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import InfeasibleRule, LockedPropertyViolation, MinSizeViolation
from .geometry import (
    Delta,
    Design,
    Transformation,
    apply_transformation,
    design_diff,
    overlap_x,
    overlap_y,
)
from .rules import (
    HORIZONTAL,
    InferenceConfig,
    LayoutRule,
    RuleSet,
    VERTICAL,
    axis_adjacent_pairs,
    modal_value,
    rule_residual,
    tolerance_for,
)
from .transfer import enforce_rule

MODE_HARD = "hard"
MODE_SMOOTH = "smooth"


@dataclass(frozen=True)
class WeightConfig:
    rule_weights: Mapping[str, float] = field(default_factory=dict)
    off_weight: float = 1.0
    con_weight: float = 1.0
    sigma: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "rule_weights", dict(self.rule_weights))
        if self.off_weight < 0 or self.con_weight < 0 or any(w < 0 for w in self.rule_weights.values()):
            raise ValueError("weights must be non-negative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def weight_for(self, rule: LayoutRule) -> float:
        return self.rule_weights.get(rule.rule_id, rule.weight)

    def scaled(self, factor: float) -> "WeightConfig":
        return WeightConfig(
            rule_weights={k: v * factor for k, v in self.rule_weights.items()},
            off_weight=self.off_weight * factor,
            con_weight=self.con_weight * factor,
            sigma=self.sigma,
        )


@dataclass(frozen=True)
class RewardBreakdown:
    r_rule: float
    r_off: float
    r_con: float
    total: float
    per_rule: tuple  # (rule_id, member_count, residual, contribution)
    t_non_overlap: int
    e_unique_prop: int


def smoothed_adherence(design: Design, rule: LayoutRule, sigma: float) -> float:
    """Gaussian falloff of the rule residual: 1 iff exactly satisfied."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    r = rule_residual(design, rule)
    return math.exp(-(r * r) / (2.0 * sigma * sigma))


def _text_non_overlap_count(design: Design) -> int:
    count = 0
    for e in design.elements:
        if e.kind != "text":
            continue
        occluded = any(
            f.id != e.id
            and overlap_x(e.geometry, f.geometry) > 0
            and overlap_y(e.geometry, f.geometry) > 0
            for f in design.elements
        )
        if not occluded:
            count += 1
    return count


def _unique_property_count(design: Design, size_tolerance: float) -> int:
    values = []
    for e in design.elements:
        values.append(e.geometry.w)
        values.append(e.geometry.h)
    for axis in (HORIZONTAL, VERTICAL):
        for _, _, gap in axis_adjacent_pairs(design, axis):
            values.append(gap)
    if size_tolerance > 0:
        buckets = {round(v / size_tolerance) for v in values}
    else:
        buckets = set(values)
    return max(len(buckets), 1)


def reward(
    design: Design,
    rules: RuleSet,
    weights: WeightConfig,
    mode: str = MODE_HARD,
) -> RewardBreakdown:
    """Evaluate the three reward terms under the given weights.

    Hard mode credits a rule fully when its residual is within the
    inference tolerance; smooth mode multiplies each rule term by its
    Gaussian adherence so near-misses still contribute gradient.
    """
    if mode not in (MODE_HARD, MODE_SMOOTH):
        raise ValueError(f"unknown mode {mode!r}")
    config = rules.tolerance_config
    per_rule = []
    r_rule = 0.0
    for rule in rules:
        residual = rule_residual(design, rule)
        base = weights.weight_for(rule) * math.log(len(rule.members) + 1)
        if mode == MODE_HARD:
            contribution = base if residual <= tolerance_for(rule, config) else 0.0
        else:
            contribution = base * math.exp(-(residual * residual) / (2.0 * weights.sigma**2))
        r_rule += contribution
        per_rule.append((rule.rule_id, len(rule.members), residual, contribution))
    t_count = _text_non_overlap_count(design)
    r_off = weights.off_weight * t_count
    unique = _unique_property_count(design, config.size_tolerance)
    r_con = weights.con_weight / unique
    return RewardBreakdown(
        r_rule=r_rule,
        r_off=r_off,
        r_con=r_con,
        total=r_rule + r_off + r_con,
        per_rule=tuple(per_rule),
        t_non_overlap=t_count,
        e_unique_prop=unique,
    )


# --- hill climbing -------------------------------------------------------------


def _with_extra_locks(design: Design, locks: Optional[Mapping[str, Iterable[str]]]) -> Design:
    if not locks:
        return design
    elements = []
    for e in design.elements:
        extra = set(locks.get(e.id, ()))
        if extra:
            e = replace(e, locked_properties=frozenset(e.locked_properties | extra))
        elements.append(e)
    return replace(design, elements=tuple(elements))


def _strip_locked(design: Design, entries: dict) -> Optional[Transformation]:
    clean = {}
    for eid, d in entries.items():
        e = design[eid]
        vals = list(d)
        for i, prop in enumerate(("x", "y", "z", "w", "h")):
            if prop in e.locked_properties:
                vals[i] = 0 if prop == "z" else 0.0
        d = Delta(*vals)
        if d != Delta():
            clean[eid] = d
    if not clean:
        return None
    return Transformation(clean)


def _candidate_moves(design: Design, rules: RuleSet, selection: Optional[frozenset]) -> list:
    """Snap-to-rule, group nudges, and dimension unification candidates."""
    moves = []

    def allowed(ids) -> bool:
        return selection is None or set(ids) <= selection

    for rule in rules:
        if not allowed(rule.members):
            continue
        if any(m not in design for m in rule.members):
            continue
        if rule_residual(design, rule) > 0:
            try:
                snap = enforce_rule(design, rule)
            except InfeasibleRule:
                snap = None
            if snap:
                moves.append(snap)
        for prop in ("x", "y"):
            for step in (1.0, -1.0, 4.0, -4.0):
                entries = {m: Delta(dx=step) if prop == "x" else Delta(dy=step) for m in rule.members}
                t = _strip_locked(design, entries)
                if t:
                    moves.append(t)

    for prop, delta_key in (("w", "dw"), ("h", "dh")):
        values = [getattr(e.geometry, prop) for e in design.elements]
        if not values:
            continue
        anchor = modal_value(values)
        for e in design.elements:
            if selection is not None and e.id not in selection:
                continue
            dv = anchor - getattr(e.geometry, prop)
            if abs(dv) > 1e-9:
                t = _strip_locked(design, {e.id: Delta(**{delta_key: dv})})
                if t:
                    moves.append(t)
    return moves


def optimize(
    design: Design,
    rules: RuleSet,
    weights: WeightConfig,
    locks: Optional[Mapping[str, Iterable[str]]] = None,
    budget: int = 100,
    seed: int = 0,
    selection: Optional[Iterable[str]] = None,
) -> tuple:
    """Seeded first-improvement hill climbing on the smooth reward.

    Returns (transformation, trace); the trace holds one breakdown per
    accepted move plus the starting point, and is strictly increasing.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    work = _with_extra_locks(design, locks)
    sel = frozenset(selection) if selection is not None else None
    rng = random.Random(seed)
    current = work
    score = reward(current, rules, weights, MODE_SMOOTH)
    trace = [score]
    for _ in range(budget):
        moves = _candidate_moves(current, rules, sel)
        rng.shuffle(moves)
        accepted = None
        for move in moves:
            try:
                candidate = apply_transformation(current, move)
            except (MinSizeViolation, LockedPropertyViolation):
                continue
            cand_score = reward(candidate, rules, weights, MODE_SMOOTH)
            if cand_score.total > score.total:
                accepted = (candidate, cand_score)
                break
        if accepted is None:
            break
        current, score = accepted
        trace.append(score)
    return design_diff(design, current), tuple(trace)


def trace_to_csv(trace: Iterable[RewardBreakdown]) -> str:
    lines = ["iteration,total,r-rule,r-off,r-con"]
    for i, b in enumerate(trace):
        lines.append(f"{i},{b.total!r},{b.r_rule!r},{b.r_off!r},{b.r_con!r}")
    return "\n".join(lines) + "\n"


def weights_to_json(w: WeightConfig) -> dict:
    return {
        "rules": dict(sorted(w.rule_weights.items())),
        "off": w.off_weight,
        "con": w.con_weight,
        "sigma": w.sigma,
    }


def weights_from_json(data: dict) -> WeightConfig:
    return WeightConfig(
        rule_weights=data.get("rules", {}),
        off_weight=data.get("off", 1.0),
        con_weight=data.get("con", 1.0),
        sigma=data.get("sigma", 2.0),
    )
