"""Layout rule inference, adherence residuals, and selection filtering.

Six rule families are detected: containment and relative ordering
(asymmetric, stored as ordered trees/sequences) plus horizontal/vertical
alignment, bounds overlap, marginal offset, and same width/height
(symmetric, stored as member sets). A rule's residual is the number of
canvas units by which the design misses exact satisfaction; inference
guarantees residual <= tolerance for every rule it returns.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import UnknownElement
from .geometry import (
    Design,
    Element,
    ElementGeometry,
    RELATION_CONTAINS,
    RELATION_OVERLAP,
    bounds_relation,
    overlap_x,
    overlap_y,
)

HALIGN = "HAlign"
VALIGN = "VAlign"
SAME_WIDTH = "SameWidth"
SAME_HEIGHT = "SameHeight"
MARGINAL_OFFSET = "MarginalOffset"
BOUNDS_OVERLAP = "BoundsOverlap"
CONTAINMENT = "Containment"
RELATIVE_ORDERING = "RelativeOrdering"

SYMMETRIC_VARIANTS = frozenset({HALIGN, VALIGN, SAME_WIDTH, SAME_HEIGHT, MARGINAL_OFFSET, BOUNDS_OVERLAP})

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

# (variant, mode) -> coordinate accessor for the 1-D alignment/size sweeps
_VALUE_DIMS = (
    (HALIGN, "left", lambda g: g.x),
    (HALIGN, "center", lambda g: g.cx),
    (HALIGN, "right", lambda g: g.right),
    (VALIGN, "top", lambda g: g.y),
    (VALIGN, "middle", lambda g: g.cy),
    (VALIGN, "bottom", lambda g: g.bottom),
)


@dataclass(frozen=True)
class InferenceConfig:
    align_tolerance: float = 1.0
    size_tolerance: float = 1.0
    gap_tolerance: float = 1.0
    min_group_size: int = 2

    def __post_init__(self):
        if min(self.align_tolerance, self.size_tolerance, self.gap_tolerance) < 0:
            raise ValueError("tolerances must be non-negative")
        if self.min_group_size < 2:
            raise ValueError("min_group_size must be at least 2")


@dataclass(frozen=True)
class LayoutRule:
    rule_id: str
    variant: str
    members: tuple  # symmetric: sorted ids; offset/ordering: sequence; containment: preorder
    mode: Optional[str] = None  # HAlign: left|center|right / VAlign: top|middle|bottom
    axis: Optional[str] = None  # MarginalOffset
    gap: Optional[float] = None  # MarginalOffset
    value: Optional[float] = None  # SameWidth / SameHeight shared dimension at inference
    tree: Optional[tuple] = None  # Containment: nested (id, (subtrees...))
    weight: float = 1.0

    def member_set(self) -> frozenset:
        return frozenset(self.members)


def rule_id_for(variant: str, members: Iterable[str], mode: Optional[str] = None, axis: Optional[str] = None) -> str:
    key = f"{variant}({mode or axis or ''})|{','.join(sorted(members))}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def make_rule(variant, members, mode=None, axis=None, gap=None, value=None, tree=None, weight=1.0) -> LayoutRule:
    members = tuple(members)
    return LayoutRule(
        rule_id=rule_id_for(variant, members, mode=mode, axis=axis),
        variant=variant,
        members=members,
        mode=mode,
        axis=axis,
        gap=gap,
        value=value,
        tree=tree,
        weight=weight,
    )


@dataclass(frozen=True)
class RuleSet:
    rules: tuple = ()
    tolerance_config: InferenceConfig = field(default_factory=InferenceConfig)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = [r.rule_id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate rules in rule set")

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def get(self, rule_id: str) -> Optional[LayoutRule]:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        return None


def tolerance_for(rule: LayoutRule, config: InferenceConfig) -> float:
    if rule.variant in (HALIGN, VALIGN):
        return config.align_tolerance
    if rule.variant in (SAME_WIDTH, SAME_HEIGHT):
        return config.size_tolerance
    if rule.variant == MARGINAL_OFFSET:
        return config.gap_tolerance
    return config.align_tolerance


def modal_value(values: Sequence[float]) -> float:
    """Most common value; ties broken toward the smallest."""
    counts = Counter(values)
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best)


# --- pair relations used by inference and the reward terms -------------------


def axis_adjacent_pairs(design: Design, axis: str) -> list:
    """(a_id, b_id, gap) pairs of axis-separated neighbors with no element
    sitting fully inside the gap corridor between them."""
    elems = design.elements
    pairs = []
    for a in elems:
        for b in elems:
            if a.id == b.id:
                continue
            ga, gb = a.geometry, b.geometry
            if axis == HORIZONTAL:
                if overlap_y(ga, gb) <= 0 or ga.right > gb.x:
                    continue
            else:
                if overlap_x(ga, gb) <= 0 or ga.bottom > gb.y:
                    continue
            blocked = False
            for c in elems:
                if c.id in (a.id, b.id):
                    continue
                gc = c.geometry
                if axis == HORIZONTAL:
                    if (
                        overlap_y(ga, gc) > 0
                        and overlap_y(gc, gb) > 0
                        and ga.right <= gc.x
                        and gc.right <= gb.x
                    ):
                        blocked = True
                        break
                else:
                    if (
                        overlap_x(ga, gc) > 0
                        and overlap_x(gc, gb) > 0
                        and ga.bottom <= gc.y
                        and gc.bottom <= gb.y
                    ):
                        blocked = True
                        break
            if blocked:
                continue
            gap = (gb.x - ga.right) if axis == HORIZONTAL else (gb.y - ga.bottom)
            pairs.append((a.id, b.id, gap))
    return pairs


def containment_parents(design: Design) -> dict:
    """Map child id -> closest (smallest-area) containing element id."""
    parents = {}
    for c in design.elements:
        candidates = []
        for p in design.elements:
            if p.id != c.id and bounds_relation(p.geometry, c.geometry).kind == RELATION_CONTAINS:
                candidates.append(p)
        if candidates:
            best = min(candidates, key=lambda p: (p.geometry.area, p.id))
            parents[c.id] = best.id
    return parents


def reading_order(elements: Iterable[Element]) -> list:
    return [e.id for e in sorted(elements, key=lambda e: (e.geometry.y, e.geometry.x, e.id))]


# --- inference ----------------------------------------------------------------


def _maximal_windows(pairs: list, tol: float, min_size: int) -> list:
    """Maximal groups with value diameter <= tol from (value, id) pairs.

    Groups may overlap; every returned group cannot absorb any further
    element, and none is a subset of another.
    """
    pairs = sorted(pairs)
    n = len(pairs)
    out = []
    prev_end = -1
    for i in range(n):
        end = i
        while end + 1 < n and pairs[end + 1][0] - pairs[i][0] <= tol:
            end += 1
        if end > prev_end or i == 0:
            if end - i + 1 >= min_size:
                out.append([pid for _, pid in pairs[i : end + 1]])
        prev_end = max(prev_end, end)
    return out


def _alignment_rules(design: Design, config: InferenceConfig) -> list:
    rules = []
    for variant, mode, get in _VALUE_DIMS:
        pairs = [(get(e.geometry), e.id) for e in design.elements]
        for group in _maximal_windows(pairs, config.align_tolerance, config.min_group_size):
            rules.append(make_rule(variant, sorted(group), mode=mode))
    return rules


def _size_rules(design: Design, config: InferenceConfig) -> list:
    rules = []
    for variant, get in ((SAME_WIDTH, lambda g: g.w), (SAME_HEIGHT, lambda g: g.h)):
        pairs = [(get(e.geometry), e.id) for e in design.elements]
        for group in _maximal_windows(pairs, config.size_tolerance, config.min_group_size):
            values = [get(design[m].geometry) for m in group]
            rules.append(make_rule(variant, sorted(group), value=modal_value(values)))
    return rules


def _offset_rules(design: Design, config: InferenceConfig) -> list:
    rules = []
    min_len = max(3, config.min_group_size)
    for axis in (HORIZONTAL, VERTICAL):
        succ: dict = {}
        pred: dict = {}
        for a, b, gap in axis_adjacent_pairs(design, axis):
            succ.setdefault(a, []).append((b, gap))
            pred.setdefault(b, []).append((a, gap))
        for edges in succ.values():
            edges.sort()
        found = set()

        def front_extensible(first: str, gaps: list) -> bool:
            for _, gap in pred.get(first, ()):
                ng = gaps + [gap]
                if max(ng) - min(ng) <= config.gap_tolerance:
                    return True
            return False

        def extend(path: list, gaps: list):
            grew = False
            for b, gap in succ.get(path[-1], ()):
                ng = gaps + [gap]
                if max(ng) - min(ng) <= config.gap_tolerance:
                    grew = True
                    extend(path + [b], ng)
            if not grew and len(path) >= min_len and not front_extensible(path[0], gaps):
                found.add((tuple(path), tuple(gaps)))

        for start in sorted(succ):
            extend([start], [])
        for path, gaps in sorted(found):
            rules.append(make_rule(MARGINAL_OFFSET, path, axis=axis, gap=sum(gaps) / len(gaps)))
    return rules


def _bron_kerbosch(r: set, p: set, x: set, adj: dict, out: list):
    if not p and not x:
        if len(r) >= 2:
            out.append(frozenset(r))
        return
    pivot = max(p | x, key=lambda v: (len(adj[v] & p), v))
    for v in sorted(p - adj[pivot]):
        _bron_kerbosch(r | {v}, p & adj[v], x & adj[v], adj, out)
        p = p - {v}
        x = x | {v}


def _greedy_cliques(nodes: list, adj: dict) -> list:
    cliques = set()
    for seed in nodes:
        clique = {seed}
        for v in nodes:
            if v != seed and all(v in adj[u] for u in clique):
                clique.add(v)
        if len(clique) >= 2:
            cliques.add(frozenset(clique))
    return sorted(cliques, key=lambda c: sorted(c))


def _overlap_rules(design: Design, config: InferenceConfig) -> list:
    adj: dict = {e.id: set() for e in design.elements}
    for a, b in combinations(design.elements, 2):
        if bounds_relation(a.geometry, b.geometry).kind == RELATION_OVERLAP:
            adj[a.id].add(b.id)
            adj[b.id].add(a.id)
    seen: set = set()
    cliques: list = []
    for start in sorted(adj):
        if start in seen or not adj[start]:
            seen.add(start)
            continue
        component = set()
        stack = [start]
        while stack:
            v = stack.pop()
            if v in component:
                continue
            component.add(v)
            stack.extend(adj[v] - component)
        seen |= component
        if len(component) <= 16:
            found: list = []
            _bron_kerbosch(set(), set(component), set(), adj, found)
            cliques.extend(found)
        else:
            cliques.extend(_greedy_cliques(sorted(component), adj))
    rules = []
    for clique in cliques:
        if len(clique) >= config.min_group_size:
            rules.append(make_rule(BOUNDS_OVERLAP, sorted(clique)))
    return rules


def _containment_rules(design: Design, config: InferenceConfig) -> list:
    parents = containment_parents(design)
    children: dict = {}
    for c, p in parents.items():
        children.setdefault(p, []).append(c)

    def subtree(eid: str) -> tuple:
        kids = sorted(
            children.get(eid, ()),
            key=lambda k: (design[k].geometry.y, design[k].geometry.x, k),
        )
        return (eid, tuple(subtree(k) for k in kids))

    def preorder(tree: tuple, acc: list):
        acc.append(tree[0])
        for sub in tree[1]:
            preorder(sub, acc)

    rules = []
    roots = sorted(set(parents.values()) - set(parents.keys()))
    for root in roots:
        tree = subtree(root)
        members: list = []
        preorder(tree, members)
        if len(members) >= config.min_group_size:
            rules.append(make_rule(CONTAINMENT, members, tree=tree))
    return rules


def _ordering_rule(design: Design, config: InferenceConfig) -> list:
    parents = containment_parents(design)
    top = [e for e in design.elements if e.id not in parents]
    if len(top) < config.min_group_size:
        return []
    return [make_rule(RELATIVE_ORDERING, reading_order(top))]


def infer_rules(design: Design, config: InferenceConfig = InferenceConfig()) -> RuleSet:
    """Detect all maximal rule groups; deterministic and independent of
    element list order."""
    rules = (
        _alignment_rules(design, config)
        + _size_rules(design, config)
        + _offset_rules(design, config)
        + _overlap_rules(design, config)
        + _containment_rules(design, config)
        + _ordering_rule(design, config)
    )
    rules.sort(key=lambda r: (r.variant, r.mode or r.axis or "", min(r.members), r.members))
    return RuleSet(rules=tuple(rules), tolerance_config=config)


# --- residuals ----------------------------------------------------------------


def _require_members(design: Design, rule: LayoutRule):
    for m in rule.members:
        if m not in design:
            raise UnknownElement(m)


def _alignment_values(design: Design, rule: LayoutRule) -> list:
    get = {
        "left": lambda g: g.x,
        "center": lambda g: g.cx,
        "right": lambda g: g.right,
        "top": lambda g: g.y,
        "middle": lambda g: g.cy,
        "bottom": lambda g: g.bottom,
    }[rule.mode]
    return [get(design[m].geometry) for m in rule.members]


def _containment_pair_residual(p: ElementGeometry, c: ElementGeometry) -> float:
    tx = min(max(c.x, p.x), p.right - c.w) if c.w <= p.w else p.cx - c.w / 2
    ty = min(max(c.y, p.y), p.bottom - c.h) if c.h <= p.h else p.cy - c.h / 2
    overflow = max(0.0, c.w - p.w) + max(0.0, c.h - p.h)
    return math.hypot(tx - c.x, ty - c.y) + overflow


def _tree_edges(tree: tuple) -> list:
    edges = []
    for sub in tree[1]:
        edges.append((tree[0], sub[0]))
        edges.extend(_tree_edges(sub))
    return edges


def rule_residual(design: Design, rule: LayoutRule) -> float:
    """Units by which the design misses the rule; 0 means exactly satisfied."""
    _require_members(design, rule)
    variant = rule.variant
    if variant in (HALIGN, VALIGN):
        values = _alignment_values(design, rule)
        anchor = modal_value(values)
        return max(abs(v - anchor) for v in values)
    if variant in (SAME_WIDTH, SAME_HEIGHT):
        get = (lambda g: g.w) if variant == SAME_WIDTH else (lambda g: g.h)
        values = [get(design[m].geometry) for m in rule.members]
        anchor = modal_value(values)
        return max(abs(v - anchor) for v in values)
    if variant == MARGINAL_OFFSET:
        worst = 0.0
        for a, b in zip(rule.members, rule.members[1:]):
            ga, gb = design[a].geometry, design[b].geometry
            gap = (gb.x - ga.right) if rule.axis == HORIZONTAL else (gb.y - ga.bottom)
            worst = max(worst, abs(gap - rule.gap))
        return worst
    if variant == CONTAINMENT:
        worst = 0.0
        for p, c in _tree_edges(rule.tree):
            worst = max(worst, _containment_pair_residual(design[p].geometry, design[c].geometry))
        return worst
    if variant == BOUNDS_OVERLAP:
        worst = 0.0
        for a, b in combinations(rule.members, 2):
            ga, gb = design[a].geometry, design[b].geometry
            ox, oy = overlap_x(ga, gb), overlap_y(ga, gb)
            if ox <= 0 or oy <= 0:
                worst = max(worst, math.hypot(max(0.0, -ox), max(0.0, -oy)))
        return worst
    if variant == RELATIVE_ORDERING:
        worst = 0.0
        for a, b in zip(rule.members, rule.members[1:]):
            ga, gb = design[a].geometry, design[b].geometry
            if gb.y < ga.y:
                worst = max(worst, ga.y - gb.y)
            elif gb.y == ga.y and gb.x < ga.x:
                worst = max(worst, ga.x - gb.x)
        return worst
    raise ValueError(f"unknown rule variant {variant!r}")


def rules_for_selection(rules: RuleSet, ids: Iterable[str]) -> RuleSet:
    """Rules touching the selection; empty selection means everything."""
    ids = set(ids)
    if not ids:
        return rules
    kept = tuple(r for r in rules if r.member_set() & ids)
    return RuleSet(rules=kept, tolerance_config=rules.tolerance_config)


# --- JSON ---------------------------------------------------------------------


def _tree_to_json(tree: tuple):
    return [tree[0], [_tree_to_json(s) for s in tree[1]]]


def _tree_from_json(data) -> tuple:
    return (data[0], tuple(_tree_from_json(s) for s in data[1]))


def rule_to_json(rule: LayoutRule) -> dict:
    params: dict = {}
    if rule.mode is not None:
        params["mode"] = rule.mode
    if rule.axis is not None:
        params["axis"] = rule.axis
    if rule.gap is not None:
        params["gap"] = round(rule.gap, 6)
    if rule.value is not None:
        params["value"] = round(rule.value, 6)
    if rule.tree is not None:
        params["tree"] = _tree_to_json(rule.tree)
    return {
        "id": rule.rule_id,
        "variant": rule.variant,
        "params": params,
        "members": list(rule.members),
        "weight": rule.weight,
    }


def rule_from_json(data: dict) -> LayoutRule:
    params = data.get("params", {})
    tree = _tree_from_json(params["tree"]) if "tree" in params else None
    return LayoutRule(
        rule_id=data["id"],
        variant=data["variant"],
        members=tuple(data["members"]),
        mode=params.get("mode"),
        axis=params.get("axis"),
        gap=params.get("gap"),
        value=params.get("value"),
        tree=tree,
        weight=data.get("weight", 1.0),
    )


def ruleset_to_json(rules: RuleSet) -> dict:
    cfg = rules.tolerance_config
    return {
        "rules": [rule_to_json(r) for r in rules],
        "config": {
            "align-tolerance": cfg.align_tolerance,
            "size-tolerance": cfg.size_tolerance,
            "gap-tolerance": cfg.gap_tolerance,
            "min-group-size": cfg.min_group_size,
        },
    }


def ruleset_from_json(data: dict) -> RuleSet:
    cfg = data.get("config", {})
    config = InferenceConfig(
        align_tolerance=cfg.get("align-tolerance", 1.0),
        size_tolerance=cfg.get("size-tolerance", 1.0),
        gap_tolerance=cfg.get("gap-tolerance", 1.0),
        min_group_size=cfg.get("min-group-size", 2),
    )
    return RuleSet(tuple(rule_from_json(r) for r in data["rules"]), config)
