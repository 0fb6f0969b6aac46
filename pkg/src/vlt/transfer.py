"""Transformation builders for the designer controls.

Each builder inspects (target, source, mapping, rules) and returns a
Transformation that is always valid under apply_transformation: locked
properties get zero deltas and copied sizes are clamped to the minimum
element size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    InfeasibleRule,
    LockedPropertyViolation,
    NotAChain,
    UnknownElement,
    UnmatchedElement,
)
from .geometry import (
    Delta,
    Design,
    Element,
    ElementGeometry,
    GEOMETRY_PROPS,
    MIN_SIZE,
    Transformation,
    overlap_x,
    overlap_y,
)
from .matching import Correspondence
from .rules import (
    BOUNDS_OVERLAP,
    CONTAINMENT,
    HALIGN,
    HORIZONTAL,
    LayoutRule,
    MARGINAL_OFFSET,
    RELATIVE_ORDERING,
    RuleSet,
    SAME_HEIGHT,
    SAME_WIDTH,
    VALIGN,
    make_rule,
    modal_value,
)

_EPS = 1e-9


@dataclass(frozen=True)
class TransferContext:
    """Everything the builders need: designs, mapping, rules, and scale."""

    target: Design
    source: Design
    mapping: Correspondence
    target_rules: RuleSet = field(default_factory=RuleSet)
    source_rules: RuleSet = field(default_factory=RuleSet)

    @property
    def canvas_scale(self) -> tuple:
        return (
            self.target.canvas_width / self.source.canvas_width,
            self.target.canvas_height / self.source.canvas_height,
        )

    def partner_map(self) -> dict:
        return {p.a: p.b for p in self.mapping.pairs}


def _masked(e: Element, d: Delta) -> Delta:
    """Zero out deltas on locked properties."""
    vals = list(d)
    for i, prop in enumerate(GEOMETRY_PROPS):
        if prop in e.locked_properties:
            vals[i] = 0 if prop == "z" else 0.0
    return Delta(*vals)


def _copy_delta(e: Element, f: Element, scale: tuple) -> Delta:
    sx, sy = scale
    g, s = e.geometry, f.geometry
    return _masked(
        e,
        Delta(
            dx=s.x * sx - g.x,
            dy=s.y * sy - g.y,
            dz=s.z - g.z,
            dw=max(s.w * sx, MIN_SIZE) - g.w,
            dh=max(s.h * sy, MIN_SIZE) - g.h,
        ),
    )


def global_layout_copy(ctx: TransferContext) -> Transformation:
    """Move every matched element onto its partner's scaled geometry;
    unmatched elements follow the mean translation of their 3 nearest
    matched neighbors."""
    partners = ctx.partner_map()
    if not partners:
        return Transformation()
    entries: dict = {}
    translations: dict = {}
    for e in ctx.target.elements:
        if e.id in partners:
            d = _copy_delta(e, ctx.source[partners[e.id]], ctx.canvas_scale)
            entries[e.id] = d
            translations[e.id] = (d.dx, d.dy)
    for e in ctx.target.elements:
        if e.id in partners:
            continue
        ranked = sorted(
            translations,
            key=lambda m: (
                math.hypot(
                    ctx.target[m].geometry.cx - e.geometry.cx,
                    ctx.target[m].geometry.cy - e.geometry.cy,
                ),
                m,
            ),
        )[:3]
        if ranked:
            dx = sum(translations[m][0] for m in ranked) / len(ranked)
            dy = sum(translations[m][1] for m in ranked) / len(ranked)
            entries[e.id] = _masked(e, Delta(dx=dx, dy=dy))
    return Transformation(entries)


def element_layout_copy(ctx: TransferContext, ids: Iterable[str]) -> Transformation:
    """Global copy restricted to the selected matched elements."""
    partners = ctx.partner_map()
    entries = {}
    for eid in sorted(set(ids)):
        e = ctx.target[eid]  # raises UnknownElement
        if eid in partners:
            entries[eid] = _copy_delta(e, ctx.source[partners[eid]], ctx.canvas_scale)
    return Transformation(entries)


def property_copy(ctx: TransferContext, ids: Iterable[str], properties: Iterable[str]) -> Transformation:
    """Copy only the named geometry properties from each partner."""
    props = set(properties)
    if not props or props - set(GEOMETRY_PROPS):
        raise ValueError(f"properties must be a non-empty subset of {GEOMETRY_PROPS}")
    partners = ctx.partner_map()
    entries = {}
    for eid in sorted(set(ids)):
        e = ctx.target[eid]
        if eid not in partners:
            raise UnmatchedElement(eid)
        full = _copy_delta(e, ctx.source[partners[eid]], ctx.canvas_scale)
        entries[eid] = Delta(
            dx=full.dx if "x" in props else 0.0,
            dy=full.dy if "y" in props else 0.0,
            dz=full.dz if "z" in props else 0,
            dw=full.dw if "w" in props else 0.0,
            dh=full.dh if "h" in props else 0.0,
        )
    return Transformation(entries)


def set_geometry(design: Design, element_id: str, new_geometry: ElementGeometry) -> Transformation:
    """Direct manipulation: a single-entry delta from old to new."""
    e = design[element_id]
    g = e.geometry
    d = Delta(
        dx=new_geometry.x - g.x,
        dy=new_geometry.y - g.y,
        dz=new_geometry.z - g.z,
        dw=new_geometry.w - g.w,
        dh=new_geometry.h - g.h,
    )
    for prop, dv in zip(GEOMETRY_PROPS, d):
        if dv != 0 and prop in e.locked_properties:
            raise LockedPropertyViolation(f"{element_id}: {prop} is locked")
    return Transformation({element_id: d})


# --- rule enforcement ---------------------------------------------------------


def _axis_prop(rule: LayoutRule) -> str:
    if rule.variant in (HALIGN, SAME_WIDTH):
        return "x" if rule.variant == HALIGN else "w"
    if rule.variant in (VALIGN, SAME_HEIGHT):
        return "y" if rule.variant == VALIGN else "h"
    if rule.variant == MARGINAL_OFFSET:
        return "x" if rule.axis == HORIZONTAL else "y"
    raise ValueError(rule.variant)


def _apply_axis_delta(entries: dict, eid: str, prop: str, dv: float):
    if abs(dv) <= _EPS:
        return
    entries[eid] = Delta(**{{"x": "dx", "y": "dy", "w": "dw", "h": "dh"}[prop]: dv})


def _enforce_alignment(design: Design, rule: LayoutRule) -> dict:
    from .rules import _alignment_values  # shared mode accessors

    values = _alignment_values(design, rule)
    anchor = modal_value(values)
    prop = "x" if rule.variant == HALIGN else "y"
    entries: dict = {}
    for m, v in zip(rule.members, values):
        dv = anchor - v
        if abs(dv) > _EPS:
            if prop in design[m].locked_properties:
                raise InfeasibleRule(f"{m}: {prop} locked away from the anchor value")
            _apply_axis_delta(entries, m, prop, dv)
    return entries


def _enforce_size(design: Design, rule: LayoutRule) -> dict:
    prop = "w" if rule.variant == SAME_WIDTH else "h"
    values = [getattr(design[m].geometry, prop) for m in rule.members]
    anchor = modal_value(values)
    entries: dict = {}
    for m, v in zip(rule.members, values):
        dv = anchor - v
        if abs(dv) > _EPS:
            if prop in design[m].locked_properties:
                raise InfeasibleRule(f"{m}: {prop} locked away from the anchor value")
            _apply_axis_delta(entries, m, prop, dv)
    return entries


def _enforce_offset(design: Design, rule: LayoutRule) -> dict:
    prop = _axis_prop(rule)
    horizontal = rule.axis == HORIZONTAL
    sizes = [design[m].geometry.w if horizontal else design[m].geometry.h for m in rule.members]
    starts = [design[m].geometry.x if horizontal else design[m].geometry.y for m in rule.members]
    prefix = [0.0]
    for size in sizes[:-1]:
        prefix.append(prefix[-1] + size + rule.gap)
    span = prefix[-1] + sizes[-1]
    required = None
    for m, start, off in zip(rule.members, starts, prefix):
        if prop in design[m].locked_properties:
            c = start - off
            if required is not None and abs(required - c) > _EPS:
                raise InfeasibleRule("locked members demand incompatible chain positions")
            required = c
    if required is None:
        lo = min(starts)
        hi = max(s + w for s, w in zip(starts, sizes))
        required = (lo + hi) / 2.0 - span / 2.0
    entries: dict = {}
    for m, start, off in zip(rule.members, starts, prefix):
        _apply_axis_delta(entries, m, prop, required + off - start)
    return entries


def _enforce_containment(design: Design, rule: LayoutRule) -> dict:
    entries: dict = {}
    geo: dict = {m: design[m].geometry for m in rule.members}

    def place(tree):
        pid, subs = tree
        p = geo[pid]
        for sub in subs:
            cid = sub[0]
            c = geo[cid]
            if c.w > p.w + _EPS or c.h > p.h + _EPS:
                raise InfeasibleRule(f"{cid} is larger than its container {pid}")
            nx = min(max(c.x, p.x), p.right - c.w)
            ny = min(max(c.y, p.y), p.bottom - c.h)
            dx, dy = nx - c.x, ny - c.y
            locked = design[cid].locked_properties
            if (abs(dx) > _EPS and "x" in locked) or (abs(dy) > _EPS and "y" in locked):
                raise InfeasibleRule(f"{cid}: position locked outside container")
            if abs(dx) > _EPS or abs(dy) > _EPS:
                entries[cid] = Delta(dx=dx, dy=dy)
            geo[cid] = ElementGeometry(nx, ny, c.z, c.w, c.h)
            place(sub)

    place(rule.tree)
    return entries


def _enforce_overlap(design: Design, rule: LayoutRule) -> dict:
    members = list(rule.members)
    geos = {m: design[m].geometry for m in members}
    movable = [
        m
        for m in members
        if "x" not in design[m].locked_properties and "y" not in design[m].locked_properties
    ]
    mx = sum(g.cx for g in geos.values()) / len(geos)
    my = sum(g.cy for g in geos.values()) / len(geos)

    def centers_at(lam: float) -> dict:
        out = {}
        for m in members:
            g = geos[m]
            if m in movable:
                out[m] = (mx + (1 - lam) * (g.cx - mx), my + (1 - lam) * (g.cy - my))
            else:
                out[m] = (g.cx, g.cy)
        return out

    def satisfied(centers: dict) -> bool:
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                ga, gb = geos[a], geos[b]
                dx = abs(centers[a][0] - centers[b][0])
                dy = abs(centers[a][1] - centers[b][1])
                if (ga.w + gb.w) / 2 - dx <= _EPS or (ga.h + gb.h) / 2 - dy <= _EPS:
                    return False
        return True

    # smallest contraction on a fixed grid; exact minimality is not needed
    for step in range(101):
        lam = step / 100.0
        centers = centers_at(lam)
        if satisfied(centers):
            entries = {}
            for m in movable:
                g = geos[m]
                dx, dy = centers[m][0] - g.cx, centers[m][1] - g.cy
                if abs(dx) > _EPS or abs(dy) > _EPS:
                    entries[m] = Delta(dx=dx, dy=dy)
            return entries
    raise InfeasibleRule("locked members prevent mutual overlap")


def _enforce_ordering(design: Design, rule: LayoutRule) -> dict:
    entries: dict = {}
    pos = {m: (design[m].geometry.y, design[m].geometry.x) for m in rule.members}
    for prev, cur in zip(rule.members, rule.members[1:]):
        py, px = pos[prev]
        cy, cx = pos[cur]
        ny, nx = cy, cx
        if cy < py:
            ny = py
        if ny == py and cx < px:
            nx = px
        dy, dx = ny - cy, nx - cx
        locked = design[cur].locked_properties
        if (abs(dy) > _EPS and "y" in locked) or (abs(dx) > _EPS and "x" in locked):
            raise InfeasibleRule(f"{cur}: locked against reading order")
        if abs(dx) > _EPS or abs(dy) > _EPS:
            entries[cur] = Delta(dx=dx, dy=dy)
        pos[cur] = (ny, nx)
    return entries


def enforce_rule(design: Design, rule: LayoutRule) -> Transformation:
    """Minimal-displacement deltas that make the rule exactly satisfied.

    Members whose needed property is locked act as anchors; if they sit
    away from the required value the rule is infeasible.
    """
    for m in rule.members:
        if m not in design:
            raise UnknownElement(m)
    if rule.variant in (HALIGN, VALIGN):
        entries = _enforce_alignment(design, rule)
    elif rule.variant in (SAME_WIDTH, SAME_HEIGHT):
        entries = _enforce_size(design, rule)
    elif rule.variant == MARGINAL_OFFSET:
        entries = _enforce_offset(design, rule)
    elif rule.variant == CONTAINMENT:
        entries = _enforce_containment(design, rule)
    elif rule.variant == BOUNDS_OVERLAP:
        entries = _enforce_overlap(design, rule)
    elif rule.variant == RELATIVE_ORDERING:
        entries = _enforce_ordering(design, rule)
    else:
        raise ValueError(f"unknown rule variant {rule.variant!r}")
    return Transformation(entries)


def conform_offset(ctx: TransferContext, ids: Iterable[str], axis: str) -> Transformation:
    """Repack the selected chain with the gap its source partners use."""
    ids = sorted(set(ids))
    if len(ids) < 2:
        raise NotAChain("need at least two selected elements")
    partners = ctx.partner_map()
    for eid in ids:
        ctx.target[eid]
        if eid not in partners:
            raise UnmatchedElement(eid)
    horizontal = axis == HORIZONTAL
    members = sorted(
        ids,
        key=lambda m: (
            ctx.target[m].geometry.x if horizontal else ctx.target[m].geometry.y,
            ctx.target[m].geometry.y if horizontal else ctx.target[m].geometry.x,
            m,
        ),
    )
    for a, b in zip(members, members[1:]):
        ga, gb = ctx.target[a].geometry, ctx.target[b].geometry
        edge = ga.right if horizontal else ga.bottom
        start = gb.x if horizontal else gb.y
        if edge > start + _EPS:
            raise NotAChain(f"{a} and {b} overlap along the {axis} axis")

    sx, sy = ctx.canvas_scale
    scale = sx if horizontal else sy
    gaps = []
    for a, b in zip(members, members[1:]):
        fa = ctx.source[partners[a]].geometry
        fb = ctx.source[partners[b]].geometry
        gaps.append(((fb.x - fa.right) if horizontal else (fb.y - fa.bottom)) * scale)
    gap = sum(gaps) / len(gaps)

    prop = "x" if horizontal else "y"
    entries: dict = {}
    first = ctx.target[members[0]].geometry
    cursor = (first.right if horizontal else first.bottom)
    for m in members[1:]:
        g = ctx.target[m].geometry
        current = g.x if horizontal else g.y
        desired = cursor + gap
        if prop in ctx.target[m].locked_properties:
            desired = current
        _apply_axis_delta(entries, m, prop, desired - current)
        cursor = desired + (g.w if horizontal else g.h)
    return Transformation(entries)


# --- mapping source rules into target id space --------------------------------


def map_rule_to_target(rule: LayoutRule, mapping: Correspondence, scale: tuple) -> Optional[LayoutRule]:
    """Translate a source-design rule onto matched target elements.

    Unmatched members are dropped; the rule survives only while it keeps
    enough members to mean anything. Gap/size parameters are rescaled by
    the canvas ratio.
    """
    to_target = {p.b: p.a for p in mapping.pairs}
    sx, sy = scale
    min_needed = 3 if rule.variant == MARGINAL_OFFSET else 2

    if rule.variant == CONTAINMENT:
        if rule.tree is None or rule.tree[0] not in to_target:
            return None

        def map_tree(tree):
            kids = []
            for sub in tree[1]:
                if sub[0] in to_target:
                    kids.append(map_tree(sub))
                else:
                    kids.extend(map_tree(s) for s in sub[1] if s[0] in to_target)
            return (to_target[tree[0]], tuple(kids))

        tree = map_tree(rule.tree)
        members: list = []

        def preorder(t):
            members.append(t[0])
            for s in t[1]:
                preorder(s)

        preorder(tree)
        if len(members) < min_needed:
            return None
        return make_rule(CONTAINMENT, members, tree=tree, weight=rule.weight)

    members = tuple(to_target[m] for m in rule.members if m in to_target)
    if len(members) < min_needed:
        return None
    gap = rule.gap
    if gap is not None:
        gap = gap * (sx if rule.axis == HORIZONTAL else sy)
    value = rule.value
    if value is not None:
        value = value * (sx if rule.variant == SAME_WIDTH else sy)
    if rule.variant in (HALIGN, VALIGN, SAME_WIDTH, SAME_HEIGHT, BOUNDS_OVERLAP):
        members = tuple(sorted(members))
    return make_rule(
        rule.variant,
        members,
        mode=rule.mode,
        axis=rule.axis,
        gap=gap,
        value=value,
        weight=rule.weight,
    )
