"""Element/design data model, per-element deltas, and rectangle relations.

Every type here is immutable and every operation is a pure function, so
values can be shared freely across threads and sessions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import LockedPropertyViolation, MinSizeViolation, UnknownElement

MIN_SIZE = 1.0
# Bounding-box containment tolerates 1-2 units of stroke bleed.
CONTAINMENT_COVERAGE = 0.98

GEOMETRY_PROPS = ("x", "y", "z", "w", "h")
ELEMENT_KINDS = ("rect", "ellipse", "text", "path", "image", "group")


@dataclass(frozen=True)
class ElementGeometry:
    """Axis-aligned box plus layer index: (x, y) is the top-left corner."""

    x: float
    y: float
    z: int
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.w < MIN_SIZE or self.h < MIN_SIZE:
            raise MinSizeViolation(f"w and h must be >= {MIN_SIZE}, got {self.w}x{self.h}")
        if not isinstance(self.z, int) or isinstance(self.z, bool) or self.z < 0:
            raise ValueError(f"z must be a non-negative integer, got {self.z!r}")

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Element:
    id: str
    geometry: ElementGeometry
    kind: str
    style_digest: str = ""
    text_content: Optional[str] = None
    locked_properties: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        object.__setattr__(self, "locked_properties", frozenset(self.locked_properties))
        bad = self.locked_properties - set(GEOMETRY_PROPS)
        if bad:
            raise ValueError(f"locked properties must name geometry fields, got {sorted(bad)}")


@dataclass(frozen=True)
class Design:
    """A canvas plus an ordered list of elements.

    z values are normalized at construction to a dense 0..n-1 ranking of
    (z, list position), so document order breaks z ties deterministically.
    """

    canvas_width: float
    canvas_height: float
    elements: tuple = ()

    def __post_init__(self):
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise ValueError("canvas dimensions must be positive")
        elements = _normalize_z(tuple(self.elements))
        by_id = {e.id: e for e in elements}
        if len(by_id) != len(elements):
            raise ValueError("element ids must be pairwise distinct")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_by_id", by_id)

    def __getitem__(self, element_id: str) -> Element:
        try:
            return self._by_id[element_id]
        except KeyError:
            raise UnknownElement(element_id) from None

    def __contains__(self, element_id: str) -> bool:
        return element_id in self._by_id

    @property
    def ids(self) -> tuple:
        return tuple(e.id for e in self.elements)


def _normalize_z(elements: tuple) -> tuple:
    order = sorted(range(len(elements)), key=lambda i: (elements[i].geometry.z, i))
    ranks = {idx: rank for rank, idx in enumerate(order)}
    out = []
    for i, e in enumerate(elements):
        if e.geometry.z != ranks[i]:
            e = replace(e, geometry=replace(e.geometry, z=ranks[i]))
        out.append(e)
    return tuple(out)


class Delta(NamedTuple):
    """Per-element geometry increments; dz reorders layers."""

    dx: float = 0.0
    dy: float = 0.0
    dz: int = 0
    dw: float = 0.0
    dh: float = 0.0


@dataclass(frozen=True)
class Transformation:
    """Sparse map element id -> Delta; absent id means zero deltas.

    All-zero entries are dropped at construction, so the empty
    transformation has a single canonical representation.
    """

    entries: Mapping[str, Delta] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for eid, d in self.entries.items():
            d = Delta(*d)
            if not all(math.isfinite(v) for v in (d.dx, d.dy, d.dw, d.dh)):
                raise ValueError(f"non-finite delta for {eid!r}")
            if d.dz != int(d.dz):
                raise ValueError(f"dz must be an integer, got {d.dz!r}")
            d = d._replace(dz=int(d.dz))
            if d != Delta():
                clean[eid] = d
        object.__setattr__(self, "entries", dict(clean))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def get(self, element_id: str) -> Delta:
        return self.entries.get(element_id, Delta())

    def __eq__(self, other):
        if not isinstance(other, Transformation):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))


EMPTY_TRANSFORMATION = Transformation()


def apply_transformation(design: Design, t: Transformation) -> Design:
    """Apply per-element deltas, returning a new design.

    Raises UnknownElement / MinSizeViolation / LockedPropertyViolation
    before touching anything; the input design is never modified.
    """
    for eid, d in t.entries.items():
        if eid not in design:
            raise UnknownElement(eid)
        e = design[eid]
        for prop, dv in zip(GEOMETRY_PROPS, d):
            if dv != 0 and prop in e.locked_properties:
                raise LockedPropertyViolation(f"{eid}: locked {prop} got delta {dv}")
        if e.geometry.w + d.dw < MIN_SIZE or e.geometry.h + d.dh < MIN_SIZE:
            raise MinSizeViolation(
                f"{eid}: resulting size {e.geometry.w + d.dw}x{e.geometry.h + d.dh}"
            )
    moved = []
    for e in design.elements:
        d = t.get(e.id)
        g = e.geometry
        moved.append(
            replace(
                e,
                geometry=ElementGeometry(
                    x=g.x + d.dx, y=g.y + d.dy, z=g.z + d.dz, w=g.w + d.dw, h=g.h + d.dh
                ),
            )
        )
    return replace(design, elements=tuple(moved))


def compose(t1: Transformation, t2: Transformation) -> Transformation:
    """Component-wise sum; ids present in only one input pass through."""
    merged = dict(t1.entries)
    for eid, d in t2.entries.items():
        p = merged.get(eid, Delta())
        merged[eid] = Delta(p.dx + d.dx, p.dy + d.dy, p.dz + d.dz, p.dw + d.dw, p.dh + d.dh)
    return Transformation(merged)


def design_diff(base: Design, target: Design) -> Transformation:
    """The transformation taking `base` to `target` (same ids required)."""
    if set(base.ids) != set(target.ids):
        raise UnknownElement("designs do not share the same element ids")
    entries = {}
    for e in base.elements:
        g0, g1 = e.geometry, target[e.id].geometry
        entries[e.id] = Delta(g1.x - g0.x, g1.y - g0.y, g1.z - g0.z, g1.w - g0.w, g1.h - g0.h)
    return Transformation(entries)


RELATION_CONTAINS = "a-contains-b"
RELATION_INSIDE = "b-contains-a"
RELATION_OVERLAP = "overlap"
RELATION_DISJOINT = "disjoint"


class RelationReport(NamedTuple):
    kind: str
    horizontal_gap: Optional[float] = None
    vertical_gap: Optional[float] = None


def overlap_x(a: ElementGeometry, b: ElementGeometry) -> float:
    """Signed x-interval overlap; negative magnitude is the gap."""
    return min(a.right, b.right) - max(a.x, b.x)


def overlap_y(a: ElementGeometry, b: ElementGeometry) -> float:
    return min(a.bottom, b.bottom) - max(a.y, b.y)


def bounds_relation(a: ElementGeometry, b: ElementGeometry) -> RelationReport:
    """Classify the pair as containment, overlap, or disjoint-with-gaps.

    Containment holds when the intersection covers >= 98% of the smaller
    box's area and the container is strictly larger; coincident equal
    boxes therefore report overlap.
    """
    ox = overlap_x(a, b)
    oy = overlap_y(a, b)
    if ox <= 0 or oy <= 0:
        return RelationReport(
            RELATION_DISJOINT,
            horizontal_gap=-ox if ox <= 0 else None,
            vertical_gap=-oy if oy <= 0 else None,
        )
    inter = ox * oy
    if inter >= CONTAINMENT_COVERAGE * b.area and a.area > b.area:
        return RelationReport(RELATION_CONTAINS)
    if inter >= CONTAINMENT_COVERAGE * a.area and b.area > a.area:
        return RelationReport(RELATION_INSIDE)
    return RelationReport(RELATION_OVERLAP)


def contains(a: ElementGeometry, b: ElementGeometry) -> bool:
    return bounds_relation(a, b).kind == RELATION_CONTAINS


# --- canonical JSON wire format ---------------------------------------------


def _num(v: float):
    v = round(float(v), 6)
    return int(v) if v == int(v) and abs(v) < 2**53 else v


def geometry_to_json(g: ElementGeometry) -> dict:
    return {"x": _num(g.x), "y": _num(g.y), "z": g.z, "w": _num(g.w), "h": _num(g.h)}


def element_to_json(e: Element) -> dict:
    return {
        "id": e.id,
        "geometry": geometry_to_json(e.geometry),
        "kind": e.kind,
        "style-digest": e.style_digest,
        "text-content": e.text_content,
        "locked-properties": sorted(e.locked_properties),
    }


def design_to_json(design: Design) -> dict:
    return {
        "canvas-width": _num(design.canvas_width),
        "canvas-height": _num(design.canvas_height),
        "elements": [element_to_json(e) for e in design.elements],
    }


def design_from_json(data: dict) -> Design:
    elements = []
    for obj in data["elements"]:
        g = obj["geometry"]
        elements.append(
            Element(
                id=obj["id"],
                geometry=ElementGeometry(g["x"], g["y"], int(g["z"]), g["w"], g["h"]),
                kind=obj["kind"],
                style_digest=obj.get("style-digest", ""),
                text_content=obj.get("text-content"),
                locked_properties=frozenset(obj.get("locked-properties", ())),
            )
        )
    return Design(data["canvas-width"], data["canvas-height"], tuple(elements))


def transformation_to_json(t: Transformation) -> dict:
    return {
        "entries": {
            eid: [_num(d.dx), _num(d.dy), d.dz, _num(d.dw), _num(d.dh)]
            for eid, d in sorted(t.entries.items())
        }
    }


def transformation_from_json(data: dict) -> Transformation:
    return Transformation({eid: Delta(*vals) for eid, vals in data["entries"].items()})
