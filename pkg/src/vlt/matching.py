"""Feature-based element correspondence between two designs.

Each element becomes a fixed-length vector (kind, normalized geometry,
style bucket, text length, local density); pairing is the exact optimal
injective assignment on the similarity matrix, with manual overrides that
survive recomputation.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import UnknownElement
from .geometry import Design, Element, ELEMENT_KINDS

DEFAULT_THRESHOLD = 0.3

_STYLE_BUCKETS = 8
_TEXT_BUCKETS = (0, 4, 8, 16, 32)  # upper bounds; beyond the last -> 1.0
FEATURE_LENGTH = len(ELEMENT_KINDS) + 4 + 1 + _STYLE_BUCKETS + 1 + 1


def element_features(e: Element, d: Design) -> np.ndarray:
    """Fixed-length feature vector with every component in [0, 1]."""
    if e.id not in d:
        raise UnknownElement(e.id)
    n = len(d.elements)
    g = e.geometry
    kind = [1.0 if e.kind == k else 0.0 for k in ELEMENT_KINDS]
    geom = [
        min(max(g.x / d.canvas_width, 0.0), 1.0),
        min(max(g.y / d.canvas_height, 0.0), 1.0),
        min(g.w / d.canvas_width, 1.0),
        min(g.h / d.canvas_height, 1.0),
    ]
    depth = [g.z / max(n - 1, 1)]
    bucket = int(hashlib.md5(e.style_digest.encode("utf-8")).hexdigest(), 16) % _STYLE_BUCKETS
    style = [1.0 if i == bucket else 0.0 for i in range(_STYLE_BUCKETS)]
    tlen = len(e.text_content or "")
    tfeat = 1.0
    for i, bound in enumerate(_TEXT_BUCKETS):
        if tlen <= bound:
            tfeat = i / len(_TEXT_BUCKETS)
            break
    radius = math.hypot(g.w, g.h)  # 2x the bbox half-diagonal
    neighbors = sum(
        1
        for f in d.elements
        if f.id != e.id and math.hypot(f.geometry.cx - g.cx, f.geometry.cy - g.cy) <= radius
    )
    density = [neighbors / max(n - 1, 1)]
    return np.array(kind + geom + depth + style + [tfeat] + density, dtype=float)


def similarity(fa: np.ndarray, fb: np.ndarray, same_kind: bool) -> float:
    if not same_kind:
        return 0.0
    return 1.0 - float(np.linalg.norm(fa - fb)) / math.sqrt(FEATURE_LENGTH)


class MatchPair(NamedTuple):
    a: str
    b: str
    score: float
    overridden: bool = False


@dataclass(frozen=True)
class Correspondence:
    """Injective partial mapping between two designs' element ids."""

    pairs: tuple = ()
    unmatched_a: frozenset = frozenset()
    unmatched_b: frozenset = frozenset()
    overrides: frozenset = frozenset()

    def __post_init__(self):
        pairs = tuple(MatchPair(*p) for p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "unmatched_a", frozenset(self.unmatched_a))
        object.__setattr__(self, "unmatched_b", frozenset(self.unmatched_b))
        object.__setattr__(self, "overrides", frozenset(self.overrides))
        a_ids = [p.a for p in pairs]
        b_ids = [p.b for p in pairs]
        if len(a_ids) != len(set(a_ids)) or len(b_ids) != len(set(b_ids)):
            raise ValueError("correspondence must be injective")

    def partner_of(self, a_id: str) -> Optional[str]:
        for p in self.pairs:
            if p.a == a_id:
                return p.b
        return None

    def pinned(self) -> dict:
        """a-id -> forced b-id (or None for forced-unmatched)."""
        out = {}
        for p in self.pairs:
            if p.a in self.overrides:
                out[p.a] = p.b
        for a in self.overrides & self.unmatched_a:
            out[a] = None
        return out

    @property
    def a_ids(self) -> frozenset:
        return frozenset(p.a for p in self.pairs) | self.unmatched_a

    @property
    def b_ids(self) -> frozenset:
        return frozenset(p.b for p in self.pairs) | self.unmatched_b


def _canonical_assignment(rows: list, cols: list, sim: np.ndarray) -> list:
    """Optimal assignment, then 2-opt swaps toward the lexicographically
    smallest partner sequence among equal-total alternatives."""
    if not rows or not cols:
        return []
    ri, ci = linear_sum_assignment(sim, maximize=True)
    assign = sorted(zip(ri.tolist(), ci.tolist()))
    changed = True
    while changed:
        changed = False
        for p in range(len(assign)):
            for q in range(p + 1, len(assign)):
                (i, j), (k, l) = assign[p], assign[q]
                if sim[i, l] + sim[k, j] == sim[i, j] + sim[k, l] and cols[l] < cols[j]:
                    assign[p] = (i, l)
                    assign[q] = (k, j)
                    changed = True
    return assign


def match_designs(
    a: Design,
    b: Design,
    threshold: float = DEFAULT_THRESHOLD,
    prior: Optional[Correspondence] = None,
) -> Correspondence:
    """Score and optimally pair elements of `a` with elements of `b`.

    Pairs scoring below `threshold` (and all cross-kind pairs) are left
    unmatched. Overrides recorded in `prior` are pinned before the
    assignment runs, so they survive recomputation.
    """
    pins: dict = {}
    if prior is not None:
        for a_id, b_id in prior.pinned().items():
            if a_id in a and (b_id is None or b_id in b):
                pins[a_id] = b_id
    pinned_bs = {v for v in pins.values() if v is not None}

    free_a = [e for e in a.elements if e.id not in pins]
    free_b = [e for e in b.elements if e.id not in pinned_bs]
    fa = {e.id: element_features(e, a) for e in free_a}
    fb = {e.id: element_features(e, b) for e in free_b}
    rows = sorted(fa)
    cols = sorted(fb)
    sim = np.zeros((len(rows), len(cols)))
    for i, ra in enumerate(rows):
        for j, cb in enumerate(cols):
            sim[i, j] = similarity(fa[ra], fb[cb], a[ra].kind == b[cb].kind)

    pairs = []
    for a_id, b_id in sorted(pins.items()):
        if b_id is not None:
            pairs.append(MatchPair(a_id, b_id, 1.0, True))
    for i, j in _canonical_assignment(rows, cols, sim):
        score = float(sim[i, j])
        if score > 0.0 and score >= threshold:
            pairs.append(MatchPair(rows[i], cols[j], score, False))
    pairs.sort(key=lambda p: p.a)

    matched_a = {p.a for p in pairs}
    matched_b = {p.b for p in pairs}
    return Correspondence(
        pairs=tuple(pairs),
        unmatched_a=frozenset(a.ids) - matched_a,
        unmatched_b=frozenset(b.ids) - matched_b,
        overrides=frozenset(pins),
    )


def override_match(m: Correspondence, a_id: str, b_id: Optional[str]) -> Correspondence:
    """Force (a_id, b_id) as an overridden pair, or force a_id unmatched.

    Any prior partner of either id is evicted to unmatched; an evicted
    override loses its pin.
    """
    if a_id not in m.a_ids:
        raise UnknownElement(a_id)
    if b_id is not None and b_id not in m.b_ids:
        raise UnknownElement(b_id)
    kept = [p for p in m.pairs if p.a != a_id and p.b != b_id]
    evicted = {p.a for p in m.pairs if p.a != a_id and p.b == b_id}
    if b_id is not None:
        kept.append(MatchPair(a_id, b_id, 1.0, True))
    kept.sort(key=lambda p: p.a)
    matched_a = {p.a for p in kept}
    matched_b = {p.b for p in kept}
    return Correspondence(
        pairs=tuple(kept),
        unmatched_a=m.a_ids - matched_a,
        unmatched_b=m.b_ids - matched_b,
        overrides=(m.overrides - evicted) | {a_id},
    )


def correspondence_to_json(m: Correspondence) -> dict:
    out = {
        "pairs": [
            {"a": p.a, "b": p.b, "score": round(p.score, 6), "overridden": p.overridden}
            for p in m.pairs
        ],
        "unmatchedA": sorted(m.unmatched_a),
        "unmatchedB": sorted(m.unmatched_b),
    }
    forced_unmatched = sorted(m.overrides & m.unmatched_a)
    if forced_unmatched:
        out["overriddenUnmatched"] = forced_unmatched
    return out


def correspondence_from_json(data: dict) -> Correspondence:
    pairs = tuple(
        MatchPair(p["a"], p["b"], p["score"], p.get("overridden", False)) for p in data["pairs"]
    )
    overrides = {p.a for p in pairs if p.overridden} | set(data.get("overriddenUnmatched", ()))
    return Correspondence(
        pairs=pairs,
        unmatched_a=frozenset(data.get("unmatchedA", ())),
        unmatched_b=frozenset(data.get("unmatchedB", ())),
        overrides=frozenset(overrides),
    )
