"""Session state machine for the transfer loop.

A session owns the target/source designs, their rule sets, the element
mapping, and the accumulated transformation; A* = apply(A, T) and the
output rule set is re-inferred after every mutation. Commands arrive as
tagged dicts (the same shape the HTTP API and scripted replays use) and
push undo snapshots.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import DesignInputError, InfeasibleRule, UnknownCommand, UnknownElement, VltError
from .geometry import (
    Design,
    ElementGeometry,
    Transformation,
    apply_transformation,
    design_diff,
    design_to_json,
    transformation_from_json,
    transformation_to_json,
)
from .matching import (
    Correspondence,
    correspondence_from_json,
    correspondence_to_json,
    match_designs,
    override_match,
)
from .optimize import (
    MODE_HARD,
    RewardBreakdown,
    WeightConfig,
    _with_extra_locks,
    optimize,
    reward,
    weights_from_json,
    weights_to_json,
)
from .rules import (
    InferenceConfig,
    LayoutRule,
    MARGINAL_OFFSET,
    RuleSet,
    SYMMETRIC_VARIANTS,
    infer_rules,
    make_rule,
    rules_for_selection,
    ruleset_to_json,
)
from .svgio import parse_design, serialize_design
from .transfer import (
    TransferContext,
    conform_offset,
    element_layout_copy,
    enforce_rule,
    global_layout_copy,
    map_rule_to_target,
    property_copy,
    set_geometry,
)

UNDO_DEPTH = 50
DEFAULT_THRESHOLD = 0.3


@dataclass(frozen=True)
class Snapshot:
    t: Transformation
    mapping: Correspondence
    weights: WeightConfig
    locks: dict


def breakdown_to_json(b: RewardBreakdown) -> dict:
    return {
        "r-rule": round(b.r_rule, 6),
        "r-off": round(b.r_off, 6),
        "r-con": round(b.r_con, 6),
        "total": round(b.total, 6),
        "t-non-overlap": b.t_non_overlap,
        "e-unique-prop": b.e_unique_prop,
        "per-rule": [
            {"id": rid, "members": n, "residual": round(res, 6), "contribution": round(c, 6)}
            for rid, n, res, c in b.per_rule
        ],
    }


class Session:
    """Single-writer session; callers hold `lock` around mutations."""

    def __init__(
        self,
        session_id: str,
        svg_a: str,
        svg_b: str,
        config: InferenceConfig = InferenceConfig(),
        threshold: float = DEFAULT_THRESHOLD,
    ):
        self.session_id = session_id
        self.svg_a = svg_a
        self.svg_b = svg_b
        self.config = config
        self.threshold = threshold
        self.lock = threading.RLock()

        try:
            self.design_a, self.table_a = parse_design(svg_a)
        except VltError as exc:
            raise DesignInputError("A", exc) from exc
        try:
            self.design_b, self.table_b = parse_design(svg_b)
        except VltError as exc:
            raise DesignInputError("B", exc) from exc

        self.mapping = match_designs(self.design_a, self.design_b, threshold)
        self.rules_a = infer_rules(self.design_a, config)
        self.rules_b = infer_rules(self.design_b, config)
        self.t = Transformation()
        self.a_star = apply_transformation(self.design_a, self.t)
        self.rules_a_star = self.rules_a
        self.weights = WeightConfig()
        self.locks: dict = {}
        self.undo_stack: list = []
        self.last_trace: tuple = ()

    # --- derived views -------------------------------------------------------

    def target_view(self) -> Design:
        """Current output with session locks materialized on its elements."""
        return _with_extra_locks(self.a_star, self.locks)

    def context(self) -> TransferContext:
        return TransferContext(
            target=self.target_view(),
            source=self.design_b,
            mapping=self.mapping,
            target_rules=self.rules_a_star,
            source_rules=self.rules_b,
        )

    def union_rules(self) -> RuleSet:
        """Output rules plus source rules mapped through the correspondence."""
        rules = list(self.rules_a_star)
        seen = {r.rule_id for r in rules}
        scale = self.context().canvas_scale
        for rule in self.rules_b:
            mapped = map_rule_to_target(rule, self.mapping, scale)
            if mapped is not None and mapped.rule_id not in seen:
                seen.add(mapped.rule_id)
                rules.append(mapped)
        return RuleSet(tuple(rules), self.config)

    def reward_breakdown(self, mode: str = MODE_HARD) -> RewardBreakdown:
        return reward(self.a_star, self.union_rules(), self.weights, mode)

    # --- command processing ----------------------------------------------------

    def mutate(self, command: dict) -> dict:
        ctype = command.get("type")
        if ctype == "undo":
            return self._undo()
        snapshot = Snapshot(self.t, self.mapping, self.weights, dict(self.locks))
        delta, extra = self._execute(command)
        self.undo_stack.append(snapshot)
        if len(self.undo_stack) > UNDO_DEPTH:
            self.undo_stack.pop(0)
        changed: list = []
        if delta is not None and delta:
            new_star = apply_transformation(self.a_star, delta)
            changed = sorted(delta.entries)
            self.a_star = new_star
            self.t = design_diff(self.design_a, self.a_star)
            self.rules_a_star = infer_rules(self.a_star, self.config)
        return {"changed": changed, **extra}

    def _execute(self, command: dict):
        ctype = command.get("type")
        ctx = self.context()
        if ctype == "global-copy":
            return global_layout_copy(ctx), {}
        if ctype == "element-copy":
            return element_layout_copy(ctx, command["ids"]), {}
        if ctype == "property-copy":
            return property_copy(ctx, command["ids"], command["properties"]), {}
        if ctype == "enforce-rule":
            return self._enforce(ctx, command), {}
        if ctype == "conform-offset":
            return conform_offset(ctx, command["ids"], command["axis"]), {}
        if ctype == "set-geometry":
            g = command["geometry"]
            target = ElementGeometry(g["x"], g["y"], int(g["z"]), g["w"], g["h"])
            return set_geometry(ctx.target, command["id"], target), {}
        if ctype == "override-match":
            self.mapping = override_match(self.mapping, command["a"], command.get("b"))
            return None, {}
        if ctype == "set-weights":
            merged = dict(self.weights.rule_weights)
            merged.update(command.get("rules", {}))
            self.weights = WeightConfig(
                rule_weights=merged,
                off_weight=command.get("off", self.weights.off_weight),
                con_weight=command.get("con", self.weights.con_weight),
                sigma=command.get("sigma", self.weights.sigma),
            )
            return None, {}
        if ctype == "set-locks":
            props = frozenset(command.get("properties", ()))
            if command["id"] not in self.a_star:
                raise UnknownElement(command["id"])
            if props:
                self.locks[command["id"]] = props
            else:
                self.locks.pop(command["id"], None)
            return None, {}
        if ctype == "optimize":
            delta, trace = optimize(
                self.a_star,
                self.union_rules(),
                self.weights,
                locks=self.locks,
                budget=command.get("budget", 100),
                seed=command.get("seed", 0),
                selection=command.get("selection"),
            )
            self.last_trace = trace
            return delta, {"trace": [breakdown_to_json(b) for b in trace]}
        raise UnknownCommand(str(ctype))

    def _enforce(self, ctx: TransferContext, command: dict) -> Transformation:
        rule_id = command["ruleId"]
        origin = command.get("source", "output")
        if origin == "source":
            rule = self.rules_b.get(rule_id)
            if rule is not None:
                rule = map_rule_to_target(rule, self.mapping, ctx.canvas_scale)
                if rule is None:
                    raise InfeasibleRule("too few matched members to apply the source rule")
        else:
            rule = self.rules_a_star.get(rule_id) or self.union_rules().get(rule_id)
        if rule is None:
            raise UnknownCommand(f"no rule {rule_id!r}")
        extras = command.get("extraMembers") or ()
        if extras:
            rule = self._with_members(rule, extras)
        return enforce_rule(ctx.target, rule)

    def _with_members(self, rule: LayoutRule, extras: Iterable[str]) -> LayoutRule:
        for eid in extras:
            if eid not in self.a_star:
                raise UnknownElement(eid)
        members = list(rule.members) + [e for e in extras if e not in rule.members]
        if rule.variant in SYMMETRIC_VARIANTS and rule.variant != MARGINAL_OFFSET:
            members = sorted(members)
        elif rule.variant == MARGINAL_OFFSET:
            horizontal = rule.axis == "horizontal"
            members.sort(
                key=lambda m: (
                    self.a_star[m].geometry.x if horizontal else self.a_star[m].geometry.y,
                    m,
                )
            )
        else:
            raise UnknownCommand(f"cannot add members to a {rule.variant} rule")
        return make_rule(
            rule.variant,
            members,
            mode=rule.mode,
            axis=rule.axis,
            gap=rule.gap,
            value=rule.value,
            weight=rule.weight,
        )

    def _undo(self) -> dict:
        if not self.undo_stack:
            return {"changed": []}
        snap = self.undo_stack.pop()
        before = {e.id: e.geometry for e in self.a_star.elements}
        self.t = snap.t
        self.mapping = snap.mapping
        self.weights = snap.weights
        self.locks = dict(snap.locks)
        self.a_star = apply_transformation(self.design_a, self.t)
        self.rules_a_star = infer_rules(self.a_star, self.config)
        changed = sorted(
            e.id for e in self.a_star.elements if before.get(e.id) != e.geometry
        )
        return {"changed": changed}

    # --- views -----------------------------------------------------------------

    def rules_for(self, selection: Iterable[str], canvas: str = "output") -> RuleSet:
        rules = self.rules_b if canvas == "source" else self.rules_a_star
        return rules_for_selection(rules, selection)

    def export_svg(self) -> bytes:
        return serialize_design(self.a_star, self.table_a)

    def state_json(self) -> dict:
        return {
            "id": self.session_id,
            "a": design_to_json(self.design_a),
            "b": design_to_json(self.design_b),
            "aStar": design_to_json(self.a_star),
            "t": transformation_to_json(self.t),
            "mapping": correspondence_to_json(self.mapping),
            "rulesA": ruleset_to_json(self.rules_a),
            "rulesB": ruleset_to_json(self.rules_b),
            "rulesAStar": ruleset_to_json(self.rules_a_star),
            "weights": weights_to_json(self.weights),
            "locks": {k: sorted(v) for k, v in sorted(self.locks.items())},
            "reward": breakdown_to_json(self.reward_breakdown()),
            "undoDepth": len(self.undo_stack),
        }


def create_session(
    svg_a: "bytes | str",
    svg_b: "bytes | str",
    session_id: Optional[str] = None,
    config: InferenceConfig = InferenceConfig(),
    threshold: float = DEFAULT_THRESHOLD,
) -> Session:
    if isinstance(svg_a, bytes):
        svg_a = svg_a.decode("utf-8")
    if isinstance(svg_b, bytes):
        svg_b = svg_b.decode("utf-8")
    return Session(session_id or uuid.uuid4().hex, svg_a, svg_b, config, threshold)


# --- persistence ----------------------------------------------------------------


class SessionStore:
    """One JSON document per session; survives service restarts."""

    def __init__(self, root: Optional[str] = None):
        self.root = Path(root or os.environ.get("VLT_DATA_DIR", "vlt-sessions"))

    def path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def save(self, session: Session):
        self.root.mkdir(parents=True, exist_ok=True)
        doc = {
            "id": session.session_id,
            "svgA": session.svg_a,
            "svgB": session.svg_b,
            "threshold": session.threshold,
            "t": transformation_to_json(session.t),
            "mapping": correspondence_to_json(session.mapping),
            "weights": weights_to_json(session.weights),
            "locks": {k: sorted(v) for k, v in session.locks.items()},
            "undo": [
                {
                    "t": transformation_to_json(s.t),
                    "mapping": correspondence_to_json(s.mapping),
                    "weights": weights_to_json(s.weights),
                    "locks": {k: sorted(v) for k, v in s.locks.items()},
                }
                for s in session.undo_stack
            ],
        }
        tmp = self.path(session.session_id).with_suffix(".tmp")
        tmp.write_text(json.dumps(doc), encoding="utf-8")
        tmp.replace(self.path(session.session_id))

    def load(self, session_id: str) -> Session:
        doc = json.loads(self.path(session_id).read_text(encoding="utf-8"))
        session = Session(doc["id"], doc["svgA"], doc["svgB"], threshold=doc.get("threshold", 0.3))
        session.t = transformation_from_json(doc["t"])
        session.mapping = correspondence_from_json(doc["mapping"])
        session.weights = weights_from_json(doc["weights"])
        session.locks = {k: frozenset(v) for k, v in doc.get("locks", {}).items()}
        session.undo_stack = [
            Snapshot(
                t=transformation_from_json(s["t"]),
                mapping=correspondence_from_json(s["mapping"]),
                weights=weights_from_json(s["weights"]),
                locks={k: frozenset(v) for k, v in s.get("locks", {}).items()},
            )
            for s in doc.get("undo", [])
        ]
        session.a_star = apply_transformation(session.design_a, session.t)
        session.rules_a_star = infer_rules(session.a_star, session.config)
        return session

    def exists(self, session_id: str) -> bool:
        return self.path(session_id).exists()
