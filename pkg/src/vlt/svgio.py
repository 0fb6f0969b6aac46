"""SVG subset parser/serializer.

Parses rect, circle, ellipse, image, text, path and id-carrying groups
into a Design, flattening ancestor translate/scale transforms into canvas
coordinates. Everything the engine does not model (defs, gradients,
unknown tags) is carried through opaque fragments so exported SVG keeps
the original styling byte-for-byte wherever geometry was not edited.
"""

from __future__ import annotations

import copy
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import (
    MalformedXml,
    MissingCanvasSize,
    MissingFragment,
    UnsupportedTransform,
)
from .geometry import MIN_SIZE, Design, Element, ElementGeometry

SVG_NS = "http://www.w3.org/2000/svg"
XLINK_NS = "http://www.w3.org/1999/xlink"

LEAF_KINDS = {
    "rect": "rect",
    "circle": "ellipse",
    "ellipse": "ellipse",
    "image": "image",
    "text": "text",
    "path": "path",
}

# Presentation attributes pushed down when an anonymous group is flattened.
INHERITED_ATTRS = (
    "fill",
    "fill-opacity",
    "fill-rule",
    "stroke",
    "stroke-width",
    "stroke-opacity",
    "stroke-dasharray",
    "stroke-linecap",
    "stroke-linejoin",
    "font-family",
    "font-size",
    "font-weight",
    "font-style",
    "text-anchor",
    "color",
    "style",
)

STYLE_DIGEST_KEYS = ("fill", "stroke", "stroke-width", "font-family", "font-size", "font-weight")

TEXT_CHAR_WIDTH = 0.6  # of font-size, per character
TEXT_ASCENT = 1.0  # of font-size, baseline to bbox top
TEXT_DESCENT = 0.2  # of font-size, baseline to bbox bottom

BINDING_RECT = "rect-attrs"
BINDING_CENTER = "center-radius"
BINDING_WRAPPER = "translate-scale-wrapper"
BINDING_TEXT = "text-anchor"

_EPS = 1e-9


class Affine(NamedTuple):
    """Axis-aligned affine map (scale then translate); no rotation/skew."""

    sx: float = 1.0
    sy: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def apply(self, x: float, y: float) -> tuple:
        return (self.sx * x + self.tx, self.sy * y + self.ty)

    def compose(self, inner: "Affine") -> "Affine":
        """self after inner (points go through `inner` first)."""
        return Affine(
            self.sx * inner.sx,
            self.sy * inner.sy,
            self.sx * inner.tx + self.tx,
            self.sy * inner.ty + self.ty,
        )

    def inverse(self) -> "Affine":
        return Affine(1.0 / self.sx, 1.0 / self.sy, -self.tx / self.sx, -self.ty / self.sy)

    def map_box(self, x: float, y: float, w: float, h: float) -> tuple:
        x1, y1 = self.apply(x, y)
        x2, y2 = self.apply(x + w, y + h)
        return (min(x1, x2), min(y1, y2), abs(x2 - x1), abs(y2 - y1))

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY


IDENTITY = Affine()

_TRANSFORM_RE = re.compile(r"([a-zA-Z]+)\s*\(([^)]*)\)")
_NUM_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_transform(text: Optional[str]) -> Affine:
    """Parse a transform attribute; rejects anything with a rotation part."""
    if not text or not text.strip():
        return IDENTITY
    acc = IDENTITY
    consumed = 0
    for m in _TRANSFORM_RE.finditer(text):
        consumed += 1
        op = m.group(1)
        args = [float(v) for v in _NUM_RE.findall(m.group(2))]
        if op == "translate":
            tx = args[0] if args else 0.0
            ty = args[1] if len(args) > 1 else 0.0
            t = Affine(1.0, 1.0, tx, ty)
        elif op == "scale":
            sx = args[0] if args else 1.0
            sy = args[1] if len(args) > 1 else sx
            if sx == 0 or sy == 0:
                raise UnsupportedTransform(f"zero scale factor in {text!r}")
            t = Affine(sx, sy, 0.0, 0.0)
        elif op == "matrix" and len(args) == 6:
            a, b, c, d, e, f = args
            if b != 0 or c != 0:
                raise UnsupportedTransform(f"matrix with rotation/skew part: {text!r}")
            if a == 0 or d == 0:
                raise UnsupportedTransform(f"zero scale factor in {text!r}")
            t = Affine(a, d, e, f)
        else:
            raise UnsupportedTransform(f"unsupported transform {op!r}")
        acc = acc.compose(t)
    if consumed == 0:
        raise UnsupportedTransform(f"unparseable transform {text!r}")
    return acc


def _local(tag) -> str:
    if not isinstance(tag, str):
        return ""  # comments / processing instructions
    return tag.rsplit("}", 1)[-1]


def _parse_style(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(";"):
        if ":" in part:
            k, v = part.split(":", 1)
            out[k.strip()] = v.strip()
    return out


def _presentation(node: ET.Element, prop: str) -> Optional[str]:
    style = _parse_style(node.get("style"))
    if prop in style:
        return style[prop]
    return node.get(prop)


def _length(value: Optional[str]) -> Optional[float]:
    if value is None:
        return None
    v = value.strip()
    if v.endswith("px"):
        v = v[:-2]
    try:
        return float(v)
    except ValueError:
        return None


def style_digest(node: ET.Element) -> str:
    parts = []
    for key in STYLE_DIGEST_KEYS:
        v = _presentation(node, key)
        if v is not None:
            parts.append(f"{key}={v.strip()}")
    return ";".join(parts)


@dataclass
class SourceFragment:
    """Opaque original markup plus how engine geometry maps onto it."""

    element_id: str
    node: ET.Element
    geometry_binding: str
    ancestor: Affine  # flattened transforms of the (removed) ancestors
    to_canvas: Affine  # ancestor composed with the node's own transform
    original_geometry: ElementGeometry
    meta: dict = field(default_factory=dict)

    @property
    def original_markup(self) -> str:
        return _write_node(self.node)


@dataclass
class FragmentTable:
    root_attrs: dict
    fragments: dict = field(default_factory=dict)
    # Document skeleton: ("element", id) and ("passthrough", node, Affine)
    # entries in original order; elements re-enter sorted by z.
    slots: list = field(default_factory=list)


class _Parser:
    def __init__(self, root: ET.Element):
        self.root = root
        self.table = FragmentTable(root_attrs=dict(root.attrib))
        self.elements: list = []
        self.used_ids = {n.get("id") for n in root.iter() if n.get("id")}
        self.engine_ids: set = set()
        self.synth_counter = 0

    def element_id(self, node: ET.Element, tag: str) -> str:
        eid = node.get("id")
        if eid and eid not in self.engine_ids:
            self.engine_ids.add(eid)
            return eid
        while True:
            self.synth_counter += 1
            eid = f"{tag}-{self.synth_counter}"
            if eid not in self.used_ids and eid not in self.engine_ids:
                self.engine_ids.add(eid)
                return eid

    def walk(self, parent: ET.Element, ancestor: Affine):
        for node in parent:
            tag = _local(node.tag)
            if tag in LEAF_KINDS:
                self.add_leaf(node, tag, ancestor)
            elif tag == "g":
                own = parse_transform(node.get("transform"))
                if node.get("id"):
                    self.add_group(node, ancestor)
                else:
                    self.flatten_group(node, ancestor.compose(own))
            else:
                self.add_passthrough(node, ancestor)

    def flatten_group(self, node: ET.Element, acc: Affine):
        inherit = {k: v for k, v in node.attrib.items() if k in INHERITED_ATTRS}
        for child in node:
            for k, v in inherit.items():
                if child.get(k) is None and _local(child.tag) != "":
                    child.set(k, v)
        self.walk(node, acc)

    def add_passthrough(self, node: ET.Element, ancestor: Affine):
        frag = copy.deepcopy(node)
        frag.tail = None
        self.table.slots.append(("passthrough", frag, ancestor))

    def add_leaf(self, node: ET.Element, tag: str, ancestor: Affine):
        own = parse_transform(node.get("transform"))
        to_canvas = ancestor.compose(own)
        meta: dict = {}
        box = self.local_box(node, tag, meta)
        if box is None:
            self.add_passthrough(node, ancestor)
            return
        x, y, w, h = to_canvas.map_box(*box)
        if tag == "path":
            w, h = max(w, MIN_SIZE), max(h, MIN_SIZE)
        if w < MIN_SIZE or h < MIN_SIZE:
            self.add_passthrough(node, ancestor)
            return
        binding = {
            "rect": BINDING_RECT,
            "image": BINDING_RECT,
            "circle": BINDING_CENTER,
            "ellipse": BINDING_CENTER,
            "text": BINDING_TEXT,
            "path": BINDING_WRAPPER,
        }[tag]
        meta["local_box"] = box
        self.finish_element(node, tag, LEAF_KINDS[tag], binding, ancestor, to_canvas, (x, y, w, h), meta)

    def add_group(self, node: ET.Element, ancestor: Affine):
        own = parse_transform(node.get("transform"))
        to_canvas = ancestor.compose(own)
        box = self.group_box(node, to_canvas)
        if box is None or box[2] < MIN_SIZE or box[3] < MIN_SIZE:
            self.add_passthrough(node, ancestor)
            return
        self.finish_element(node, "g", "group", BINDING_WRAPPER, ancestor, to_canvas, box, {})

    def group_box(self, node: ET.Element, acc: Affine) -> Optional[tuple]:
        lo = [math.inf, math.inf]
        hi = [-math.inf, -math.inf]

        def visit(parent, transform):
            for child in parent:
                tag = _local(child.tag)
                child_t = transform.compose(parse_transform(child.get("transform")))
                if tag in LEAF_KINDS:
                    box = self.local_box(child, tag, {})
                    if box is None:
                        continue
                    x, y, w, h = child_t.map_box(*box)
                    lo[0], lo[1] = min(lo[0], x), min(lo[1], y)
                    hi[0], hi[1] = max(hi[0], x + w), max(hi[1], y + h)
                elif tag == "g":
                    visit(child, child_t)

        visit(node, acc)
        if lo[0] is math.inf or math.isinf(lo[0]):
            return None
        return (lo[0], lo[1], hi[0] - lo[0], hi[1] - lo[1])

    def local_box(self, node: ET.Element, tag: str, meta: dict) -> Optional[tuple]:
        """Pre-transform bounding box in the node's own coordinates."""
        if tag == "rect" or tag == "image":
            w = _length(node.get("width"))
            h = _length(node.get("height"))
            if w is None or h is None or w <= 0 or h <= 0:
                return None
            x = _length(node.get("x")) or 0.0
            y = _length(node.get("y")) or 0.0
            return (x, y, w, h)
        if tag == "circle":
            r = _length(node.get("r"))
            if r is None or r <= 0:
                return None
            cx = _length(node.get("cx")) or 0.0
            cy = _length(node.get("cy")) or 0.0
            meta["circle"] = True
            return (cx - r, cy - r, 2 * r, 2 * r)
        if tag == "ellipse":
            rx = _length(node.get("rx"))
            ry = _length(node.get("ry"))
            rx = rx if rx is not None else ry
            ry = ry if ry is not None else rx
            if rx is None or ry is None or rx <= 0 or ry <= 0:
                return None
            cx = _length(node.get("cx")) or 0.0
            cy = _length(node.get("cy")) or 0.0
            return (cx - rx, cy - ry, 2 * rx, 2 * ry)
        if tag == "path":
            pts = _path_points(node.get("d") or "")
            if not pts:
                return None
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            return (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
        if tag == "text":
            return self.text_box(node, meta)
        return None

    def text_box(self, node: ET.Element, meta: dict) -> Optional[tuple]:
        content = "".join(node.itertext())
        xs = _NUM_RE.findall(node.get("x") or "0")
        ys = _NUM_RE.findall(node.get("y") or "0")
        ax = float(xs[0]) if xs else 0.0
        ay = float(ys[0]) if ys else 0.0
        fs = _length(_presentation(node, "font-size")) or 16.0
        anchor = _presentation(node, "text-anchor") or "start"
        w = max(TEXT_CHAR_WIDTH * fs * max(len(content), 1), MIN_SIZE)
        h = max((TEXT_ASCENT + TEXT_DESCENT) * fs, MIN_SIZE)
        shift = {"start": 0.0, "middle": 0.5, "end": 1.0}.get(anchor, 0.0)
        left = ax - shift * w
        top = ay - TEXT_ASCENT * fs
        meta["anchor_x"] = ax
        meta["anchor_y"] = ay
        meta["has_children"] = len(node) > 0
        meta["content"] = content
        return (left, top, w, h)

    def finish_element(self, node, tag, kind, binding, ancestor, to_canvas, canvas_box, meta):
        eid = self.element_id(node, tag)
        x, y, w, h = canvas_box
        geometry = ElementGeometry(x=x, y=y, z=len(self.elements), w=w, h=h)
        text = meta.get("content") if kind == "text" else None
        self.elements.append(
            Element(
                id=eid,
                geometry=geometry,
                kind=kind,
                style_digest=style_digest(node),
                text_content=text,
            )
        )
        frag_node = copy.deepcopy(node)
        frag_node.tail = None
        self.table.fragments[eid] = SourceFragment(
            element_id=eid,
            node=frag_node,
            geometry_binding=binding,
            ancestor=ancestor,
            to_canvas=to_canvas,
            original_geometry=geometry,
            meta=meta,
        )
        self.table.slots.append(("element", eid))


def _path_points(d: str) -> list:
    """All absolute on-curve and control points of a path (convex-hull box)."""
    tokens = re.findall(r"[MmLlHhVvCcSsQqTtAaZz]|" + _NUM_RE.pattern, d)
    pts: list = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    i = 0
    cmd = None
    arity = {"M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "T": 2, "A": 7}

    def take(n):
        nonlocal i
        vals = [float(tokens[i + k]) for k in range(n)]
        i += n
        return vals

    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            cmd = tok
            i += 1
            if cmd in ("Z", "z"):
                cur = start
                continue
        elif cmd is None:
            break
        else:
            # implicit repeat; M/m repeats become L/l
            if cmd == "M":
                cmd = "L"
            elif cmd == "m":
                cmd = "l"
        upper = cmd.upper()
        rel = cmd.islower()
        if i + arity.get(upper, 0) > len(tokens):
            break
        vals = take(arity[upper])
        ox, oy = cur if rel else (0.0, 0.0)
        if upper == "H":
            cur = (vals[0] + (ox if rel else 0.0), cur[1])
            pts.append(cur)
        elif upper == "V":
            cur = (cur[0], vals[0] + (oy if rel else 0.0))
            pts.append(cur)
        elif upper == "A":
            cur = (vals[5] + ox, vals[6] + oy)
            pts.append(cur)
        else:
            for k in range(0, len(vals), 2):
                p = (vals[k] + ox, vals[k + 1] + oy)
                pts.append(p)
            cur = pts[-1]
        if upper == "M":
            start = cur
    return pts


def parse_design(svg: "bytes | str"):
    """Parse SVG into (Design, FragmentTable)."""
    if isinstance(svg, bytes):
        svg = svg.decode("utf-8")
    try:
        root = ET.fromstring(svg)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if _local(root.tag) != "svg":
        raise MalformedXml(f"root element is <{_local(root.tag)}>, expected <svg>")
    width = _length(root.get("width"))
    height = _length(root.get("height"))
    if width is None or height is None:
        vb = _NUM_RE.findall(root.get("viewBox") or "")
        if len(vb) == 4:
            width = width if width is not None else float(vb[2])
            height = height if height is not None else float(vb[3])
    if width is None or height is None or width <= 0 or height <= 0:
        raise MissingCanvasSize("svg root needs width/height attributes or a viewBox")
    parser = _Parser(root)
    parser.walk(root, IDENTITY)
    design = Design(canvas_width=width, canvas_height=height, elements=tuple(parser.elements))
    return design, parser.table


# --- serialization -----------------------------------------------------------


def _fmt(v: float) -> str:
    r = round(v, 6)
    if r == int(r):
        return str(int(r))
    return f"{r:.6f}".rstrip("0").rstrip(".")


def _escape_attr(v: str) -> str:
    return v.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")


def _escape_text(v: str) -> str:
    return v.replace("&", "&amp;").replace("<", "&lt;")


def _qualify(name: str) -> str:
    if name.startswith("{"):
        uri, local = name[1:].split("}", 1)
        if uri == SVG_NS:
            return local
        if uri == XLINK_NS:
            return f"xlink:{local}"
        return local
    return name


def _write_node(node: ET.Element, parts: Optional[list] = None) -> str:
    top = parts is None
    if parts is None:
        parts = []
    tag = _qualify(node.tag)
    attrs = "".join(f' {_qualify(k)}="{_escape_attr(str(v))}"' for k, v in node.attrib.items())
    children = list(node)
    text = node.text or ""
    if not children and not text:
        parts.append(f"<{tag}{attrs}/>")
    else:
        parts.append(f"<{tag}{attrs}>")
        if text:
            parts.append(_escape_text(text))
        for child in children:
            _write_node(child, parts)
            if child.tail:
                parts.append(_escape_text(child.tail))
        parts.append(f"</{tag}>")
    return "".join(parts) if top else ""


def _wrapper_transform(a: Affine) -> str:
    bits = []
    if a.tx != 0 or a.ty != 0:
        bits.append(f"translate({_fmt(a.tx)} {_fmt(a.ty)})")
    if a.sx != 1 or a.sy != 1:
        bits.append(f"scale({_fmt(a.sx)} {_fmt(a.sy)})")
    return " ".join(bits)


def _wrapped(markup: str, a: Affine) -> str:
    if a.is_identity:
        return markup
    return f'<g transform="{_wrapper_transform(a)}">{markup}</g>'


def _set_length(node: ET.Element, attr: str, value: float, default: float = 0.0):
    current = _length(node.get(attr))
    current = current if current is not None else default
    if abs(current - value) > _EPS:
        node.set(attr, _fmt(value))


def _delta_affine(old: ElementGeometry, new: ElementGeometry) -> Affine:
    sx = new.w / old.w
    sy = new.h / old.h
    return Affine(sx, sy, new.x - old.x * sx, new.y - old.y * sy)


def _emit_element(e: Element, frag: SourceFragment) -> str:
    g = e.geometry
    old = frag.original_geometry
    unchanged = (
        abs(g.x - old.x) <= _EPS
        and abs(g.y - old.y) <= _EPS
        and abs(g.w - old.w) <= _EPS
        and abs(g.h - old.h) <= _EPS
    )
    if unchanged:
        return _wrapped(frag.original_markup, frag.ancestor)

    binding = frag.geometry_binding
    if binding == BINDING_RECT:
        node = copy.deepcopy(frag.node)
        lx, ly, lw, lh = frag.to_canvas.inverse().map_box(g.x, g.y, g.w, g.h)
        _set_length(node, "x", lx)
        _set_length(node, "y", ly)
        _set_length(node, "width", lw)
        _set_length(node, "height", lh)
        return _wrapped(_write_node(node), frag.ancestor)

    if binding == BINDING_CENTER:
        node = copy.deepcopy(frag.node)
        lx, ly, lw, lh = frag.to_canvas.inverse().map_box(g.x, g.y, g.w, g.h)
        if frag.meta.get("circle"):
            if abs(lw - lh) > _EPS:
                return _wrapped(frag.original_markup, _delta_affine(old, g).compose(frag.ancestor))
            _set_length(node, "r", lw / 2)
            _set_length(node, "cx", lx + lw / 2)
            _set_length(node, "cy", ly + lh / 2)
        else:
            _set_length(node, "rx", lw / 2)
            _set_length(node, "ry", lh / 2)
            _set_length(node, "cx", lx + lw / 2)
            _set_length(node, "cy", ly + lh / 2)
        return _wrapped(_write_node(node), frag.ancestor)

    if binding == BINDING_TEXT:
        size_changed = abs(g.w - old.w) > _EPS or abs(g.h - old.h) > _EPS
        if size_changed or frag.meta.get("has_children"):
            return _wrapped(frag.original_markup, _delta_affine(old, g).compose(frag.ancestor))
        node = copy.deepcopy(frag.node)
        inv = frag.to_canvas.inverse()
        nx, ny, _, _ = inv.map_box(g.x, g.y, g.w, g.h)
        olx, oly, _, _ = inv.map_box(old.x, old.y, old.w, old.h)
        _set_length(node, "x", frag.meta["anchor_x"] + (nx - olx))
        _set_length(node, "y", frag.meta["anchor_y"] + (ny - oly))
        return _wrapped(_write_node(node), frag.ancestor)

    # translate-scale wrapper: paths, groups, and fallbacks
    return _wrapped(frag.original_markup, _delta_affine(old, g).compose(frag.ancestor))


def serialize_design(design: Design, table: FragmentTable) -> bytes:
    """Render the design back to SVG; document order follows z order."""
    for e in design.elements:
        if e.id not in table.fragments:
            raise MissingFragment(e.id)
    by_z = [e for e in sorted(design.elements, key=lambda e: e.geometry.z)]
    slot_ids = {sid for kind, *rest in table.slots if kind == "element" for sid in rest}
    queue = [e for e in by_z if e.id in slot_ids]
    extras = [e for e in by_z if e.id not in slot_ids]
    qi = 0
    body = []
    for slot in table.slots:
        if slot[0] == "passthrough":
            body.append(_wrapped(_write_node(slot[1]), slot[2]))
        else:
            if qi < len(queue):
                e = queue[qi]
                qi += 1
                body.append(_emit_element(e, table.fragments[e.id]))
    for e in extras:
        body.append(_emit_element(e, table.fragments[e.id]))

    attrs = dict(table.root_attrs)
    decl = {"xmlns": SVG_NS}
    joined = "".join(body)
    if "xlink:" in joined:
        decl["xmlns:xlink"] = XLINK_NS
    attr_str = "".join(f' {k}="{_escape_attr(str(v))}"' for k, v in {**decl, **attrs}.items())
    doc = f"<svg{attr_str}>\n" + "\n".join(body) + "\n</svg>\n"
    return doc.encode("utf-8")
