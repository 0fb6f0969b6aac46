import sys
from pathlib import Path

from hypothesis import strategies as st

from vlt.geometry import Delta, Design, Element, ElementGeometry, Transformation

sys.path.insert(0, str(Path(__file__).parent))

ASSETS = Path(__file__).parent / "assets"
CORPUS = Path(__file__).parent / "corpus"


def rect(eid, x, y, w, h, z=0, kind="rect", locked=(), style="", text=None):
    return Element(
        id=eid,
        geometry=ElementGeometry(x=float(x), y=float(y), z=z, w=float(w), h=float(h)),
        kind=kind,
        style_digest=style,
        text_content=text,
        locked_properties=frozenset(locked),
    )


def design_of(*elements, canvas=(400.0, 400.0)):
    return Design(canvas_width=canvas[0], canvas_height=canvas[1], elements=tuple(elements))


# --- hypothesis strategies -----------------------------------------------------

coords = st.integers(min_value=-50, max_value=350).map(float)
sizes = st.integers(min_value=1, max_value=120).map(float)
small_deltas = st.integers(min_value=-40, max_value=40).map(float)


@st.composite
def elements_strategy(draw, index: int):
    return Element(
        id=f"e{index}",
        geometry=ElementGeometry(
            x=draw(coords), y=draw(coords), z=index, w=draw(sizes), h=draw(sizes)
        ),
        kind=draw(st.sampled_from(("rect", "ellipse", "text", "image"))),
        style_digest=draw(st.sampled_from(("", "fill=red", "fill=blue;stroke=black"))),
    )


@st.composite
def designs(draw, max_elements: int = 8):
    n = draw(st.integers(min_value=0, max_value=max_elements))
    elements = tuple(draw(elements_strategy(i)) for i in range(n))
    return Design(canvas_width=400.0, canvas_height=400.0, elements=elements)


@st.composite
def transformations_for(draw, design: Design):
    entries = {}
    for e in design.elements:
        if draw(st.booleans()):
            dw = draw(st.integers(min_value=int(1 - e.geometry.w), max_value=40).map(float))
            dh = draw(st.integers(min_value=int(1 - e.geometry.h), max_value=40).map(float))
            entries[e.id] = Delta(
                dx=draw(small_deltas),
                dy=draw(small_deltas),
                dz=draw(st.integers(min_value=0, max_value=3)),
                dw=dw,
                dh=dh,
            )
    return Transformation(entries)
