#!/usr/bin/env python3
"""Write the SVG round-trip corpus under tests/corpus/.

Every supported element carries a data-expect="x y w h" attribute holding
its canvas bounding box worked out by hand (plain transform arithmetic),
so the parser tests have frozen independent expectations. Unknown data-*
attributes ride through the parser untouched.
"""

from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "corpus"

FILES = {
    # plain shapes ---------------------------------------------------------
    "01_rects.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<rect id="r1" x="10" y="5" width="30" height="20" fill="red" data-expect="10 5 30 20"/>
<rect id="r2" x="50" y="5" width="30" height="20" fill="blue" data-expect="50 5 30 20"/>
</svg>""",
    "02_circle_ellipse.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<circle id="c1" cx="50" cy="50" r="10" fill="green" data-expect="40 40 20 20"/>
<ellipse id="e1" cx="120" cy="40" rx="30" ry="10" fill="teal" data-expect="90 30 60 20"/>
</svg>""",
    "16_image.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<image id="img" x="10" y="10" width="50" height="30" href="photo.png" data-expect="10 10 50 30"/>
</svg>""",
    # transform flattening --------------------------------------------------
    "03_translate.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g transform="translate(10 20)">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="15 25 10 10"/>
</g>
</svg>""",
    "04_scale.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g transform="scale(2)">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="10 10 20 20"/>
</g>
</svg>""",
    "05_translate_scale.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g transform="translate(10 20) scale(2)">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="20 30 20 20"/>
</g>
</svg>""",
    "06_nested_groups.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g transform="translate(10 0)">
<g transform="scale(2 1)">
<rect id="r1" x="5" y="10" width="10" height="10" data-expect="20 10 20 10"/>
</g>
</g>
</svg>""",
    "07_matrix.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g transform="matrix(2 0 0 3 10 20)">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="20 35 20 30"/>
</g>
</svg>""",
    "08_negative_scale.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100" viewBox="-50 0 250 100">
<g transform="scale(-2 1)">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="-30 5 20 10"/>
</g>
</svg>""",
    "09_element_transform.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<rect id="r1" transform="translate(5 5)" x="10" y="10" width="20" height="10" data-expect="15 15 20 10"/>
</svg>""",
    # text metrics: w = 0.6*fs*chars, h = 1.2*fs, top = y - fs ---------------
    "10_text_start.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<text id="t1" x="20" y="50" font-size="10" data-expect="20 40 30 12">Hello</text>
</svg>""",
    "11_text_anchors.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<text id="mid" x="100" y="30" font-size="20" text-anchor="middle" data-expect="88 10 24 24">Hi</text>
<text id="end" x="100" y="60" font-size="10" text-anchor="end" data-expect="82 50 18 12">abc</text>
</svg>""",
    # path control-point hulls ----------------------------------------------
    "12_path_lines.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<path id="p1" d="M 10 10 L 50 10 L 50 40 Z" fill="none" stroke="black" data-expect="10 10 40 30"/>
</svg>""",
    "13_path_curves.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<path id="p1" d="M 10 50 C 20 10 40 10 50 50" fill="none" stroke="red" data-expect="10 10 40 40"/>
</svg>""",
    "14_path_relative.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<path id="p1" d="m 10 10 l 20 0 l 0 20 z" data-expect="10 10 20 20"/>
</svg>""",
    "15_path_q_arc.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<path id="p1" d="M 10 30 Q 30 10 50 30 A 10 10 0 0 1 70 30" fill="none" data-expect="10 10 60 20"/>
</svg>""",
    # groups ------------------------------------------------------------------
    "17_marked_group.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g id="logo" transform="translate(10 10)" data-expect="10 10 50 20">
<rect x="0" y="0" width="20" height="20" fill="navy"/>
<circle cx="40" cy="10" r="10" fill="gold"/>
</g>
</svg>""",
    "24_anon_group_inherit.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<g fill="red" stroke="black">
<rect id="r1" x="5" y="5" width="10" height="10" data-expect="5 5 10 10"/>
<rect id="r2" x="25" y="5" width="10" height="10" fill="blue" data-expect="25 5 10 10"/>
</g>
</svg>""",
    # pass-through content -----------------------------------------------------
    "18_passthrough.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<defs>
<linearGradient id="grad"><stop offset="0" stop-color="red"/><stop offset="1" stop-color="blue"/></linearGradient>
</defs>
<rect id="r1" x="10" y="10" width="30" height="30" fill="url(#grad)" data-expect="10 10 30 30"/>
</svg>""",
    "19_unsupported_shapes.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<line x1="0" y1="0" x2="100" y2="100" stroke="gray"/>
<polygon points="120,10 140,10 130,30" fill="olive"/>
<rect id="r1" x="5" y="5" width="20" height="20" data-expect="5 5 20 20"/>
</svg>""",
    # stacking order -------------------------------------------------------------
    "20_zorder.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<rect id="bottom" x="10" y="10" width="40" height="40" fill="#aaa" data-expect="10 10 40 40"/>
<rect id="middle" x="30" y="30" width="40" height="40" fill="#888" data-expect="30 30 40 40"/>
<rect id="top" x="50" y="50" width="40" height="40" fill="#444" data-expect="50 50 40 40"/>
</svg>""",
    # kitchen sink ----------------------------------------------------------------
    "21_mixed.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="300" height="200">
<g transform="translate(20 10)">
<text id="title" x="0" y="20" font-size="20" data-expect="20 10 60 24">Hello</text>
<path id="underline" d="M 0 30 L 60 30" stroke="black" data-expect="20 40 60 1"/>
</g>
<g id="card" transform="translate(100 50) scale(2)" data-expect="100 50 80 40">
<rect x="0" y="0" width="40" height="20" fill="#eee"/>
</g>
<circle id="dot" cx="250" cy="150" r="8" data-expect="242 142 16 16"/>
</svg>""",
    "22_viewbox.svg": """<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 300 150">
<rect id="r1" x="10" y="10" width="50" height="30" data-expect="10 10 50 30"/>
</svg>""",
    "23_style_attr.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="100">
<rect id="r1" style="fill:red;stroke:blue" x="5" y="5" width="10" height="10" data-expect="5 5 10 10"/>
<text id="t1" style="font-size:20px" x="10" y="40" data-expect="10 20 24 24">Ab</text>
</svg>""",
    "25_scale_xy.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="400" height="100">
<g transform="scale(3 0.5)">
<circle id="c1" cx="20" cy="40" r="10" data-expect="30 15 60 10"/>
</g>
</svg>""",
    "26_deep_nesting.svg": """<svg xmlns="http://www.w3.org/2000/svg" width="200" height="200">
<g transform="translate(10 10)">
<g transform="translate(10 10)">
<g transform="scale(2)">
<rect id="r1" x="1" y="2" width="3" height="4" data-expect="22 24 6 8"/>
</g>
</g>
</g>
</svg>""",
}


def main():
    CORPUS.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(FILES.items()):
        (CORPUS / name).write_text(text + "\n", encoding="utf-8")
    print(f"wrote {len(FILES)} files to {CORPUS}")


if __name__ == "__main__":
    main()
