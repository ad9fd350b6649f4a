#!/usr/bin/env python3
"""Parametric TrueType font synthesizer.

Builds capital-letter fonts from stroke skeletons with per-family style
parameters, so corpora of any size can be generated deterministically from a
seed. All output is original and freely redistributable.
"""

import argparse
import math
import os
import random

from fontTools.fontBuilder import FontBuilder
from fontTools.misc.transform import Transform
from fontTools.pens.ttGlyphPen import TTGlyphPen
from fontTools.ttLib import TTCollection, TTFont

CAP = 700.0

SYLLABLES = [
    "ba", "be", "bi", "bo", "ca", "ce", "co", "da", "de", "do", "fa", "fe",
    "fo", "ga", "ge", "go", "ha", "he", "hi", "ja", "jo", "ka", "ke", "ki",
    "ko", "la", "le", "li", "lo", "lu", "ma", "me", "mi", "mo", "mu", "na",
    "ne", "ni", "no", "nu", "pa", "pe", "pi", "po", "ra", "re", "ri", "ro",
    "ru", "sa", "se", "si", "so", "su", "ta", "te", "ti", "to", "tu", "va",
    "ve", "vi", "vo", "za", "zo",
]
SUFFIXES = ["", "ine", "ora", "ium", "ea", "ix", "on", "ar", "us", "el", "an", "era"]

STYLE_TOKENS = [
    "bold", "italic", "oblique", "light", "regular", "medium", "thin",
    "black", "condensed", "extended", "book", "demi", "heavy",
]

LETTER_WIDTHS = {
    "A": 1.00, "B": 0.90, "C": 0.95, "D": 0.95, "E": 0.82, "F": 0.80,
    "G": 0.98, "H": 0.95, "I": 0.34, "J": 0.62, "K": 0.92, "L": 0.78,
    "M": 1.18, "N": 0.98, "O": 1.00, "P": 0.88, "Q": 1.00, "R": 0.92,
    "S": 0.85, "T": 0.90, "U": 0.95, "V": 0.98, "W": 1.32, "X": 0.95,
    "Y": 0.95, "Z": 0.88,
}


def norm_key(name):
    key = "".join(c.lower() for c in name if c.isalnum())
    changed = True
    while changed:
        changed = False
        for tok in STYLE_TOKENS:
            if len(key) > len(tok) and key.endswith(tok):
                key = key[: -len(tok)]
                changed = True
                break
    return key


def family_names(count, rng):
    names = []
    seen = set()
    while len(names) < count:
        n = rng.randrange(2, 4)
        name = "".join(rng.choice(SYLLABLES) for _ in range(n)) + rng.choice(SUFFIXES)
        name = name[0].upper() + name[1:]
        key = norm_key(name)
        if not key or key in seen or len(name) < 4:
            continue
        seen.add(key)
        names.append(name)
    return names


def arc(cx, cy, rx, ry, a0, a1, segments):
    pts = []
    for i in range(segments + 1):
        a = math.radians(a0 + (a1 - a0) * i / segments)
        pts.append((cx + rx * math.cos(a), cy + ry * math.sin(a)))
    return pts


def line(p, q):
    return [p, q]


def skeleton(letter, st):
    """Stroke polylines in a unit box (x in [0,1], y: 0 baseline, 1 cap)."""
    n = st["segments"]
    ap = st["aperture"]
    s = []
    if letter == "A":
        s.append(line((0.0, 0.0), (0.5, 1.0)))
        s.append(line((0.5, 1.0), (1.0, 0.0)))
        yb = st["bar_y"] * 0.5 + 0.18
        s.append(line((yb * 0.5, yb), (1 - yb * 0.5, yb)))
    elif letter == "B":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append([(0.08, 1.0), (0.45, 1.0)] + arc(0.45, 0.765, 0.38, 0.235, 90, -90, n) + [(0.08, 0.53)])
        s.append([(0.08, 0.53), (0.5, 0.53)] + arc(0.5, 0.265, 0.42, 0.265, 90, -90, n) + [(0.08, 0.0)])
    elif letter == "C":
        s.append(arc(0.52, 0.5, 0.47, 0.5, 45 - ap, 315 + ap, n + 4))
    elif letter == "D":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append([(0.08, 1.0), (0.42, 1.0)] + arc(0.42, 0.5, 0.52, 0.5, 90, -90, n + 2) + [(0.08, 0.0)])
    elif letter == "E":
        s.append(line((0.1, 0.0), (0.1, 1.0)))
        s.append(line((0.1, 1.0), (0.95, 1.0)))
        s.append(line((0.1, st["bar_y"]), (0.78, st["bar_y"])))
        s.append(line((0.1, 0.0), (0.95, 0.0)))
    elif letter == "F":
        s.append(line((0.1, 0.0), (0.1, 1.0)))
        s.append(line((0.1, 1.0), (0.95, 1.0)))
        s.append(line((0.1, st["bar_y"]), (0.74, st["bar_y"])))
    elif letter == "G":
        s.append(arc(0.52, 0.5, 0.47, 0.5, 38 - ap, 318 + ap, n + 4))
        gx = 0.52 + 0.47 * math.cos(math.radians(318 + ap))
        gy = 0.5 + 0.5 * math.sin(math.radians(318 + ap))
        s.append([(0.55, 0.42), (0.92, 0.42), (0.92, gy + 0.02), (gx, gy)])
    elif letter == "H":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append(line((0.92, 0.0), (0.92, 1.0)))
        s.append(line((0.08, st["bar_y"]), (0.92, st["bar_y"])))
    elif letter == "I":
        s.append(line((0.5, 0.0), (0.5, 1.0)))
    elif letter == "J":
        s.append(line((0.8, 1.0), (0.8, 0.28)))
        s.append(arc(0.5, 0.28, 0.3, 0.28, 0, -180, n))
    elif letter == "K":
        s.append(line((0.1, 0.0), (0.1, 1.0)))
        s.append(line((0.1, st["bar_y"]), (0.9, 1.0)))
        s.append(line((0.34, st["bar_y"] + 0.12), (0.95, 0.0)))
    elif letter == "L":
        s.append(line((0.12, 0.0), (0.12, 1.0)))
        s.append(line((0.12, 0.0), (0.95, 0.0)))
    elif letter == "M":
        s.append(line((0.05, 0.0), (0.05, 1.0)))
        s.append(line((0.05, 1.0), (0.5, st["vertex_y"])))
        s.append(line((0.5, st["vertex_y"]), (0.95, 1.0)))
        s.append(line((0.95, 1.0), (0.95, 0.0)))
    elif letter == "N":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append(line((0.08, 1.0), (0.92, 0.0)))
        s.append(line((0.92, 0.0), (0.92, 1.0)))
    elif letter == "O":
        s.append(arc(0.5, 0.5, 0.46, 0.5, 90, 450, n + 6))
    elif letter == "P":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append([(0.08, 1.0), (0.45, 1.0)] + arc(0.45, 0.74, 0.42, 0.26, 90, -90, n) + [(0.08, 0.48)])
    elif letter == "Q":
        s.append(arc(0.5, 0.5, 0.46, 0.5, 90, 450, n + 6))
        s.append(line((0.62, 0.28), (0.62 + st["q_tail"], 0.28 - st["q_tail"] * 1.35)))
    elif letter == "R":
        s.append(line((0.08, 0.0), (0.08, 1.0)))
        s.append([(0.08, 1.0), (0.45, 1.0)] + arc(0.45, 0.755, 0.4, 0.245, 90, -90, n) + [(0.08, 0.51)])
        s.append(line((0.36, 0.51), (0.95, 0.0)))
    elif letter == "S":
        top = arc(0.5, 0.74, 0.36, 0.26, 35 - ap, 270, n)
        bottom = arc(0.5, 0.26, 0.38, 0.26, 90, -145 - ap, n)
        s.append(top + bottom)
    elif letter == "T":
        s.append(line((0.03, 1.0), (0.97, 1.0)))
        s.append(line((0.5, 0.0), (0.5, 1.0)))
    elif letter == "U":
        s.append(line((0.08, 1.0), (0.08, 0.38)))
        s.append(arc(0.5, 0.38, 0.42, 0.38, 180, 360, n + 2))
        s.append(line((0.92, 0.38), (0.92, 1.0)))
    elif letter == "V":
        s.append(line((0.02, 1.0), (0.5, 0.0)))
        s.append(line((0.5, 0.0), (0.98, 1.0)))
    elif letter == "W":
        s.append(line((0.02, 1.0), (0.26, 0.0)))
        s.append(line((0.26, 0.0), (0.5, st["vertex_y"] + 0.25)))
        s.append(line((0.5, st["vertex_y"] + 0.25), (0.74, 0.0)))
        s.append(line((0.74, 0.0), (0.98, 1.0)))
    elif letter == "X":
        s.append(line((0.04, 0.0), (0.96, 1.0)))
        s.append(line((0.04, 1.0), (0.96, 0.0)))
    elif letter == "Y":
        s.append(line((0.04, 1.0), (0.5, st["bar_y"])))
        s.append(line((0.96, 1.0), (0.5, st["bar_y"])))
        s.append(line((0.5, st["bar_y"]), (0.5, 0.0)))
    elif letter == "Z":
        s.append(line((0.06, 1.0), (0.94, 1.0)))
        s.append(line((0.94, 1.0), (0.06, 0.0)))
        s.append(line((0.06, 0.0), (0.94, 0.0)))
    return s


def seg_thickness(p, q, t, contrast):
    dx, dy = q[0] - p[0], q[1] - p[1]
    ln = math.hypot(dx, dy)
    if ln == 0:
        return t
    vertical = abs(dx) / ln  # 1 for horizontal movement -> thin with contrast
    return t * (1.0 - (1.0 - contrast) * vertical)


def stroke_contours(points, t, contrast, cap_segments):
    """Quads along each segment plus polygonal caps at the vertices, all with
    the same winding so overlaps accumulate instead of cancelling."""
    contours = []
    for i in range(len(points) - 1):
        p, q = points[i], points[i + 1]
        dx, dy = q[0] - p[0], q[1] - p[1]
        ln = math.hypot(dx, dy)
        if ln < 1e-9:
            continue
        th = seg_thickness(p, q, t, contrast) / 2.0
        nx, ny = -dy / ln * th, dx / ln * th
        quad = [
            (p[0] + nx, p[1] + ny),
            (q[0] + nx, q[1] + ny),
            (q[0] - nx, q[1] - ny),
            (p[0] - nx, p[1] - ny),
        ]
        if signed_area(quad) < 0:
            quad.reverse()
        contours.append(quad)
    for i, p in enumerate(points):
        if i > 0 and i < len(points) - 1:
            a, b = points[i - 1], points[i + 1]
            if abs((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) < 1e-6:
                continue  # collinear joint needs no cap
        th = t / 2.0
        capc = []
        for k in range(cap_segments):
            a = 2 * math.pi * k / cap_segments
            capc.append((p[0] + th * math.cos(a), p[1] + th * math.sin(a)))
        contours.append(capc)
    return contours


def signed_area(poly):
    area = 0.0
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        area += x0 * y1 - x1 * y0
    return area / 2.0


def serif_slabs(strokes, t, serif_len):
    slabs = []
    for pts in strokes:
        for end, inner in ((pts[0], pts[1]), (pts[-1], pts[-2])):
            dx, dy = inner[0] - end[0], inner[1] - end[1]
            ln = math.hypot(dx, dy)
            if ln < 1e-9 or abs(dy) < 0.7 * ln:
                continue  # only near-vertical terminals carry slabs
            w = serif_len
            h = t * 0.5
            slabs.append([
                (end[0] - w, end[1] - h / 2),
                (end[0] + w, end[1] - h / 2),
                (end[0] + w, end[1] + h / 2),
                (end[0] - w, end[1] + h / 2),
            ])
    return slabs


def letter_contours(letter, st):
    strokes = skeleton(letter, st)
    jitter = st["letter_jitter"][letter]
    moved = []
    for pts in strokes:
        moved.append([(x + jitter[0], y + jitter[1]) for x, y in pts])
    contours = []
    for pts in moved:
        contours.extend(stroke_contours(pts, st["thickness"], st["contrast"], st["cap_segments"]))
    if st["serif"]:
        for quad in serif_slabs(moved, st["thickness"], st["serif_len"]):
            q = quad
            if signed_area(q) < 0:
                q = q[::-1]
            contours.append(q)
    return contours


def to_font_units(contours, letter, st):
    w_units = LETTER_WIDTHS[letter] * st["width"] * CAP
    out = []
    for poly in contours:
        scaled = []
        for x, y in poly:
            X = 60 + x * w_units
            Y = y * st["cap_height"]
            X += st["slant"] * Y
            scaled.append((round(X), round(Y)))
        out.append(scaled)
    advance = int(120 + w_units + st["slant"] * st["cap_height"] * 0.5)
    return out, advance


def draw_glyph(contours):
    pen = TTGlyphPen(None)
    for poly in contours:
        pen.moveTo(poly[0])
        for pt in poly[1:]:
            pen.lineTo(pt)
        pen.closePath()
    return pen.glyph()


def base_style(rng):
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return {
        "thickness": rng.uniform(0.055, 0.16),
        "contrast": rng.uniform(0.55, 1.0),
        "width": rng.uniform(0.62, 0.98),
        "slant": 0.0,
        "cap_height": rng.uniform(640, 740),
        "segments": rng.randrange(5, 13),
        "cap_segments": rng.choice([4, 6, 8]),
        "aperture": rng.uniform(-8, 10),
        "bar_y": rng.uniform(0.42, 0.56),
        "vertex_y": rng.uniform(0.15, 0.42),
        "q_tail": rng.uniform(0.28, 0.44),
        "serif": rng.random() < 0.35,
        "serif_len": rng.uniform(0.035, 0.07),
        "letter_jitter": {c: (rng.uniform(-0.015, 0.015), rng.uniform(-0.01, 0.01)) for c in letters},
        "upem": rng.choice([1000, 1000, 1000, 2048]),
        "composite_q": rng.random() < 0.15,
    }


FACE_VARIANTS = [
    ("Bold", {"thickness": 1.55}),
    ("Light", {"thickness": 0.62}),
    ("Italic", {"slant": 0.21}),
    ("Condensed", {"width": 0.74}),
    ("Black", {"thickness": 1.95}),
]


def face_style(base, variant):
    st = dict(base)
    st["letter_jitter"] = base["letter_jitter"]
    if variant:
        for key, factor in variant[1].items():
            if key == "slant":
                st["slant"] = factor
            else:
                st[key] = st[key] * factor
    st["thickness"] = min(st["thickness"], 0.30)
    return st


def build_face(family, style_name, st):
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    upem = st["upem"]
    k = upem / 1000.0

    glyph_objects = {".notdef": TTGlyphPen(None).glyph()}
    advances = {".notdef": int(500 * k)}
    order = [".notdef"] + list(letters)

    scaled = {}
    for c in letters:
        contours, advance = to_font_units(letter_contours(c, st), c, st)
        scaled[c] = ([[(round(x * k), round(y * k)) for x, y in poly] for poly in contours],
                     int(advance * k))

    for c in letters:
        polys, advance = scaled[c]
        glyph_objects[c] = draw_glyph(polys)
        advances[c] = advance

    if st["composite_q"]:
        # Q assembled from the O outline plus a separate tail glyph.
        q_contours, _ = to_font_units(letter_contours("Q", st), "Q", st)
        o_contours, _ = to_font_units(letter_contours("O", st), "O", st)
        tail_polys = q_contours[len(o_contours):]
        if tail_polys:
            order.append("q.tail")
            glyph_objects["q.tail"] = draw_glyph(
                [[(round(x * k), round(y * k)) for x, y in poly] for poly in tail_polys])
            advances["q.tail"] = 0
            pen = TTGlyphPen(glyph_objects)
            pen.addComponent("O", Transform(1, 0, 0, 1, 0, 0))
            pen.addComponent("q.tail", Transform(1, 0, 0, 1, 0, 0))
            glyph_objects["Q"] = pen.glyph()

    fb = FontBuilder(upem, isTTF=True)
    fb.setupGlyphOrder(order)
    fb.setupCharacterMap({ord(c): c for c in letters})
    fb.setupGlyf(glyph_objects)
    glyf = fb.font["glyf"]
    metrics = {}
    for name in order:
        g = glyf[name]
        xmin = g.xMin if hasattr(g, "xMin") and g.numberOfContours != 0 else 0
        metrics[name] = (advances[name], xmin)
    fb.setupHorizontalMetrics(metrics)
    fb.setupHorizontalHeader(ascent=int(800 * k), descent=-int(250 * k))
    full = family if style_name == "Regular" else family + " " + style_name
    fb.setupNameTable({
        "familyName": family,
        "styleName": style_name,
        "fullName": full,
        "psName": family.replace(" ", "") + "-" + style_name,
        "copyright": "synthetic parametric font, freely redistributable",
    })
    fb.setupOS2(sTypoAscender=int(800 * k), sTypoDescender=-int(250 * k),
                usWinAscent=int(1000 * k), usWinDescent=int(300 * k))
    fb.setupPost()
    return fb.font


def face_list(rng):
    faces = [("Regular", None)]
    for variant in FACE_VARIANTS:
        if rng.random() < 0.13:
            faces.append((variant[0], variant))
    return faces


def write_corpus(outdir, families, seed):
    os.makedirs(outdir, exist_ok=True)
    name_rng = random.Random(f"{seed}-names")
    names = family_names(families, name_rng)
    count = 0
    for idx, family in enumerate(names):
        rng = random.Random(f"{seed}-family-{idx}")
        st = base_style(rng)
        for style_name, variant in face_list(rng):
            font = build_face(family, style_name, face_style(st, variant))
            fname = family.replace(" ", "") + "-" + style_name + ".ttf"
            font.save(os.path.join(outdir, fname))
            count += 1
    return count


FIXTURE_FAMILIES = 6


def write_fixture(outdir, seed):
    os.makedirs(outdir, exist_ok=True)
    rng = random.Random(f"{seed}-fixture-names")
    names = family_names(FIXTURE_FAMILIES, rng)
    written = []
    for idx, family in enumerate(names):
        frng = random.Random(f"{seed}-fixture-{idx}")
        st = base_style(frng)
        st["composite_q"] = idx == 1
        faces = [("Regular", None)]
        if idx == 0:
            faces.append(("Bold", FACE_VARIANTS[0]))
        if idx == 1:
            faces.append(("Italic", FACE_VARIANTS[2]))
        for style_name, variant in faces:
            font = build_face(family, style_name, face_style(st, variant))
            fname = family.replace(" ", "") + "-" + style_name + ".ttf"
            font.save(os.path.join(outdir, fname))
            written.append(fname)
    return written


def write_extras(outdir, seed):
    """A two-face collection, a dual-cmap font, and a truncated file for
    parser tests."""
    os.makedirs(outdir, exist_ok=True)
    rng = random.Random(f"{seed}-extra-names")
    names = family_names(2, rng)

    frng = random.Random(f"{seed}-extra-0")
    st = base_style(frng)
    coll = TTCollection()
    coll.fonts = [
        build_face(names[0], "Regular", face_style(st, None)),
        build_face(names[0], "Bold", face_style(st, FACE_VARIANTS[0])),
    ]
    coll.save(os.path.join(outdir, names[0].replace(" ", "") + ".ttc"))

    frng = random.Random(f"{seed}-extra-1")
    st = base_style(frng)
    font = build_face(names[1], "Regular", face_style(st, None))
    from fontTools.ttLib.tables._c_m_a_p import CmapSubtable
    cmap = font["cmap"]
    sub12 = CmapSubtable.newSubtableClass(12)()
    sub12.platID, sub12.platEncID, sub12.format = 3, 10, 12
    sub12.language = 0
    sub12.cmap = dict(cmap.getBestCmap())
    cmap.tables.append(sub12)
    path = os.path.join(outdir, names[1].replace(" ", "") + "-Regular.ttf")
    font.save(path)

    with open(path, "rb") as fh:
        head = fh.read(96)
    with open(os.path.join(outdir, "truncated.bin"), "wb") as fh:
        fh.write(head)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--families", type=int, default=560)
    ap.add_argument("--seed", default="glyphforge-corpus-1")
    ap.add_argument("--fixture", action="store_true", help="write the 8-font test fixture")
    ap.add_argument("--extras", action="store_true", help="write collection/cmap/corrupt fixtures")
    args = ap.parse_args()

    if args.fixture:
        written = write_fixture(args.out, args.seed)
        print(f"wrote {len(written)} fixture fonts to {args.out}")
    elif args.extras:
        write_extras(args.out, args.seed)
        print(f"wrote extra fixtures to {args.out}")
    else:
        count = write_corpus(args.out, args.families, args.seed)
        print(f"wrote {count} fonts ({args.families} families) to {args.out}")


if __name__ == "__main__":
    main()
