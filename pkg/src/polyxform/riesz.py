"""The local L^p_comp -> L^q_loc region of the full operator, in exact rationals.

Points are pairs ``(1/p, 1/q)``.  The region is the closed convex hull of
(0,0), (1,1), (0,1) and one point per degree level j = 1..d.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError

Point = tuple[Fraction, Fraction]

TRIVIAL_POINTS: tuple[Point, ...] = (
    (Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1)))


def level_point(n: int, nprime: int, j: int) -> Point:
    x = Fraction(n + 1, n + nprime * j + 1)
    return (x, x / math.comb(n + j, j))


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class RieszPolygon:
    vertices: tuple[Point, ...]
    n: int = 0
    nprime: int = 0
    d: int = 0

    @property
    def nontrivial_vertices(self) -> list[Point]:
        """Vertices other than (0,0), (1,1), (0,1), ordered by decreasing 1/p."""
        return sorted((v for v in self.vertices if v not in TRIVIAL_POINTS), reverse=True)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def to_csv(self, nontrivial_only: bool = False) -> str:
        buf = io.StringIO()
        buf.write("inv_p,inv_q\n")
        for x, y in (self.nontrivial_vertices if nontrivial_only else self.vertices):
            buf.write(f"{_frac_str(x)},{_frac_str(y)}\n")
        return buf.getvalue()

    def to_svg(self, size: int = 360) -> str:
        return polygon_svg(self, size)


def _frac_str(x: Fraction) -> str:
    return str(x) if x.denominator != 1 else f"{x.numerator}/1"


def riesz_polygon(n: int, nprime: int, d: int) -> RieszPolygon:
    if min(n, nprime, d) < 1:
        raise DomainError(f"need n, nprime, d >= 1, got {(n, nprime, d)}")
    pts = list(TRIVIAL_POINTS) + [level_point(n, nprime, j) for j in range(1, d + 1)]
    return RieszPolygon(tuple(convex_hull(pts)), n, nprime, d)


def polygon_contains(poly: RieszPolygon, point: Sequence) -> bool:
    """Closed-hull membership by exact half-plane tests against every edge."""
    x, y = Fraction(point[0]), Fraction(point[1])
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise DomainError(f"point {(x, y)} is outside the unit square")
    return all(_cross(a, b, (x, y)) >= 0 for a, b in poly.edges())


def polygon_svg(poly: RieszPolygon, size: int = 360) -> str:
    """Riesz diagram: shaded region, unit square, dots on nontrivial vertices."""
    pad = size // 8
    full = size + 2 * pad

    def sx(v):
        return pad + float(v) * size

    def sy(v):
        return pad + (1 - float(v)) * size

    pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in poly.vertices)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" '
        f'viewBox="0 0 {full} {full}">',
        f'<title>Riesz diagram T_{{{poly.n},{poly.nprime},{poly.d}}}</title>',
        f'<polygon points="{pts}" fill="lightgray" stroke="black" stroke-width="0.5"/>',
        f'<rect x="{pad}" y="{pad}" width="{size}" height="{size}" fill="none" '
        'stroke="black" stroke-width="0.5"/>',
    ]
    for x, y in poly.nontrivial_vertices:
        out.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="2.5" fill="black">'
                   f'<title>({x}, {y})</title></circle>')
    fs = max(10, size // 24)
    out += [
        f'<text x="{pad + size / 2:.1f}" y="{full - pad / 3:.1f}" font-size="{fs}" '
        'text-anchor="middle">1/p</text>',
        f'<text x="{pad / 3:.1f}" y="{pad + size / 2:.1f}" font-size="{fs}" '
        'text-anchor="middle">1/q</text>',
        f'<text x="{pad - 4}" y="{pad + size + fs}" font-size="{fs}" text-anchor="end">0</text>',
        f'<text x="{pad + size}" y="{pad + size + fs}" font-size="{fs}" text-anchor="middle">1</text>',
        f'<text x="{pad - 4}" y="{pad + fs / 3:.1f}" font-size="{fs}" text-anchor="end">1</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"
