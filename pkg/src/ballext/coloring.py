"""Vertex colors in the additive group of F4, edge colors and triangle signs.

The four colors are ``0..3`` with XOR as addition.  A proper vertex coloring
induces an edge coloring ``c(uv) = c(u) ^ c(v)`` with values in ``{1, 2, 3}``,
and every triangle then sees all three edge colors.  Reading them along the
triangle's orientation gives a cyclic order, which is the triangle's sign.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .core import Complex3, PreconditionError, Surface2, Tri, side_walks

COLORS = (0, 1, 2, 3)
# the fixed cyclic order of edge colors that counts as positive
COLOR_ORDER = (1, 2, 3)


class Sign(Enum):
    PLUS = "+"
    MINUS = "-"

    def __neg__(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


def fourth_color(a: int, b: int, c: int) -> int:
    """The color missing from three distinct colors (their XOR)."""
    if len({a, b, c}) != 3:
        raise PreconditionError(f"colors {a},{b},{c} are not distinct")
    return a ^ b ^ c


@dataclass
class ColoringReport:
    proper: bool
    strict: bool
    n_colors: int
    bad_edges: list[int] = field(default_factory=list)
    missing: list[int] = field(default_factory=list)
    rainbow_tets: bool | None = None

    @property
    def ok(self) -> bool:
        return self.proper and self.strict and not self.missing and self.rainbow_tets is not False


def check_coloring(X: Surface2 | Complex3, colors: Mapping[int, int], require_strict: bool = True,
                   k: int = 4) -> ColoringReport:
    """Properness (endpoints of every edge differ) and strictness (exactly k colors)."""
    missing = sorted(v for v in X.vertices if v not in colors)
    bad = sorted(e for e, (u, v) in X.edges.items()
                 if u in colors and v in colors and colors[u] == colors[v])
    used = {colors[v] for v in X.vertices if v in colors}
    bad_values = [c for c in used if c not in COLORS]
    rep = ColoringReport(proper=not bad and not bad_values, strict=len(used) == k,
                         n_colors=len(used), bad_edges=bad, missing=missing)
    if not require_strict:
        rep.strict = True
    if isinstance(X, Complex3) and not missing:
        rep.rainbow_tets = all(len({colors[v] for v in t.corners}) == 4 for t in X.tets.values())
    return rep


def edge_colors(S: Surface2, colors: Mapping[int, int]) -> dict[int, int]:
    out = {}
    for e, (u, v) in S.edges.items():
        c = colors[u] ^ colors[v]
        if c == 0:
            raise PreconditionError(f"edge {e} joins two vertices of color {colors[u]}")
        out[e] = c
    return out


def triangle_sign(tri: Tri, colors: Mapping[int, int]) -> Sign:
    """Sign of one oriented triangle: PLUS iff its side colors, read along the
    orientation, are a rotation of (1, 2, 3)."""
    seq = tuple(colors[a] ^ colors[b] for a, b in side_walks(tri))
    if 0 in seq:
        raise PreconditionError(f"triangle {tri.corners} is not properly colored")
    rots = {COLOR_ORDER[i:] + COLOR_ORDER[:i] for i in range(3)}
    if seq in rots:
        return Sign.PLUS
    if seq[::-1] in rots:
        return Sign.MINUS
    raise PreconditionError(f"triangle {tri.corners} repeats an edge color")


def triangle_signs(S: Surface2, colors: Mapping[int, int]) -> dict[int, Sign]:
    return {t: triangle_sign(tri, colors) for t, tri in S.tris.items()}
