"""Signed diagonal flips (move I) and triangle subdivisions (move II).

Both moves act on a colored sphere.  A flip replaces the common edge of two
triangles by the other diagonal of the quadrilateral they form; it needs the
two opposite corners to carry different colors.  A subdivision puts a new
vertex inside a triangle and gives it the only color missing from the
triangle's corners.

Fresh ids come from per-dimension counters (largest id in use plus one), so
replaying a move list reproduces the same ids.  The canonical base
tetrahedron on vertices ``b0..b3`` has edges ``0..5`` on the pairs
``b0b1, b0b2, b0b3, b1b2, b1b3, b2b3`` and triangles ``0..3``, triangle ``i``
omitting ``b_i`` with the orientation that tetrahedron ``(b0, b1, b2, b3)``
induces on it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Union

from .coloring import fourth_color, triangle_sign
from .core import (PreconditionError, StructuralError, Surface2, Tri, debug_enabled, induced_face,
                   side_walks, validate_surface)


class Flip(NamedTuple):
    edge: int
    new_edge: int


class Subdivide(NamedTuple):
    tri: int
    new_vertex: int
    color: int
    new_tris: tuple[int, int, int]
    new_edges: tuple[int, int, int]


Move = Union[Flip, Subdivide]


@dataclass
class MoveSequence:
    base: tuple[tuple[int, int], ...]
    moves: list[Move] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.moves)


class MoveError(PreconditionError):
    def __init__(self, msg: str, step: int | None = None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


BASE_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class _IndexedSet:
    """Set with O(1) add/remove and uniform random choice."""

    def __init__(self, items=()):
        self.items: list[int] = []
        self.pos: dict[int, int] = {}
        for x in items:
            self.add(x)

    def add(self, x: int) -> None:
        self.pos[x] = len(self.items)
        self.items.append(x)

    def remove(self, x: int) -> None:
        i = self.pos.pop(x)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def choice(self, rng: random.Random) -> int:
        return self.items[rng.randrange(len(self.items))]

    def __len__(self) -> int:
        return len(self.items)


class WorkingSphere:
    """Mutable colored sphere used by replay, the generator and the sequencer."""

    def __init__(self, S: Surface2, colors: Mapping[int, int]):
        self.vertices = set(S.vertices)
        self.edges = dict(S.edges)
        self.tris = dict(S.tris)
        self.colors = {v: colors[v] for v in S.vertices}
        self.edge_tris: dict[int, list[int]] = {e: list(ts) for e, ts in S.edge_tris.items()}
        nv, ne, nt = S.next_ids()
        self.next = [nv, ne, nt]
        self.edge_pool: _IndexedSet | None = None
        self.tri_pool: _IndexedSet | None = None

    @classmethod
    def base(cls, base: tuple[tuple[int, int], ...]) -> "WorkingSphere":
        return cls(*base_tetrahedron(base))

    def track(self) -> None:
        """Keep pools of edges/triangles for random choice (generator use)."""
        self.edge_pool = _IndexedSet(sorted(self.edges))
        self.tri_pool = _IndexedSet(sorted(self.tris))

    def surface(self) -> Surface2:
        return Surface2(self.vertices, dict(sorted(self.edges.items())),
                        dict(sorted(self.tris.items())), closed=True)

    def flip_data(self, e: int):
        """``(t, (a, b, c), t_hat, d)`` for a flip of ``e``, or raise MoveError."""
        ts = self.edge_tris.get(e, [])
        if len(ts) != 2 or ts[0] == ts[1]:
            raise MoveError(f"edge {e} does not separate two distinct triangles")
        t, th = sorted(ts)
        T, TH = self.tris[t], self.tris[th]
        walks = side_walks(T)
        s = T.sides.index(e)
        a, b = walks[s]
        c = next(x for x in T.corners if x not in (a, b))
        d = next(x for x in TH.corners if x not in (a, b))
        return t, (a, b, c), th, d

    def can_flip(self, e: int) -> bool:
        ts = self.edge_tris.get(e, [])
        if len(ts) != 2:
            return False
        _, (a, b, c), _, d = self.flip_data(e)
        return self.colors[c] != self.colors[d]

    def flip(self, e: int) -> Flip:
        t, (a, b, c), th, d = self.flip_data(e)
        if self.colors[c] == self.colors[d]:
            raise MoveError(f"flip of edge {e}: opposite corners {c},{d} share color {self.colors[c]}")
        T, TH = self.tris[t], self.tris[th]
        walk_t = dict(zip(side_walks(T), T.sides))
        walk_h = dict(zip(side_walks(TH), TH.sides))
        e_bc, e_ca = walk_t[(b, c)], walk_t[(c, a)]
        e_ad, e_db = walk_h[(a, d)], walk_h[(d, b)]
        f = self._new(1)
        self.edges[f] = (c, d)
        del self.edges[e]
        del self.edge_tris[e]
        self.tris[t] = Tri((c, a, d), (e_ca, e_ad, f))
        self.tris[th] = Tri((d, b, c), (e_db, e_bc, f))
        self._swap(e_bc, t, th)
        self._swap(e_ad, th, t)
        self.edge_tris[f] = [t, th]
        if self.edge_pool is not None:
            self.edge_pool.remove(e)
            self.edge_pool.add(f)
        return Flip(e, f)

    def subdivide(self, t: int) -> Subdivide:
        if t not in self.tris:
            raise MoveError(f"unknown triangle {t}")
        T = self.tris[t]
        a, b, c = T.corners
        walk = dict(zip(side_walks(T), T.sides))
        col = fourth_color(*(self.colors[v] for v in T.corners))
        x = self._new(0)
        xa, xb, xc = self._new(1), self._new(1), self._new(1)
        n0, n1, n2 = self._new(2), self._new(2), self._new(2)
        self.vertices.add(x)
        self.colors[x] = col
        self.edges.update({xa: (a, x), xb: (b, x), xc: (c, x)})
        kids = {n0: Tri((a, b, x), (walk[(a, b)], xb, xa)),
                n1: Tri((b, c, x), (walk[(b, c)], xc, xb)),
                n2: Tri((c, a, x), (walk[(c, a)], xa, xc))}
        parent_sign = triangle_sign(T, self.colors)
        for k, tri in kids.items():
            if triangle_sign(tri, self.colors) is not -parent_sign:
                raise StructuralError(f"subdivision child {k} does not carry the opposite sign")
        del self.tris[t]
        self.tris.update(kids)
        self._swap(walk[(a, b)], t, n0)
        self._swap(walk[(b, c)], t, n1)
        self._swap(walk[(c, a)], t, n2)
        self.edge_tris[xa] = [n0, n2]
        self.edge_tris[xb] = [n0, n1]
        self.edge_tris[xc] = [n1, n2]
        if self.tri_pool is not None:
            self.tri_pool.remove(t)
            for k in (n0, n1, n2):
                self.tri_pool.add(k)
            for k in (xa, xb, xc):
                self.edge_pool.add(k)
        return Subdivide(t, x, col, (n0, n1, n2), (xa, xb, xc))

    def apply(self, m: Move, step: int | None = None) -> None:
        """Apply a recorded move, checking that the recorded ids are the fresh ones."""
        try:
            if isinstance(m, Flip):
                got = self.flip(m.edge)
            else:
                got = self.subdivide(m.tri)
        except MoveError as exc:
            raise MoveError(str(exc), step) from None
        if got != m:
            raise MoveError(f"recorded {m} but the allocator gives {got}", step)

    def _new(self, d: int) -> int:
        x = self.next[d]
        self.next[d] += 1
        return x

    def _swap(self, e: int, old: int, new: int) -> None:
        ts = self.edge_tris[e]
        ts[ts.index(old)] = new


def base_tetrahedron(base: tuple[tuple[int, int], ...]) -> tuple[Surface2, dict[int, int]]:
    """Canonical tetrahedron boundary on the four ``(vertex, color)`` records."""
    if len(base) != 4 or len({v for v, _ in base}) != 4:
        raise PreconditionError("base needs four distinct vertices")
    vs = tuple(v for v, _ in base)
    colors = {v: c for v, c in base}
    edges = {k: (vs[i], vs[j]) for k, (i, j) in enumerate(BASE_PAIRS)}
    eid = {frozenset((vs[i], vs[j])): k for k, (i, j) in enumerate(BASE_PAIRS)}
    tris = {}
    for i in range(4):
        a, b, c = induced_face(vs, i)
        tris[i] = Tri((a, b, c), (eid[frozenset((a, b))], eid[frozenset((b, c))], eid[frozenset((a, c))]))
    return Surface2(set(vs), edges, tris, closed=True), colors


def apply_flip(S: Surface2, colors: Mapping[int, int], e: int) -> tuple[Surface2, Flip]:
    W = WorkingSphere(S, colors)
    rec = W.flip(e)
    out = W.surface()
    if debug_enabled() and not validate_surface(out).ok:
        raise StructuralError("flip produced an invalid surface")
    return out, rec


def apply_subdivide(S: Surface2, colors: Mapping[int, int], t: int) -> tuple[Surface2, dict[int, int], Subdivide]:
    W = WorkingSphere(S, colors)
    rec = W.subdivide(t)
    return W.surface(), W.colors, rec


def replay(seq: MoveSequence) -> tuple[Surface2, dict[int, int]]:
    """Build the base tetrahedron and apply the moves, failing at the first bad one."""
    W = WorkingSphere.base(seq.base)
    for k, m in enumerate(seq.moves):
        W.apply(m, k)
    S = W.surface()
    rep = validate_surface(S)
    if not rep.ok:
        raise StructuralError("replayed surface is invalid: " + "; ".join(rep.errors[:3]))
    return S, W.colors


DEFAULT_BASE = ((0, 0), (1, 1), (2, 2), (3, 3))


def generate_random(n_moves: int, seed: int, flip_ratio: float = 0.5,
                    base: tuple[tuple[int, int], ...] = DEFAULT_BASE) -> tuple[Surface2, dict[int, int], MoveSequence]:
    """Random strictly 4-colored sphere built by ``n_moves`` moves from the tetrahedron.

    Each step is a flip with probability ``flip_ratio`` (uniform over
    flippable edges) and otherwise a subdivision of a uniform triangle; when
    no edge is flippable the step subdivides instead.  Deterministic per seed.
    """
    if n_moves < 0:
        raise PreconditionError("n_moves must be non-negative")
    rng = random.Random(seed)
    W = WorkingSphere.base(base)
    W.track()
    seq = MoveSequence(tuple(base))
    for _ in range(n_moves):
        move = None
        if rng.random() < flip_ratio:
            e = _pick_flippable(W, rng)
            if e is not None:
                move = W.flip(e)
        if move is None:
            move = W.subdivide(W.tri_pool.choice(rng))
        seq.moves.append(move)
    return W.surface(), dict(W.colors), seq


def _pick_flippable(W: WorkingSphere, rng: random.Random, tries: int = 32) -> int | None:
    for _ in range(tries):
        e = W.edge_pool.choice(rng)
        if W.can_flip(e):
            return e
    ok = sorted(e for e in W.edges if W.can_flip(e))
    return ok[rng.randrange(len(ok))] if ok else None
