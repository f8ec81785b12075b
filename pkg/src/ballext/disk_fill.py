"""Filling a 3-colored cycle with a disk, and shelling triangulated disks.

``fill_cycle`` triangulates a polygon using chords only: it looks for three
consecutive vertices with distinct colors and either fans out from the
middle one (when its color occurs nowhere else on the cycle) or cuts the ear
at the middle one and repeats on the shorter cycle.

``shell_disk2`` orders the triangles of a disk so that every prefix is again
a disk, starting from any chosen triangle.
"""
from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from functools import lru_cache
from typing import Iterable, Mapping

from .core import (CycleGraph, IdAlloc, PreconditionError, StructuralError, Surface2, Tri,
                   _bigon_sides)

DEFAULT_ENUM_BOUND = 12


def _check_cycle(C: CycleGraph, colors: Mapping[int, int]) -> None:
    n = len(C.vertices)
    if n < 3:
        raise PreconditionError("a strictly 3-colored cycle needs at least 3 vertices")
    if len(set(C.vertices)) != n or len(C.edges) != n:
        raise PreconditionError("cycle repeats a vertex or has mismatched edges")
    for k in range(n):
        if colors[C.vertices[k]] == colors[C.vertices[(k + 1) % n]]:
            raise PreconditionError(f"cycle edge {C.edges[k]} is not properly colored")
    if len({colors[v] for v in C.vertices}) != 3:
        raise PreconditionError("cycle is not strictly 3-colored")


def tricolored_triple(vs: list[int], colors: Mapping[int, int]) -> int:
    """Index of the middle vertex of the rainbow consecutive triple whose
    (previous, middle, next) vertex ids are lexicographically smallest."""
    n = len(vs)
    best = None
    for i in range(n):
        trip = (vs[i - 1], vs[i], vs[(i + 1) % n])
        if len({colors[v] for v in trip}) == 3 and (best is None or trip < best[0]):
            best = (trip, i)
    if best is None:
        raise StructuralError("no rainbow triple on a strictly 3-colored cycle")
    return best[1]


def fill_cycle(C: CycleGraph, colors: Mapping[int, int], alloc: IdAlloc | None = None,
               edges_out: dict[int, tuple[int, int]] | None = None) -> Surface2:
    """Triangulate the disk bounded by a strictly 3-colored cycle, no inner vertices.

    Chords and triangles get ids from ``alloc`` (default: edges after the
    largest cycle edge id, triangles from 0).  The triangles run along the
    cycle direction.  When ``edges_out`` is given, new chords are also
    recorded there.
    """
    _check_cycle(C, colors)
    if alloc is None:
        alloc = IdAlloc(edge=max(C.edges) + 1, tri=0)
    vs = list(C.vertices)
    es = list(C.edges)
    n = len(vs)
    edges = {C.edges[k]: (vs[k], vs[(k + 1) % n]) for k in range(n)}
    tris: dict[int, Tri] = {}
    count = Counter(colors[v] for v in vs)

    def chord(u: int, w: int) -> int:
        e = alloc.edge()
        edges[e] = (u, w)
        if edges_out is not None:
            edges_out[e] = (u, w)
        return e

    while True:
        n = len(vs)
        if n == 3:
            tris[alloc.tri()] = Tri(tuple(vs), (es[0], es[1], es[2]))
            break
        i = tricolored_triple(vs, colors)
        mid = vs[i]
        if count[colors[mid]] == 1:
            # fan from the only vertex of its color
            order = [vs[(i + j) % n] for j in range(n)]
            ring = [es[(i + j) % n] for j in range(n)]
            prev = ring[0]
            for j in range(1, n - 1):
                closing = ring[n - 1] if j == n - 2 else chord(mid, order[j + 1])
                tris[alloc.tri()] = Tri((mid, order[j], order[j + 1]), (prev, ring[j], closing))
                prev = closing
            break
        a, c = vs[i - 1], vs[(i + 1) % n]
        e = chord(a, c)
        tris[alloc.tri()] = Tri((a, mid, c), (es[i - 1], es[i], e))
        es[i - 1] = e
        del vs[i], es[i]
        count[colors[mid]] -= 1
        if len(count - Counter()) != 3 or len({colors[v] for v in vs}) != 3:
            raise StructuralError("ear cut lost a color")
    return Surface2(set(C.vertices), edges, tris, closed=False)


def polygon_triangulations(n: int) -> list[tuple[tuple[int, int, int], ...]]:
    """All Catalan(n-2) triangulations of the convex n-gon on indices 0..n-1."""

    @lru_cache(maxsize=None)
    def rec(i: int, j: int) -> tuple:
        if j - i < 2:
            return ((),)
        out = []
        for k in range(i + 1, j):
            for left in rec(i, k):
                for right in rec(k, j):
                    out.append(left + ((i, k, j),) + right)
        return tuple(out)

    return [tuple(sorted(t)) for t in rec(0, n - 1)]


def enumerate_polygon_fillings(C: CycleGraph, colors: Mapping[int, int],
                               bound: int = DEFAULT_ENUM_BOUND) -> list[Surface2]:
    """Every chord triangulation of the cycle whose chords are properly colored."""
    n = len(C.vertices)
    if n > bound:
        raise PreconditionError(f"cycle length {n} exceeds enumeration bound {bound}")
    if n < 3:
        raise PreconditionError("need at least 3 vertices")
    vs = C.vertices
    base = {C.edges[k]: (vs[k], vs[(k + 1) % n]) for k in range(n)}
    ring = {frozenset((k, (k + 1) % n)): C.edges[k] for k in range(n)}
    out = []
    for tri_set in polygon_triangulations(n):
        pairs = sorted({p for t in tri_set for p in ((t[0], t[1]), (t[1], t[2]), (t[0], t[2]))})
        chords = [p for p in pairs if frozenset(p) not in ring]
        if any(colors[vs[i]] == colors[vs[j]] for i, j in chords):
            continue
        edges = dict(base)
        eid = dict(ring)
        nxt = max(C.edges) + 1
        for i, j in chords:
            edges[nxt] = (vs[i], vs[j])
            eid[frozenset((i, j))] = nxt
            nxt += 1
        tris = {}
        for k, (a, b, c) in enumerate(tri_set):
            tris[k] = Tri((vs[a], vs[b], vs[c]),
                          (eid[frozenset((a, b))], eid[frozenset((b, c))], eid[frozenset((a, c))]))
        out.append(Surface2(set(vs), edges, tris, closed=False))
    return out


def filling_signature(D: Surface2) -> frozenset:
    """Vertex sets of the triangles: identifies a chord filling independent of ids."""
    return frozenset(frozenset(t.corners) for t in D.tris.values())


def _attach_ok(tri: Tri, edge_count: Mapping[int, int], verts: set[int]) -> bool:
    shared = [s for s in tri.sides if edge_count.get(s, 0)]
    if len(shared) == 1:
        e = shared[0]
        k = tri.sides.index(e)
        opposite = tri.corners[{0: 2, 1: 0, 2: 1}[k]]
        return opposite not in verts
    if len(shared) == 2:
        return all(edge_count[s] == 1 for s in shared)
    return False


def shell_disk2(D: Surface2, start: int) -> list[int]:
    """Order the triangles of a disk so that every prefix is a disk.

    Greedy: repeatedly attach the smallest-id triangle that meets the prefix
    in one edge with a new opposite vertex, or in two edges (closing the fan
    of a vertex).  If that ever stalls, fall back to the recursive cut
    construction.
    """
    if start not in D.tris:
        raise PreconditionError(f"triangle {start} is not in the disk")
    tris = D.tris
    et = D.edge_tris
    order = [start]
    inside = {start}
    edge_count: dict[int, int] = defaultdict(int)
    verts = set(tris[start].corners)
    for s in tris[start].sides:
        edge_count[s] += 1
    heap: list[int] = []

    def push_neighbours(t: int) -> None:
        for s in tris[t].sides:
            for n in et[s]:
                if n not in inside:
                    heapq.heappush(heap, n)

    push_neighbours(start)
    while heap:
        t = heapq.heappop(heap)
        if t in inside or not _attach_ok(tris[t], edge_count, verts):
            continue
        order.append(t)
        inside.add(t)
        verts.update(tris[t].corners)
        for s in tris[t].sides:
            edge_count[s] += 1
        push_neighbours(t)
    if len(order) != len(tris):
        return shell_disk2_by_cuts(D, start)
    return order


def shell_disk2_by_cuts(D: Surface2, start: int) -> list[int]:
    """Recursive shelling: split along a cutting edge if there is one,
    otherwise peel a boundary triangle other than the start."""
    if start not in D.tris:
        raise PreconditionError(f"triangle {start} is not in the disk")
    return _shell_rec(D.tris, set(D.tris), start)


def _shell_rec(tris: Mapping[int, Tri], part: set[int], start: int) -> list[int]:
    if len(part) == 1:
        return [start]
    et: dict[int, list[int]] = defaultdict(list)
    for t in sorted(part):
        for s in tris[t].sides:
            et[s].append(t)
    bd_edges = {e for e, ts in et.items() if len(ts) == 1}
    ends = defaultdict(set)
    for t in part:
        for s, e in enumerate(tris[t].sides):
            ends[e].update(tris[t].corners[i] for i in ((0, 1), (1, 2), (0, 2))[s])
    bd_verts = {v for e in bd_edges for v in ends[e]}
    for e in sorted(et):
        if e in bd_edges or not ends[e] <= bd_verts:
            continue
        side = _bigon_sides(tris, et, {e}, start)
        if side == part:
            continue
        other = part - side
        first = next(t for t in et[e] if t in other)
        return _shell_rec(tris, side, start) + _shell_rec(tris, other, first)
    for t in sorted(part):
        if t != start and any(s in bd_edges for s in tris[t].sides):
            rest = part - {t}
            return _shell_rec(tris, rest, start) + [t]
    raise StructuralError("disk admits no shelling step")


def prefix_is_disk_sequence(D: Surface2, order: Iterable[int]) -> bool:
    """Validate every prefix of ``order`` as a disk (test/verification helper)."""
    from .core import validate_surface

    order = list(order)
    if sorted(order) != sorted(D.tris):
        return False
    for k in range(1, len(order) + 1):
        P = Surface2.from_tris(D.edges, D.tris, order[:k], closed=False)
        if not validate_surface(P).ok:
            return False
    return True
