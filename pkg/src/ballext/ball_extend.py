"""Extend a strictly 4-colored sphere to a colored 3-ball on the same vertices.

Without parallel edges the sphere is peeled one vertex at a time: a vertex
whose color occurs nowhere else is coned over its deletion; otherwise a
vertex whose link carries three colors is removed, its link is filled by
chords (``fill_cycle``) and the cone over that filling is attached later.
With parallel edges the sphere is cut along the bigon they form and the two
sides are handled by grafting one ball into another, by gluing two balls
along a boundary triangle, or by gluing two cones along a pair of triangles.

All cells live in one store with sequential fresh ids, so the construction
is deterministic.  The boundary of the result uses exactly the input's cells.
"""
from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Union

from .coloring import check_coloring
from .core import (Complex3, CycleGraph, IdAlloc, PreconditionError, StructuralError, Surface2, Tri,
                   build_complex, build_cone, check_complex, debug_enabled, deep_call,
                   edge_fan, reversed_tri, side_walks, validate_surface)
from .disk_fill import fill_cycle

Pairs = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ConeOfDeletion:
    """Cone from ``v`` over every triangle avoiding ``v``; ``cone`` lists (base, tet)."""

    v: int
    cone: Pairs


@dataclass(frozen=True)
class RemoveFillRecurse:
    """``inner`` is the ball over the sphere with ``v`` removed and its link
    filled by ``fill``; the cone from ``v`` over ``fill`` sits on top of it."""

    v: int
    fill: tuple[int, ...]
    cone: Pairs
    inner: "Trace"


@dataclass(frozen=True)
class GraftInner:
    """``b2`` grafted into a fissure of ``b1`` opened along inner triangle ``t``."""

    b1: "Trace"
    b2: "Trace"
    e: int
    e2: int
    e_star: int
    t: int
    t1: int
    t2: int
    x: int
    tau1: int
    tau2: int
    sigma1: int
    sigma2: int


@dataclass(frozen=True)
class GraftSurface:
    """``b1`` and ``b2`` glued along the single boundary triangle ``glue``."""

    b1: "Trace"
    b2: "Trace"
    e: int
    e2: int
    e_star: int
    t: int
    glue: int
    x: int
    rho1: int
    rho2: int


@dataclass(frozen=True)
class DoubleCone:
    """Cones over the two bigon sides minus ``t1`` / ``t2`` with apexes the
    opposite vertices ``apex1`` (of ``t2``) and ``apex2`` (of ``t1``), glued
    along triangles ``glue_i`` and ``glue_j``."""

    e: int
    e2: int
    t1: int
    t2: int
    apex1: int
    apex2: int
    glue_i: int
    glue_j: int
    cone1: Pairs
    cone2: Pairs


Trace = Union[ConeOfDeletion, RemoveFillRecurse, GraftInner, GraftSurface, DoubleCone]


@dataclass
class ExtensionResult:
    ball: Complex3
    trace: Trace
    vertex_map: dict[int, int]
    stats: Counter = field(default_factory=Counter)


class _Store:
    def __init__(self, S: Surface2, colors: Mapping[int, int]):
        self.edges = dict(S.edges)
        self.tris = dict(S.tris)
        self.tets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
        self.colors = dict(colors)
        nv, ne, nt = S.next_ids()
        self.alloc = IdAlloc(nv, ne, nt, 0)
        self.stats: Counter = Counter()
        # triangle -> tets having it as a face, filled lazily up to tet id `indexed`
        self.tri_tets: dict[int, list[int]] = defaultdict(list)
        self.indexed = 0

    def sync(self) -> None:
        for k in range(self.indexed, self.alloc.nxt[3]):
            for f in self.tets[k][1]:
                self.tri_tets[f].append(k)
        self.indexed = self.alloc.nxt[3]

    def replace_face(self, k: int, old: int, new: int) -> None:
        corners, faces = self.tets[k]
        if old not in faces:
            raise StructuralError(f"tet {k} has no face {old}")
        self.tets[k] = (corners, tuple(new if x == old else x for x in faces))
        if k < self.indexed:
            self.tri_tets[old].remove(k)
            self.tri_tets[new].append(k)


class _Sphere:
    """Mutable sphere (a set of triangle ids of the store) with incidence."""

    def __init__(self, store: _Store, tri_ids):
        self.store = store
        self.tris: set[int] = set()
        self.vt: dict[int, set[int]] = defaultdict(set)
        self.et: dict[int, set[int]] = defaultdict(set)
        self.pairs: dict[frozenset, set[int]] = defaultdict(set)
        self.multi: set[frozenset] = set()
        self.by_color: dict[int, set[int]] = defaultdict(set)
        self.heap: list[int] = []
        for t in sorted(tri_ids):
            self.add(t)

    def add(self, t: int) -> None:
        st = self.store
        tri = st.tris[t]
        self.tris.add(t)
        heapq.heappush(self.heap, t)
        for v in tri.corners:
            if not self.vt[v]:
                self.by_color[st.colors[v]].add(v)
            self.vt[v].add(t)
        for e in tri.sides:
            if not self.et[e]:
                key = frozenset(st.edges[e])
                self.pairs[key].add(e)
                if len(self.pairs[key]) > 1:
                    self.multi.add(key)
            self.et[e].add(t)

    def remove(self, t: int) -> None:
        st = self.store
        tri = st.tris[t]
        self.tris.discard(t)
        for v in tri.corners:
            self.vt[v].discard(t)
            if not self.vt[v]:
                del self.vt[v]
                self.by_color[st.colors[v]].discard(v)
        for e in tri.sides:
            self.et[e].discard(t)
            if not self.et[e]:
                del self.et[e]
                key = frozenset(st.edges[e])
                self.pairs[key].discard(e)
                if len(self.pairs[key]) < 2:
                    self.multi.discard(key)

    def split_off(self, part) -> "_Sphere":
        """Move the triangles ``part`` into a new sphere (cost linear in ``part``)."""
        for t in part:
            self.remove(t)
        return _Sphere(self.store, part)

    def clear(self) -> None:
        self.__init__(self.store, ())

    def colors_present(self) -> set[int]:
        return {c for c, vs in self.by_color.items() if vs}

    def min_tri(self) -> int:
        while self.heap[0] not in self.tris:
            heapq.heappop(self.heap)
        return self.heap[0]

    def parallel_pair(self) -> tuple[int, int] | None:
        best = None
        for key in self.multi:
            e, e2 = sorted(self.pairs[key])[:2]
            if best is None or (e, e2) < best:
                best = (e, e2)
        return best

    def unique_vertex(self) -> int | None:
        lone = [min(vs) for vs in self.by_color.values() if len(vs) == 1]
        return min(lone) if lone else None

    def n_colors(self) -> int:
        return len(self.colors_present())

    def surface(self) -> Surface2:
        return Surface2.from_tris(self.store.edges, self.store.tris, sorted(self.tris), closed=True)

    def link(self, v: int) -> tuple[CycleGraph, dict[int, int], dict[int, int]]:
        """Link cycle of ``v`` plus (link vertex -> spoke edge) and (link edge -> star triangle)."""
        st = self.store
        step = {}
        spokes: dict[int, int] = {}
        star: dict[int, int] = {}
        for t in self.vt[v]:
            tri = st.tris[t]
            walk = dict(zip(side_walks(tri), tri.sides))
            k = tri.corners.index(v)
            p, q = tri.corners[(k + 1) % 3], tri.corners[(k + 2) % 3]
            e_vp, e_pq, e_qv = walk[(v, p)], walk[(p, q)], walk[(q, v)]
            step[e_vp] = (p, e_pq, e_qv)
            spokes[p] = e_vp
            star[e_pq] = t
        e0 = min(step, key=lambda e: step[e][1])
        verts, edges = [], []
        e = e0
        while True:
            p, e_pq, e = step[e]
            verts.append(p)
            edges.append(e_pq)
            if e == e0:
                break
            if len(verts) > len(step):
                raise StructuralError(f"vertex {v}: link is not a cycle")
        if len(verts) != len(step) or len(set(verts)) != len(verts):
            raise StructuralError(f"vertex {v}: link is not a simple cycle")
        return CycleGraph(tuple(verts), tuple(edges)), spokes, star


def _link_tricolor_vertex(W: _Sphere) -> int:
    st = W.store
    col = st.colors
    seed = W.min_tri()
    palette = {col[v] for v in st.tris[seed].corners}
    region = {seed}
    todo = [seed]
    while todo:
        t = todo.pop()
        for e in st.tris[t].sides:
            for n in W.et[e]:
                if n not in region and {col[v] for v in st.tris[n].corners} == palette:
                    region.add(n)
                    todo.append(n)
    if len(region) == len(W.tris):
        raise PreconditionError("triangles of three colors cover the sphere: coloring is not strict")
    boundary = [e for t in region for e in st.tris[t].sides if any(n not in region for n in W.et[e])]
    e = min(boundary)
    v = min(st.edges[e])
    if len({col[p] for t in W.vt[v] for p in st.tris[t].corners if p != v}) != 3:
        raise StructuralError(f"vertex {v} found by region growth has no 3-colored link")
    return v


def find_link_tricolor_vertex(S: Surface2, colors: Mapping[int, int]) -> int:
    """A vertex whose link uses exactly three colors (sphere without parallel edges)."""
    if S.has_parallel_edges():
        raise PreconditionError("sphere has parallel edges")
    return _link_tricolor_vertex(_Sphere(_Store(S, colors), S.tris))


class _Extender:
    def __init__(self, S: Surface2, colors: Mapping[int, int]):
        self.st = _Store(S, colors)

    def extend(self, W: _Sphere) -> Trace:
        st = self.st
        chain = []
        while True:
            if debug_enabled():
                rep = validate_surface(W.surface())
                if not rep.ok:
                    raise StructuralError("intermediate sphere is invalid: " + "; ".join(rep.errors[:3]))
                if W.n_colors() != 4:
                    raise StructuralError("intermediate sphere lost a color")
            pair = W.parallel_pair()
            if pair is not None:
                core = self.parallel(W, *pair)
                break
            u = W.unique_vertex()
            if u is not None:
                core = self.cone_of_deletion(W, u)
                break
            v = _link_tricolor_vertex(W)
            cyc, spokes, star = W.link(v)
            R = fill_cycle(cyc, st.colors, alloc=st.alloc, edges_out=st.edges)
            st.tris.update(R.tris)
            cone = build_cone(st.edges, st.tris, st.tets, R.tris, v, st.alloc, base_outward=False,
                              vertex_edges=spokes, edge_tris=star)
            for t in list(W.vt[v]):
                W.remove(t)
            for t in sorted(R.tris):
                W.add(t)
            st.stats["remove_fill"] += 1
            chain.append((v, tuple(sorted(R.tris)), tuple(cone)))
        trace = core
        for v, fill, cone in reversed(chain):
            trace = RemoveFillRecurse(v, fill, cone, trace)
        return trace

    def cone_of_deletion(self, W: _Sphere, u: int) -> ConeOfDeletion:
        st = self.st
        _, spokes, star = W.link(u)
        base = sorted(W.tris - W.vt[u])
        cone = build_cone(st.edges, st.tris, st.tets, base, u, st.alloc, base_outward=True,
                          vertex_edges=spokes, edge_tris=star)
        W.clear()
        st.stats["cone_of_deletion"] += 1
        return ConeOfDeletion(u, tuple(cone))

    def parallel(self, W: _Sphere, e: int, e2: int) -> Trace:
        st = self.st
        ta = min(W.et[e])
        tb = next(t for t in W.et[e] if t != ta)
        i, part = _smaller_side(st.tris, W.et, {e, e2}, (ta, tb))
        small = W.split_off(part)
        first, second = (small, W) if i == 0 else (W, small)
        for P in (first, second):
            if len(P.vt) <= 2:
                raise StructuralError("bigon side without inner vertices")
        strict = [P for P in (first, second) if P.n_colors() == 4]
        if strict:
            D1 = min(strict, key=lambda P: (len(P.tris), P.min_tri()))
            D2 = second if D1 is first else first
            return self.graft(D1, D2, e, e2)
        return self.double_cone(first, second, e, e2)

    def graft(self, P1: _Sphere, P2: _Sphere, e: int, e2: int) -> Trace:
        st = self.st
        vi, vj = st.edges[e]
        a = next(iter(P1.et[e]))
        b = next(iter(P1.et[e2]))
        e_star = st.alloc.edge()
        st.edges[e_star] = (vi, vj)
        a_s, b_s = st.alloc.tri(), st.alloc.tri()
        st.tris[a_s] = _swap_side(st.tris[a], e, e_star)
        st.tris[b_s] = _swap_side(st.tris[b], e2, e_star)
        for t in (a, b):
            P1.remove(t)
        for t in (a_s, b_s):
            P1.add(t)
        trace1 = self.extend(P1)

        d2_colors = P2.colors_present()
        missing = [c for c in range(4) if c not in d2_colors]
        want = missing[0] if missing else min(c for c in range(4) if c not in (st.colors[vi], st.colors[vj]))
        st.sync()
        fan = edge_fan(e_star, a_s, st.tris, _FaceView(st.tets), st.tri_tets)
        if fan[-1] != b_s:
            raise StructuralError("fan around the glued edge does not end at the other bigon side")
        third = lambda t: next(v for v in st.tris[t].corners if v not in (vi, vj))
        inner = sorted(t for t in fan[2:-1:2] if st.colors[third(t)] == want)
        # walk direction of each bigon edge inside D2
        d2_walk = {}
        for s in (e, e2):
            tri = st.tris[next(iter(P2.et[s]))]
            d2_walk[s] = dict(zip(tri.sides, side_walks(tri)))[s]

        def cap(src: int, old: int, new: int) -> int:
            """New triangle like ``src`` with side ``old`` -> ``new``, walking ``new``
            against D2."""
            tri = _swap_side(st.tris[src], old, new)
            if dict(zip(tri.sides, side_walks(tri)))[new] == d2_walk[new]:
                tri = reversed_tri(tri)
            f = st.alloc.tri()
            st.tris[f] = tri
            return f

        if inner:
            t = inner[0]
            pos = fan.index(t)
            tau1, tau2 = fan[pos - 1], fan[pos + 1]
            for f in fan[2:pos:2]:
                st.tris[f] = _swap_side(st.tris[f], e_star, e)
            for f in fan[pos + 2:-1:2]:
                st.tris[f] = _swap_side(st.tris[f], e_star, e2)
            t1, t2 = cap(t, e_star, e), cap(t, e_star, e2)
            st.replace_face(tau1, t, t1)
            st.replace_face(tau2, t, t2)
            st.replace_face(fan[1], a_s, a)
            st.replace_face(fan[-2], b_s, b)
            P2.add(t1)
            P2.add(t2)
            trace2 = self.extend(P2)
            st.sync()
            sigma1 = next(k for k in st.tri_tets[t1] if k != tau1)
            sigma2 = next(k for k in st.tri_tets[t2] if k != tau2)
            st.stats["graft_inner"] += 1
            return GraftInner(trace1, trace2, e, e2, e_star, t, t1, t2, third(t), tau1, tau2, sigma1, sigma2)

        ends = sorted(t for t in (a_s, b_s) if st.colors[third(t)] == want)
        if not ends:
            raise StructuralError("no triangle on the glued edge carries the apex color")
        t = ends[0]
        if t == a_s:
            glue = cap(a, e, e2)
            keep, new_side, rho1 = a, e2, fan[1]
            st.replace_face(fan[1], a_s, glue)
            st.replace_face(fan[-2], b_s, b)
        else:
            glue = cap(b, e2, e)
            keep, new_side, rho1 = b, e, fan[-2]
            st.replace_face(fan[-2], b_s, glue)
            st.replace_face(fan[1], a_s, a)
        for f in fan[2:-1:2]:
            st.tris[f] = _swap_side(st.tris[f], e_star, new_side)
        P2.add(keep)
        P2.add(glue)
        trace2 = self.extend(P2)
        st.sync()
        rho2 = next(k for k in st.tri_tets[glue] if k != rho1)
        st.stats["graft_surface"] += 1
        return GraftSurface(trace1, trace2, e, e2, e_star, t, glue, third(t), rho1, rho2)

    def double_cone(self, P1: _Sphere, P2: _Sphere, e: int, e2: int) -> DoubleCone:
        st = self.st
        vi, vj = st.edges[e]
        t1 = next(iter(P1.et[e]))
        t2 = next(iter(P2.et[e2]))
        T1, T2 = st.tris[t1], st.tris[t2]
        v1 = next(v for v in T1.corners if v not in (vi, vj))
        v2 = next(v for v in T2.corners if v not in (vi, vj))
        edge_at = lambda T, u, w: next(s for s in T.sides if frozenset(st.edges[s]) == frozenset((u, w)))
        f = st.alloc.edge()
        st.edges[f] = (v1, v2)
        ve1 = {vi: edge_at(T2, vi, v2), vj: edge_at(T2, vj, v2), v1: f}
        et1 = {e2: t2}
        cone1 = build_cone(st.edges, st.tris, st.tets, P1.tris - {t1}, v2, st.alloc,
                           vertex_edges=ve1, edge_tris=et1)
        g_i, g_j = et1[edge_at(T1, vi, v1)], et1[edge_at(T1, vj, v1)]
        ve2 = {vi: edge_at(T1, vi, v1), vj: edge_at(T1, vj, v1), v2: f}
        et2 = {e: t1, edge_at(T2, vi, v2): g_i, edge_at(T2, vj, v2): g_j}
        cone2 = build_cone(st.edges, st.tris, st.tets, P2.tris - {t2}, v1, st.alloc,
                           vertex_edges=ve2, edge_tris=et2)
        P1.clear()
        P2.clear()
        st.stats["double_cone"] += 1
        return DoubleCone(e, e2, t1, t2, v2, v1, g_i, g_j, tuple(cone1), tuple(cone2))

    def result(self, S: Surface2, trace: Trace) -> ExtensionResult:
        st = self.st
        ball = build_complex(st.edges, st.tris, st.tets)
        if debug_enabled():
            check_complex(ball, "extension")
        return ExtensionResult(ball, trace, {v: v for v in sorted(S.vertices)}, st.stats)


class _FaceView:
    def __init__(self, tets):
        self.tets = tets

    def __getitem__(self, k: int) -> tuple[int, ...]:
        return self.tets[k][1]


def _smaller_side(tris, edge_tris, cut: set[int], seeds: tuple[int, int]) -> tuple[int, set[int]]:
    """Grow both sides of a separating cut in lockstep; return the index of the
    seed whose side was exhausted first, with that side."""
    seen = ({seeds[0]}, {seeds[1]})
    todo = ([seeds[0]], [seeds[1]])
    while True:
        for i in (0, 1):
            if not todo[i]:
                return i, seen[i]
            t = todo[i].pop()
            for s in tris[t].sides:
                if s in cut:
                    continue
                for n in edge_tris[s]:
                    if n in seen[1 - i]:
                        raise StructuralError(f"cut {sorted(cut)} does not separate the sphere")
                    if n not in seen[i]:
                        seen[i].add(n)
                        todo[i].append(n)


def _swap_side(tri: Tri, old: int, new: int) -> Tri:
    return Tri(tri.corners, tuple(new if s == old else s for s in tri.sides))


def _check_input(S: Surface2, colors: Mapping[int, int]) -> None:
    if not S.closed:
        raise PreconditionError("input must be a closed surface")
    rep = validate_surface(S)
    if not rep.ok:
        raise PreconditionError("invalid sphere: " + "; ".join(rep.errors[:3]))
    crep = check_coloring(S, colors, require_strict=True, k=4)
    if crep.missing or not crep.proper:
        raise PreconditionError("coloring is not a proper coloring of every vertex")
    if not crep.strict:
        raise PreconditionError(f"coloring uses {crep.n_colors} colors, not exactly 4")


def extend_to_ball(S: Surface2, colors: Mapping[int, int]) -> ExtensionResult:
    """Triangulated 3-ball with boundary ``S``, no new vertices, ``colors`` proper on it."""
    _check_input(S, colors)
    ex = _Extender(S, colors)
    trace = deep_call(ex.extend, _Sphere(ex.st, S.tris))
    return ex.result(S, trace)


def extend_parallel_case(S: Surface2, colors: Mapping[int, int], e: int, e2: int) -> ExtensionResult:
    """Run the bigon surgery on the given parallel pair (then recurse as usual)."""
    _check_input(S, colors)
    if e == e2 or e not in S.edges or e2 not in S.edges or frozenset(S.edges[e]) != frozenset(S.edges[e2]):
        raise PreconditionError(f"edges {e} and {e2} are not parallel")
    ex = _Extender(S, colors)
    trace = deep_call(ex.parallel, _Sphere(ex.st, S.tris), e, e2)
    return ex.result(S, trace)


def trace_kinds(trace: Trace) -> Counter:
    """How many nodes of each kind the trace contains."""
    out: Counter = Counter()
    todo = [trace]
    while todo:
        n = todo.pop()
        out[type(n).__name__] += 1
        if isinstance(n, RemoveFillRecurse):
            todo.append(n.inner)
        elif isinstance(n, (GraftInner, GraftSurface)):
            todo += [n.b1, n.b2]
    return out
