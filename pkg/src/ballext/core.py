"""Cell-level Delta-complexes in dimensions 1, 2 and 3.

Cells carry explicit identities: an edge is an id plus an unordered pair of
endpoints, a triangle lists its corners *and* its three sides, a tetrahedron
lists its corners, its four faces and the corner correspondence of each face.
Vertex tuples alone cannot describe a triangulation once parallel edges are
allowed, which is the whole reason for this layout.

Conventions
-----------
* Triangle ``(v0, v1, v2)`` has sides ``(e01, e12, e02)``.  Its orientation
  is the boundary walk ``v0 -> v1 -> v2 -> v0``, so ``e02`` is traversed
  from ``v2`` to ``v0``.
* Face ``i`` of a tetrahedron omits corner ``i``.  The orientation a
  tetrahedron induces on face ``i`` is the remaining corners in order when
  ``i`` is even and reversed when ``i`` is odd.  Boundary triangles of a ball
  are stored with the induced (outward) orientation.
"""
from __future__ import annotations

import os
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Mapping, NamedTuple

_DEBUG = os.environ.get("BALLEXT_DEBUG", "") not in ("", "0")


def set_debug(flag: bool) -> None:
    """Turn re-validation of intermediate results on or off."""
    global _DEBUG
    _DEBUG = bool(flag)


def debug_enabled() -> bool:
    return _DEBUG


class TriangulationError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(TriangulationError, ValueError):
    """An operation was called on input outside its contract."""


class StructuralError(TriangulationError):
    """A complex is not the manifold it should be (bad input or a bug)."""


class Tri(NamedTuple):
    corners: tuple[int, int, int]
    sides: tuple[int, int, int]


class Tet(NamedTuple):
    corners: tuple[int, int, int, int]
    faces: tuple[int, int, int, int]
    # maps[i][k] = index (into corners) of corner k of the triangle faces[i]
    maps: tuple[tuple[int, int, int], ...]


class CycleGraph(NamedTuple):
    """Cyclic sequence; ``edges[k]`` joins ``vertices[k]`` and ``vertices[k+1]``."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]


# corner index pairs of the sides of a triangle, in side order
SIDE_CORNERS = ((0, 1), (1, 2), (0, 2))


def side_index(i: int, j: int) -> int:
    return {frozenset((0, 1)): 0, frozenset((1, 2)): 1, frozenset((0, 2)): 2}[frozenset((i, j))]


def side_walks(tri: Tri) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
    """Direction in which each side is traversed by the triangle's orientation."""
    a, b, c = tri.corners
    return (a, b), (b, c), (c, a)


def same_cycle(x: tuple, y: tuple) -> bool:
    n = len(x)
    if n != len(y) or set(x) != set(y):
        return False
    k = y.index(x[0])
    return all(x[i] == y[(k + i) % n] for i in range(n))


def induced_face(corners: tuple[int, ...], i: int) -> tuple[int, int, int]:
    rest = tuple(c for j, c in enumerate(corners) if j != i)
    return rest[::-1] if i % 2 else rest


def reversed_tri(tri: Tri) -> Tri:
    a, b, c = tri.corners
    e01, e12, e02 = tri.sides
    return Tri((a, c, b), (e02, e12, e01))


def make_tri(corners: tuple[int, int, int], edge_of: Mapping[frozenset, int]) -> Tri:
    a, b, c = corners
    return Tri(corners, (edge_of[frozenset((a, b))], edge_of[frozenset((b, c))], edge_of[frozenset((a, c))]))


def face_map(tet_corners: tuple[int, ...], tri: Tri) -> tuple[int, int, int]:
    return tuple(tet_corners.index(v) for v in tri.corners)  # type: ignore[return-value]


class Surface2:
    """A 2-dimensional Delta-complex: a closed surface or a disk.

    Treated as immutable once built; incidence tables are cached lazily.
    """

    def __init__(self, vertices: Iterable[int], edges: Mapping[int, tuple[int, int]],
                 tris: Mapping[int, Tri], closed: bool = True):
        self.vertices = set(vertices)
        self.edges = dict(edges)
        self.tris = {t: Tri(tuple(x.corners), tuple(x.sides)) for t, x in tris.items()}
        self.closed = closed
        self._edge_tris: dict[int, list[int]] | None = None
        self._vertex_tris: dict[int, list[int]] | None = None

    @classmethod
    def from_tris(cls, edges: Mapping[int, tuple[int, int]], tris: Mapping[int, Tri],
                  tri_ids: Iterable[int], closed: bool = False) -> "Surface2":
        """Subcomplex spanned by ``tri_ids`` (vertices/edges taken from the triangles)."""
        sub = {t: tris[t] for t in tri_ids}
        es = {e: edges[e] for x in sub.values() for e in x.sides}
        vs = {v for x in sub.values() for v in x.corners}
        return cls(vs, es, sub, closed)

    def __repr__(self) -> str:
        mode = "closed" if self.closed else "disk"
        return f"Surface2({mode}, V={len(self.vertices)}, E={len(self.edges)}, F={len(self.tris)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Surface2):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and self.tris == other.tris and self.closed == other.closed)

    def copy(self) -> "Surface2":
        return Surface2(self.vertices, self.edges, self.tris, self.closed)

    @property
    def edge_tris(self) -> dict[int, list[int]]:
        if self._edge_tris is None:
            et: dict[int, list[int]] = defaultdict(list)
            for t in sorted(self.tris):
                for e in self.tris[t].sides:
                    et[e].append(t)
            self._edge_tris = dict(et)
        return self._edge_tris

    @property
    def vertex_tris(self) -> dict[int, list[int]]:
        if self._vertex_tris is None:
            vt: dict[int, list[int]] = defaultdict(list)
            for t in sorted(self.tris):
                for v in self.tris[t].corners:
                    vt[v].append(t)
            self._vertex_tris = dict(vt)
        return self._vertex_tris

    def boundary_edges(self) -> list[int]:
        return sorted(e for e, ts in self.edge_tris.items() if len(ts) == 1)

    def parallel_classes(self) -> list[tuple[int, ...]]:
        groups: dict[frozenset, list[int]] = defaultdict(list)
        for e in sorted(self.edges):
            groups[frozenset(self.edges[e])].append(e)
        return sorted(tuple(g) for g in groups.values() if len(g) > 1)

    def has_parallel_edges(self) -> bool:
        return bool(self.parallel_classes())

    def next_ids(self) -> tuple[int, int, int]:
        """Fresh (vertex, edge, triangle) ids: one past the largest in use."""
        return (max(self.vertices, default=-1) + 1, max(self.edges, default=-1) + 1,
                max(self.tris, default=-1) + 1)


@dataclass
class Complex3:
    """A 3-dimensional Delta-complex of tetrahedra glued along triangles."""

    vertices: set[int]
    edges: dict[int, tuple[int, int]]
    tris: dict[int, Tri]
    tets: dict[int, Tet]

    def __repr__(self) -> str:
        return (f"Complex3(V={len(self.vertices)}, E={len(self.edges)}, "
                f"F={len(self.tris)}, T={len(self.tets)})")

    def tri_tets(self) -> dict[int, list[tuple[int, int]]]:
        """triangle id -> [(tet id, face slot)]"""
        out: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for k in sorted(self.tets):
            for i, f in enumerate(self.tets[k].faces):
                out[f].append((k, i))
        return dict(out)

    def tet_edges(self, k: int) -> dict[frozenset, int]:
        """Edge ids of tetrahedron ``k`` keyed by pairs of corner indices."""
        tet = self.tets[k]
        out: dict[frozenset, int] = {}
        for f, m in zip(tet.faces, tet.maps):
            sides = self.tris[f].sides
            for s, (i, j) in enumerate(SIDE_CORNERS):
                out.setdefault(frozenset((m[i], m[j])), sides[s])
        return out

    def next_ids(self) -> tuple[int, int, int, int]:
        return (max(self.vertices, default=-1) + 1, max(self.edges, default=-1) + 1,
                max(self.tris, default=-1) + 1, max(self.tets, default=-1) + 1)


def build_complex(edges: Mapping[int, tuple[int, int]], tris: Mapping[int, Tri],
                  raw_tets: Mapping[int, tuple[tuple[int, ...], tuple[int, ...]]]) -> Complex3:
    """Assemble a Complex3 from ``tet id -> (corners, faces)``.

    Only cells reachable from the tetrahedra are kept; face corner maps are
    derived from vertex labels, which is unambiguous because a tetrahedron
    has four distinct corners in every complex built here.
    """
    tets: dict[int, Tet] = {}
    used_tris: dict[int, Tri] = {}
    for k in sorted(raw_tets):
        corners, faces = raw_tets[k]
        maps = []
        for f in faces:
            tri = tris[f]
            used_tris[f] = tri
            try:
                maps.append(face_map(tuple(corners), tri))
            except ValueError:
                raise StructuralError(f"tet {k}: face {f} has a corner outside the tet") from None
        tets[k] = Tet(tuple(corners), tuple(faces), tuple(maps))
    used_edges = {e: edges[e] for t in used_tris.values() for e in t.sides}
    verts = {v for t in tets.values() for v in t.corners}
    return Complex3(verts, dict(sorted(used_edges.items())), dict(sorted(used_tris.items())), tets)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    parallel_edges: list[tuple[int, ...]] = field(default_factory=list)
    euler: int | None = None

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        lines = ["valid" if self.ok else "invalid"]
        lines += [f"  error: {e}" for e in self.errors]
        if self.parallel_edges:
            lines.append(f"  parallel edges: {self.parallel_edges}")
        else:
            lines.append("  no parallel edges")
        return "\n".join(lines)


class _DSU:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        p = self.parent
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def validate_surface(S: Surface2, *, check_orientation: bool = True) -> ValidationReport:
    """List every violated invariant of a closed surface or disk.

    Checks ids, loops, side endpoints, how many triangles use each edge,
    orientation coherence, connectedness, vertex links (one cycle, or one arc
    for boundary vertices of a disk), the boundary cycle of a disk and the
    Euler characteristic (2 for a sphere, 1 for a disk).
    """
    rep = ValidationReport()
    errs = rep.errors
    for e, (u, v) in S.edges.items():
        if u == v:
            errs.append(f"edge {e}: loop at vertex {u}")
        for w in (u, v):
            if w not in S.vertices:
                errs.append(f"edge {e}: unknown vertex {w}")
    uses: dict[int, list[tuple[int, tuple[int, int]]]] = defaultdict(list)
    at_vertex = _DSU()
    seen_vertices: set[int] = set()
    for t in sorted(S.tris):
        tri = S.tris[t]
        c = tri.corners
        if len(set(c)) != 3:
            errs.append(f"triangle {t}: repeated corner {c}")
            continue
        seen_vertices.update(c)
        for v in c:
            if v not in S.vertices:
                errs.append(f"triangle {t}: unknown vertex {v}")
        walks = side_walks(tri)
        for s, (i, j) in enumerate(SIDE_CORNERS):
            e = tri.sides[s]
            if e not in S.edges:
                errs.append(f"triangle {t}: unknown edge {e}")
                continue
            if frozenset(S.edges[e]) != frozenset((c[i], c[j])):
                errs.append(f"triangle {t}: side {e} does not join corners {c[i]},{c[j]}")
            uses[e].append((t, walks[s]))
        for k in range(3):
            s1, s2 = [tri.sides[s] for s, p in enumerate(SIDE_CORNERS) if k in p]
            at_vertex.union((c[k], s1), (c[k], s2))
    if errs:
        return rep

    boundary: list[int] = []
    for e in sorted(S.edges):
        n = len(uses.get(e, ()))
        if n == 0:
            errs.append(f"edge {e} lies in no triangle")
        elif n > 2:
            errs.append(f"edge {e} lies in {n} triangle-sides")
        elif n == 1:
            if S.closed:
                errs.append(f"edge {e} in one triangle-side, mode Closed")
            boundary.append(e)
        elif check_orientation:
            (_, w1), (_, w2) = uses[e]
            if w1 != (w2[1], w2[0]):
                errs.append(f"edge {e}: incoherent orientation of triangles "
                            f"{uses[e][0][0]} and {uses[e][1][0]}")
    for v in sorted(S.vertices - seen_vertices):
        errs.append(f"vertex {v} lies in no triangle")

    comp = _DSU()
    for e, us in uses.items():
        for t, _ in us[1:]:
            comp.union(us[0][0], t)
    if len({comp.find(t) for t in S.tris}) > 1:
        errs.append("surface is disconnected")

    # vertex links: nodes are (vertex, edge) pairs, arcs are the triangle corners
    link_parts: dict[int, set] = defaultdict(set)
    link_ends: dict[int, int] = defaultdict(int)
    for e, (u, v) in S.edges.items():
        n = len(uses.get(e, ()))
        for w in (u, v):
            link_parts[w].add(at_vertex.find((w, e)))
            if n == 1:
                link_ends[w] += 1
    for v in sorted(S.vertices):
        if len(link_parts[v]) > 1:
            errs.append(f"vertex {v}: link is not connected")
        if link_ends[v] not in (0, 2):
            errs.append(f"vertex {v}: link is not a cycle or an arc")

    if not S.closed:
        if not boundary:
            errs.append("disk has no boundary")
        else:
            deg: dict[int, int] = defaultdict(int)
            bd = _DSU()
            for e in boundary:
                u, v = S.edges[e]
                deg[u] += 1
                deg[v] += 1
                bd.union(u, v)
            if any(d != 2 for d in deg.values()) or len({bd.find(v) for v in deg}) > 1:
                errs.append("boundary edges do not form a single cycle")

    rep.euler = euler_characteristic(S)
    want = 2 if S.closed else 1
    if rep.euler != want:
        errs.append(f"Euler characteristic {rep.euler}, expected {want}")
    rep.parallel_edges = S.parallel_classes()
    return rep


def euler_characteristic(X: Surface2 | Complex3) -> int:
    chi = len(X.vertices) - len(X.edges) + len(X.tris)
    if isinstance(X, Complex3):
        chi -= len(X.tets)
    return chi


def check_surface(S: Surface2, what: str = "surface") -> None:
    rep = validate_surface(S)
    if not rep.ok:
        raise StructuralError(f"{what} is invalid: " + "; ".join(rep.errors[:5]))


def validate_complex(C: Complex3, *, links: bool = True) -> ValidationReport:
    """Check a candidate triangulated 3-ball cell by cell.

    Face/corner consistency, one edge id per tetrahedron edge, every triangle
    in one or two face slots, opposite induced orientations on interior
    triangles, boundary triangles stored with the induced orientation, a
    valid closed boundary surface, and (optionally) edge and vertex links.
    """
    rep = ValidationReport()
    errs = rep.errors
    for k in sorted(C.tets):
        tet = C.tets[k]
        if len(set(tet.corners)) != 4:
            errs.append(f"tet {k}: repeated corner {tet.corners}")
            continue
        for i, (f, m) in enumerate(zip(tet.faces, tet.maps)):
            if f not in C.tris:
                errs.append(f"tet {k}: unknown face {f}")
                continue
            if sorted(m) != [j for j in range(4) if j != i]:
                errs.append(f"tet {k}: face {i} map {m} does not omit corner {i}")
                continue
            if tuple(tet.corners[j] for j in m) != C.tris[f].corners:
                errs.append(f"tet {k}: face {f} corners disagree with map {m}")
        if errs:
            continue
        seen: dict[frozenset, int] = {}
        for f, m in zip(tet.faces, tet.maps):
            for s, (i, j) in enumerate(SIDE_CORNERS):
                key = frozenset((m[i], m[j]))
                e = C.tris[f].sides[s]
                if seen.setdefault(key, e) != e:
                    errs.append(f"tet {k}: faces disagree on edge between corners {sorted(key)}")
    if errs:
        return rep

    slots = C.tri_tets()
    bd_ids = []
    for f in sorted(C.tris):
        occ = slots.get(f, [])
        if len(occ) not in (1, 2):
            errs.append(f"triangle {f} lies in {len(occ)} tetrahedron faces")
            continue
        induced = [induced_face(C.tets[k].corners, i) for k, i in occ]
        if len(occ) == 2:
            if same_cycle(induced[0], induced[1]):
                errs.append(f"triangle {f}: both tetrahedra induce the same orientation")
        else:
            bd_ids.append(f)
            if not same_cycle(induced[0], C.tris[f].corners):
                errs.append(f"boundary triangle {f} is not stored with the outward orientation")
    if errs:
        return rep
    bd = Surface2.from_tris(C.edges, C.tris, bd_ids, closed=True)
    sub = validate_surface(bd)
    errs += [f"boundary: {e}" for e in sub.errors]
    if links and not errs:
        errs += _link_errors(C, slots, set(bd.edges), bd.vertices)
    rep.euler = euler_characteristic(C)
    if rep.euler != 1:
        errs.append(f"Euler characteristic {rep.euler}, expected 1")
    return rep


def _link_errors(C: Complex3, slots, bd_edges: set[int], bd_vertices: set[int]) -> list[str]:
    errs: list[str] = []
    # edge links: tetrahedra around an edge form an arc (boundary edge) or a cycle
    edge_faces: dict[int, list[int]] = defaultdict(list)
    for f, tri in C.tris.items():
        for e in tri.sides:
            edge_faces[e].append(f)
    for e in sorted(C.edges):
        dsu = _DSU()
        ends = 0
        for f in edge_faces[e]:
            for k, _ in slots[f]:
                dsu.union(("f", f), ("t", k))
            if len(slots[f]) == 1:
                ends += 1
        parts = {dsu.find(("f", f)) for f in edge_faces[e]}
        want = 2 if e in bd_edges else 0
        if len(parts) != 1 or ends != want:
            errs.append(f"edge {e}: link is not a single {'arc' if want else 'cycle'}")
    # vertex links: a disk for boundary vertices, a sphere otherwise
    link_tris: dict[int, dict[int, Tri]] = defaultdict(dict)
    link_edges: dict[int, dict[int, tuple[int, int]]] = defaultdict(dict)
    for k in sorted(C.tets):
        tet = C.tets[k]
        tedges = C.tet_edges(k)
        for i, v in enumerate(tet.corners):
            # link triangle of v in tet k: corners are the edges from v
            others = [j for j in range(4) if j != i]
            corners = tuple(tedges[frozenset((i, j))] for j in others)
            sides = []
            for a, b in SIDE_CORNERS:
                ja, jb = others[a], others[b]
                sides.append(tet.faces[next(x for x in range(4) if x not in (i, ja, jb))])
            link_tris[v][k] = Tri(corners, tuple(sides))
            for s, (a, b) in enumerate(SIDE_CORNERS):
                link_edges[v][sides[s]] = (corners[a], corners[b])
    for v in sorted(C.vertices):
        verts = {c for t in link_tris[v].values() for c in t.corners}
        L = Surface2(verts, link_edges[v], link_tris[v], closed=v not in bd_vertices)
        sub = validate_surface(L, check_orientation=False)
        if not sub.ok:
            errs.append(f"vertex {v}: link is not a {'sphere' if L.closed else 'disk'}")
    return errs


def check_complex(C: Complex3, what: str = "complex") -> None:
    rep = validate_complex(C)
    if not rep.ok:
        raise StructuralError(f"{what} is invalid: " + "; ".join(rep.errors[:5]))


def vertex_link(S: Surface2, v: int) -> CycleGraph:
    """Rotational cycle of the edges opposite ``v`` in the triangles around it.

    Consecutive triangles are chained through the edge ids they share at
    ``v``, so parallel edges are handled.  The cycle runs in the direction
    induced by the orientation: a triangle ``(v, p, q)`` contributes ``p -> q``.
    """
    if v not in S.vertices:
        raise PreconditionError(f"unknown vertex {v}")
    step: dict[int, tuple[int, int, int, int]] = {}
    for t in S.vertex_tris.get(v, ()):
        tri = S.tris[t]
        k = tri.corners.index(v)
        p, q = tri.corners[(k + 1) % 3], tri.corners[(k + 2) % 3]
        e_vp = tri.sides[side_index(k, (k + 1) % 3)]
        e_pq = tri.sides[side_index((k + 1) % 3, (k + 2) % 3)]
        e_qv = tri.sides[side_index((k + 2) % 3, k)]
        if e_vp in step:
            raise StructuralError(f"vertex {v}: link is not a single cycle")
        step[e_vp] = (p, e_pq, q, e_qv)
    if not step:
        raise StructuralError(f"vertex {v} lies in no triangle")
    start = S.tris[S.vertex_tris[v][0]]
    k = start.corners.index(v)
    e0 = start.sides[side_index(k, (k + 1) % 3)]
    verts, edges = [], []
    e = e0
    while True:
        if e not in step:
            raise StructuralError(f"vertex {v}: link is not a cycle")
        p, e_pq, _, e_next = step[e]
        verts.append(p)
        edges.append(e_pq)
        e = e_next
        if e == e0:
            break
        if len(verts) > len(step):
            raise StructuralError(f"vertex {v}: link is not a cycle")
    if len(verts) != len(step):
        raise StructuralError(f"vertex {v}: link is not a single cycle")
    return CycleGraph(tuple(verts), tuple(edges))


def star_and_deletion(S: Surface2, v: int) -> tuple[Surface2, Surface2]:
    """Closed star and deletion of ``v`` as two disks sharing the link of ``v``."""
    if S.has_parallel_edges():
        raise PreconditionError("star/deletion split needs a sphere without parallel edges")
    if v not in S.vertices:
        raise PreconditionError(f"unknown vertex {v}")
    star = set(S.vertex_tris[v])
    st = Surface2.from_tris(S.edges, S.tris, sorted(star))
    dl = Surface2.from_tris(S.edges, S.tris, sorted(set(S.tris) - star))
    return st, dl


class IdAlloc:
    """Sequential fresh ids per dimension."""

    def __init__(self, vertex: int = 0, edge: int = 0, tri: int = 0, tet: int = 0):
        self.nxt = [vertex, edge, tri, tet]

    def _take(self, d: int) -> int:
        x = self.nxt[d]
        self.nxt[d] += 1
        return x

    def vertex(self) -> int:
        return self._take(0)

    def edge(self) -> int:
        return self._take(1)

    def tri(self) -> int:
        return self._take(2)

    def tet(self) -> int:
        return self._take(3)


def build_cone(edges: dict[int, tuple[int, int]], tris: dict[int, Tri],
               tets: dict[int, tuple[tuple[int, ...], tuple[int, ...]]],
               base: Iterable[int], apex: int, alloc: IdAlloc, *, base_outward: bool = True,
               vertex_edges: dict[int, int] | None = None,
               edge_tris: dict[int, int] | None = None) -> list[tuple[int, int]]:
    """Cone the triangles ``base`` to ``apex``, writing new cells into the stores.

    ``vertex_edges`` (base vertex -> edge to apex) and ``edge_tris`` (base edge
    -> triangle over it with the apex) may pre-assign existing cells; the
    dicts are updated with every cell created, so successive cones can share
    them.  ``base_outward`` says whether the stored orientation of the base
    triangles is outward for the cone (true when the base is boundary of the
    result) or inward (the base is glued onto something on that side).

    Returns ``[(base triangle, new tetrahedron)]`` in ascending base order.
    """
    vertex_edges = {} if vertex_edges is None else vertex_edges
    edge_tris = {} if edge_tris is None else edge_tris
    out = []
    for b in sorted(base):
        tri = tris[b]
        a0, a1, a2 = tri.corners
        if apex in tri.corners:
            raise PreconditionError(f"apex {apex} is a corner of base triangle {b}")
        edge_of = {frozenset((tri.corners[i], tri.corners[j])): tri.sides[s]
                   for s, (i, j) in enumerate(SIDE_CORNERS)}
        for u in tri.corners:
            if u not in vertex_edges:
                e = alloc.edge()
                edges[e] = (u, apex)
                vertex_edges[u] = e
            edge_of[frozenset((u, apex))] = vertex_edges[u]
        corners = (apex, a0, a1, a2) if base_outward else (apex, a0, a2, a1)
        faces = [b]
        for i in (1, 2, 3):
            u, w = [corners[j] for j in (1, 2, 3) if j != i]
            be = edge_of[frozenset((u, w))]
            if be not in edge_tris:
                f = alloc.tri()
                tris[f] = make_tri(induced_face(corners, i), edge_of)
                edge_tris[be] = f
            faces.append(edge_tris[be])
        k = alloc.tet()
        tets[k] = (corners, tuple(faces))
        out.append((b, k))
    return out


def cone_disk(D: Surface2, apex: int | None = None) -> Complex3:
    """Cone of a triangulated disk; the apex is fresh unless given."""
    if apex is None:
        apex = D.next_ids()[0]
    if apex in D.vertices:
        raise PreconditionError(f"apex {apex} is already a vertex of the disk")
    edges, tris = dict(D.edges), dict(D.tris)
    raw: dict = {}
    _, ne, nt = D.next_ids()
    build_cone(edges, tris, raw, D.tris, apex, IdAlloc(edge=ne, tri=nt))
    C = build_complex(edges, tris, raw)
    if _DEBUG:
        check_complex(C, "cone")
    return C


def cone_cycle(C: CycleGraph, edges: Mapping[int, tuple[int, int]], apex: int | None = None,
               alloc: IdAlloc | None = None) -> Surface2:
    """Fan of triangles from ``apex`` over a cycle (bigons included).

    The triangles traverse the cycle against its direction, so gluing the
    fan to a disk whose boundary runs along the cycle gives a coherent sphere.
    """
    n = len(C.vertices)
    if n < 2 or len(C.edges) != n:
        raise PreconditionError("cycle needs at least two vertices and matching edges")
    if apex is None:
        apex = max(max(C.vertices), *(max(edges[e]) for e in C.edges)) + 1
    if apex in C.vertices:
        raise PreconditionError(f"apex {apex} lies on the cycle")
    if alloc is None:
        alloc = IdAlloc(edge=max(edges) + 1, tri=0)
    spokes = {v: alloc.edge() for v in sorted(set(C.vertices))}
    es = {e: tuple(edges[e]) for e in C.edges}
    es.update({spokes[v]: (v, apex) for v in spokes})
    tris = {}
    for k in range(n):
        u, w, e = C.vertices[k], C.vertices[(k + 1) % n], C.edges[k]
        if frozenset(edges[e]) != frozenset((u, w)):
            raise PreconditionError(f"cycle edge {e} does not join {u} and {w}")
        # (apex, w, u): walks w -> u, against the cycle
        tris[alloc.tri()] = Tri((apex, w, u), (spokes[w], e, spokes[u]))
    return Surface2(set(C.vertices) | {apex}, es, tris, closed=False)


def boundary_surface(C: Complex3) -> Surface2:
    """Triangles in exactly one face slot, oriented as the tetrahedra induce."""
    slots = C.tri_tets()
    tris = {}
    for f in sorted(C.tris):
        occ = slots.get(f, [])
        if len(occ) != 1:
            continue
        k, i = occ[0]
        tri = C.tris[f]
        if not same_cycle(induced_face(C.tets[k].corners, i), tri.corners):
            tri = reversed_tri(tri)
        tris[f] = tri
    S = Surface2.from_tris(C.edges, tris, tris, closed=True)
    rep = validate_surface(S)
    if not rep.ok:
        raise StructuralError("boundary is not a closed coherent surface: " + "; ".join(rep.errors[:5]))
    return S


def split_along_bigon(S: Surface2, e: int, e2: int) -> tuple[Surface2, Surface2]:
    """Cut a sphere along the 2-cycle formed by two parallel edges.

    The first disk is the side holding the smallest triangle on ``e``.
    """
    if e == e2 or e not in S.edges or e2 not in S.edges:
        raise PreconditionError("need two distinct edges of the surface")
    if frozenset(S.edges[e]) != frozenset(S.edges[e2]):
        raise PreconditionError(f"edges {e} and {e2} are not parallel")
    side = _bigon_sides(S.tris, S.edge_tris, {e, e2}, min(S.edge_tris[e]))
    rest = sorted(set(S.tris) - side)
    if not rest:
        raise StructuralError(f"cycle {e},{e2} does not separate the surface")
    D1 = Surface2.from_tris(S.edges, S.tris, sorted(side))
    D2 = Surface2.from_tris(S.edges, S.tris, rest)
    for D in (D1, D2):
        if len(D.vertices) <= 2:
            raise StructuralError("bigon side without inner vertices")
        if _DEBUG:
            check_surface(D, "bigon side")
    return D1, D2


def _bigon_sides(tris: Mapping[int, Tri], edge_tris: Mapping[int, list[int]], cut: set[int],
                 seed: int) -> set[int]:
    seen = {seed}
    todo = [seed]
    while todo:
        t = todo.pop()
        for e in tris[t].sides:
            if e in cut:
                continue
            for n in edge_tris[e]:
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
    return seen


def glue_bigon_shut(D: Surface2) -> Surface2:
    """Identify the two edges of a bigon-bounded disk; the smaller id survives."""
    bd = D.boundary_edges()
    if len(bd) != 2 or frozenset(D.edges[bd[0]]) != frozenset(D.edges[bd[1]]):
        raise PreconditionError("disk boundary is not a bigon")
    keep, drop = bd
    tris = {t: Tri(x.corners, tuple(keep if s == drop else s for s in x.sides))
            for t, x in D.tris.items()}
    edges = {k: v for k, v in D.edges.items() if k != drop}
    S = Surface2(D.vertices, edges, tris, closed=True)
    if _DEBUG:
        check_surface(S, "glued bigon")
    return S


def glue_balls(C1: Complex3, C2: Complex3,
               pairs: list[tuple[int, int, tuple[int, int, int]]]) -> tuple[Complex3, dict[str, dict[int, int]]]:
    """Disjoint union with boundary triangles of C1 and C2 identified.

    Each pair is ``(triangle of C1, triangle of C2, correspondence)`` where
    corner ``k`` of the first triangle goes to corner ``correspondence[k]`` of
    the second.  Cells of C1 keep their ids; cells of C2 keep theirs unless
    identified with a C1 cell or colliding with a C1 id (then they get fresh
    ids).  Returns the glued complex and the C2 -> result id maps.
    """
    bd1 = {f for f, occ in C1.tri_tets().items() if len(occ) == 1}
    bd2 = {f for f, occ in C2.tri_tets().items() if len(occ) == 1}
    dims = ("vertices", "edges", "tris")
    dsu = {d: _DSU() for d in dims}
    for f1, f2, corr in pairs:
        if f1 not in bd1 or f2 not in bd2:
            raise PreconditionError(f"pair ({f1}, {f2}) is not a pair of boundary triangles")
        if sorted(corr) != [0, 1, 2]:
            raise PreconditionError(f"bad corner correspondence {corr}")
        t1, t2 = C1.tris[f1], C2.tris[f2]
        dsu["tris"].union((1, f1), (2, f2))
        for k in range(3):
            dsu["vertices"].union((1, t1.corners[k]), (2, t2.corners[corr[k]]))
        for s, (i, j) in enumerate(SIDE_CORNERS):
            dsu["edges"].union((1, t1.sides[s]), (2, t2.sides[side_index(corr[i], corr[j])]))
    remap: dict[str, dict[int, int]] = {}
    maps1: dict[str, dict[int, int]] = {}
    for d in dims:
        ids1, ids2 = sorted(getattr(C1, d)), sorted(getattr(C2, d))
        members: dict = defaultdict(list)
        for side, ids in ((1, ids1), (2, ids2)):
            for x in ids:
                members[dsu[d].find((side, x))].append((side, x))
        for cls in members.values():
            if sum(1 for s, _ in cls if s == 1) > 1 or sum(1 for s, _ in cls if s == 2) > 1:
                raise PreconditionError(f"gluing identifies two {d} of the same complex: {sorted(cls)}")
        m1 = {x: x for x in ids1}
        m2: dict[int, int] = {}
        taken = set(ids1)
        nxt = max([*ids1, *ids2], default=-1) + 1
        for x in ids2:
            cls = members[dsu[d].find((2, x))]
            partner = [y for s, y in cls if s == 1]
            if partner:
                m2[x] = partner[0]
            elif x not in taken:
                m2[x] = x
                taken.add(x)
            else:
                m2[x] = nxt
                taken.add(nxt)
                nxt += 1
        maps1[d], remap[d] = m1, m2
    vm, em, tm = remap["vertices"], remap["edges"], remap["tris"]
    edges = dict(C1.edges)
    for e, (u, v) in C2.edges.items():
        new = (vm[u], vm[v])
        if em[e] in edges and frozenset(edges[em[e]]) != frozenset(new):
            raise PreconditionError(f"edge {e} glued onto an edge with other endpoints")
        edges.setdefault(em[e], new)
    tris = dict(C1.tris)
    for f, t in C2.tris.items():
        tris.setdefault(tm[f], Tri(tuple(vm[v] for v in t.corners), tuple(em[s] for s in t.sides)))
    raw = {k: (t.corners, t.faces) for k, t in C1.tets.items()}
    tetmap: dict[int, int] = {}
    nxt = max([*C1.tets, *C2.tets], default=-1) + 1
    for k in sorted(C2.tets):
        if k in raw:
            tetmap[k] = nxt
            nxt += 1
        else:
            tetmap[k] = k
        t = C2.tets[k]
        raw[tetmap[k]] = (tuple(vm[v] for v in t.corners), tuple(tm[f] for f in t.faces))
    remap["tets"] = tetmap
    for f1, f2, _ in pairs:
        a, b = tris[f1], C2.tris[f2]
        if frozenset(tris[f1].corners) != frozenset(vm[v] for v in b.corners):
            raise PreconditionError(f"triangles {f1} and {f2} glued inconsistently")
    try:
        C = build_complex(edges, tris, raw)
    except StructuralError as exc:
        raise PreconditionError(f"inconsistent gluing: {exc}") from None
    for k, t in C.tets.items():
        ce = C.tet_edges(k)
        for f, m in zip(t.faces, t.maps):
            for s, (i, j) in enumerate(SIDE_CORNERS):
                if ce[frozenset((m[i], m[j]))] != C.tris[f].sides[s]:
                    raise PreconditionError("induced edge identifications are inconsistent")
    if _DEBUG:
        check_complex(C, "glued balls")
    return C, remap


def edge_fan(e: int, start: int, tris: Mapping[int, Tri], tet_faces: Mapping[int, tuple[int, ...]],
             tri_tets: Mapping[int, list[int]]) -> list[int]:
    """Walk the triangles and tetrahedra around ``e`` starting at triangle ``start``.

    Returns ``[tri, tet, tri, tet, ..., tri]``; stops at a triangle with no
    further tetrahedron (or when it returns to ``start`` for an inner edge).
    """
    out = [start]
    prev_tet = None
    cur = start
    while True:
        nxt = [k for k in tri_tets[cur] if k != prev_tet]
        if not nxt:
            return out
        k = nxt[0]
        other = [f for f in tet_faces[k] if f != cur and e in tris[f].sides]
        if len(other) != 1:
            raise StructuralError(f"tet {k} does not contain edge {e} in exactly two faces")
        out += [k, other[0]]
        prev_tet, cur = k, other[0]
        if cur == start:
            return out


def open_fissure(C: Complex3, e_star: int, t: int) -> tuple[Complex3, tuple[int, int, int, int]]:
    """Double the inner triangle ``t`` and the boundary edge ``e_star`` on it.

    Returns the new complex and ``(e, e2, t1, t2)``: ``e`` (the old id) and the
    fresh ``e2`` are the two parallel copies, ``t1`` (the old id) and fresh
    ``t2`` the two copies of ``t``, each now a free face of one tetrahedron.
    """
    slots = C.tri_tets()
    if t not in C.tris or len(slots.get(t, [])) != 2:
        raise PreconditionError(f"triangle {t} is not an inner triangle")
    if e_star not in C.tris[t].sides:
        raise PreconditionError(f"edge {e_star} is not a side of triangle {t}")
    bd = sorted(f for f, occ in slots.items() if len(occ) == 1 and e_star in C.tris[f].sides)
    if len(bd) != 2:
        raise PreconditionError(f"edge {e_star} is not a boundary edge")
    tri_tets = {f: [k for k, _ in occ] for f, occ in slots.items()}
    fan = edge_fan(e_star, bd[0], C.tris, {k: x.faces for k, x in C.tets.items()}, tri_tets)
    pos = fan.index(t)
    tau2 = fan[pos + 1]
    _, ne, nt, _ = C.next_ids()
    e2, t2 = ne, nt
    edges = dict(C.edges)
    edges[e2] = edges[e_star]
    tris = dict(C.tris)
    for f in fan[pos + 2::2]:
        x = tris[f]
        tris[f] = Tri(x.corners, tuple(e2 if s == e_star else s for s in x.sides))
    x = C.tris[t]
    tris[t2] = Tri(x.corners, tuple(e2 if s == e_star else s for s in x.sides))
    raw = {k: (x.corners, tuple(t2 if (k == tau2 and f == t) else f for f in x.faces))
           for k, x in C.tets.items()}
    # free faces are boundary now: store them with the induced orientation
    for f, k in ((t, fan[pos - 1]), (t2, tau2)):
        corners, faces = raw[k]
        if not same_cycle(induced_face(corners, faces.index(f)), tris[f].corners):
            tris[f] = reversed_tri(tris[f])
    out = build_complex(edges, tris, raw)
    if _DEBUG:
        check_complex(out, "fissured complex")
    return out, (e_star, e2, t, t2)


class CellMap(NamedTuple):
    vertices: dict[int, int]
    edges: dict[int, int]
    tris: dict[int, int]
    tets: dict[int, int]


def isomorphic(X: Surface2 | Complex3, Y: Surface2 | Complex3,
               colors_x: Mapping[int, int] | None = None, colors_y: Mapping[int, int] | None = None,
               *, oriented: bool = False) -> CellMap | None:
    """Find an incidence-preserving bijection of cells, or return None.

    One flag (top cell + corner order) of X is fixed and matched against
    every flag of Y; a breadth-first propagation across shared facets then
    either extends the match to all cells or fails early.  With colorings,
    vertex colors must agree; with ``oriented`` only orientation-preserving
    flags are tried.  Both complexes are assumed connected.
    """
    if isinstance(X, Surface2) != isinstance(Y, Surface2):
        raise PreconditionError("cannot compare complexes of different dimension")
    sizes = lambda Z: (len(Z.vertices), len(Z.edges), len(Z.tris), len(getattr(Z, "tets", ())))
    if sizes(X) != sizes(Y) or (isinstance(X, Surface2) and X.closed != Y.closed):
        return None
    if (colors_x is None) != (colors_y is None):
        raise PreconditionError("supply colorings for both or neither")
    if colors_x is not None:
        from collections import Counter
        if Counter(colors_x[v] for v in X.vertices) != Counter(colors_y[v] for v in Y.vertices):
            return None
    if isinstance(X, Surface2):
        if not X.tris:
            return CellMap({v: w for v, w in zip(sorted(X.vertices), sorted(Y.vertices))}, {}, {}, {})
        return _iso_surface(X, Y, colors_x, colors_y, oriented)
    return _iso_complex(X, Y, colors_x, colors_y, oriented)


def _even(p: tuple[int, ...]) -> bool:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2 == 0


def _iso_surface(X: Surface2, Y: Surface2, cx, cy, oriented: bool) -> CellMap | None:
    xdeg = {v: len(ts) for v, ts in X.vertex_tris.items()}
    ydeg = {v: len(ts) for v, ts in Y.vertex_tris.items()}
    # rarest degree signature in X as the anchor
    sig = lambda deg, tri: tuple(deg[v] for v in tri.corners)
    from collections import Counter
    counts = Counter(tuple(sorted(sig(xdeg, X.tris[t]))) for t in X.tris)
    tx = min(X.tris, key=lambda t: (counts[tuple(sorted(sig(xdeg, X.tris[t])))], t))
    perms = [p for p in permutations(range(3)) if not oriented or _even(p)]
    xs = sig(xdeg, X.tris[tx])
    for ty in sorted(Y.tris):
        ysg = sig(ydeg, Y.tris[ty])
        for p in perms:
            if any(xs[k] != ysg[p[k]] for k in range(3)):
                continue
            m = _grow_surface(X, Y, tx, ty, p, cx, cy)
            if m is not None:
                return m
    return None


def _grow_surface(X: Surface2, Y: Surface2, tx: int, ty: int, p, cx, cy) -> CellMap | None:
    vm: dict[int, int] = {}
    em: dict[int, int] = {}
    tm: dict[int, int] = {}
    vinv: dict[int, int] = {}
    einv: dict[int, int] = {}
    tinv: dict[int, int] = {}

    def bind(m, inv, a, b) -> bool:
        if a in m:
            return m[a] == b
        if b in inv:
            return False
        m[a] = b
        inv[b] = a
        return True

    todo = deque([(tx, ty, p)])
    while todo:
        a, b, p = todo.popleft()
        if a in tm:
            if tm[a] != b:
                return None
            continue
        if not bind(tm, tinv, a, b):
            return None
        A, B = X.tris[a], Y.tris[b]
        for k in range(3):
            u, w = A.corners[k], B.corners[p[k]]
            if cx is not None and cx[u] != cy[w]:
                return None
            if not bind(vm, vinv, u, w):
                return None
        for s, (i, j) in enumerate(SIDE_CORNERS):
            ea, eb = A.sides[s], B.sides[side_index(p[i], p[j])]
            if not bind(em, einv, ea, eb):
                return None
            na = [t for t in X.edge_tris[ea] if t != a]
            nb = [t for t in Y.edge_tris[eb] if t != b]
            if len(na) != len(nb):
                return None
            if not na:
                continue
            NA, NB = X.tris[na[0]], Y.tris[nb[0]]
            if na[0] in tm:
                if tm[na[0]] != nb[0]:
                    return None
                continue
            q = []
            for v in NA.corners:
                if v in vm:
                    if vm[v] not in NB.corners:
                        return None
                    q.append(NB.corners.index(vm[v]))
                else:
                    q.append(None)
            missing = [k for k in range(3) if q[k] is None]
            if len(missing) > 1:
                return None
            if missing:
                q[missing[0]] = ({0, 1, 2} - set(x for x in q if x is not None)).pop()
            if sorted(q) != [0, 1, 2]:
                return None
            todo.append((na[0], nb[0], tuple(q)))
    if len(tm) != len(X.tris) or len(vm) != len(X.vertices) or len(em) != len(X.edges):
        return None
    return CellMap(vm, em, tm, {})


def _iso_complex(X: Complex3, Y: Complex3, cx, cy, oriented: bool) -> CellMap | None:
    if not X.tets:
        return None if Y.tets else CellMap({}, {}, {}, {})
    xs, ys = X.tri_tets(), Y.tri_tets()
    tx = min(X.tets)
    perms = [p for p in permutations(range(4)) if not oriented or _even(p)]
    for ty in sorted(Y.tets):
        for p in perms:
            m = _grow_complex(X, Y, xs, ys, tx, ty, p, cx, cy)
            if m is not None:
                return m
    return None


def _grow_complex(X: Complex3, Y: Complex3, xs, ys, tx, ty, p, cx, cy) -> CellMap | None:
    maps: list[dict[int, int]] = [{}, {}, {}, {}]
    invs: list[dict[int, int]] = [{}, {}, {}, {}]

    def bind(d, a, b) -> bool:
        m, inv = maps[d], invs[d]
        if a in m:
            return m[a] == b
        if b in inv:
            return False
        m[a] = b
        inv[b] = a
        return True

    todo = deque([(tx, ty, p)])
    while todo:
        a, b, p = todo.popleft()
        if a in maps[3]:
            if maps[3][a] != b:
                return None
            continue
        if not bind(3, a, b):
            return None
        A, B = X.tets[a], Y.tets[b]
        for k in range(4):
            if cx is not None and cx[A.corners[k]] != cy[B.corners[p[k]]]:
                return None
            if not bind(0, A.corners[k], B.corners[p[k]]):
                return None
        ea, eb = X.tet_edges(a), Y.tet_edges(b)
        for key, e in ea.items():
            i, j = tuple(key)
            if not bind(1, e, eb[frozenset((p[i], p[j]))]):
                return None
        for i in range(4):
            fa, fb = A.faces[i], B.faces[p[i]]
            if not bind(2, fa, fb):
                return None
            na = [k for k, _ in xs[fa] if k != a]
            nb = [k for k, _ in ys[fb] if k != b]
            if len(na) != len(nb):
                return None
            if not na or na[0] in maps[3]:
                if na and maps[3][na[0]] != nb[0]:
                    return None
                continue
            NA, NB = X.tets[na[0]], Y.tets[nb[0]]
            q = []
            for v in NA.corners:
                w = maps[0].get(v)
                q.append(NB.corners.index(w) if w is not None and w in NB.corners else None)
            missing = [k for k in range(4) if q[k] is None]
            if len(missing) > 1:
                return None
            if missing:
                q[missing[0]] = ({0, 1, 2, 3} - set(x for x in q if x is not None)).pop()
            if sorted(q) != [0, 1, 2, 3]:
                return None
            todo.append((na[0], nb[0], tuple(q)))
    if [len(m) for m in maps] != [len(X.vertices), len(X.edges), len(X.tris), len(X.tets)]:
        return None
    return CellMap(*maps)


def deep_call(fn, *args, **kwargs):
    """Run ``fn`` in a thread with a large stack and recursion limit.

    The constructions recurse once per surgery and the traces nest once per
    removed vertex, which exceeds the default limits on large inputs.
    """
    import sys
    import threading

    result: list = []
    error: list = []

    def target() -> None:
        try:
            result.append(fn(*args, **kwargs))
        except BaseException as exc:  # re-raised in the caller's thread
            error.append(exc)

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, 200_000))
    threading.stack_size(512 * 1024 * 1024)
    try:
        th = threading.Thread(target=target)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if error:
        raise error[0]
    return result[0]
