"""Independent checks of extensions and move sequences.

Nothing here reuses the construction code: the prefix-ball test and the move
replay are written out again on plain dictionaries, and only the validators
and isomorphism test of ``core`` are shared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (SIDE_CORNERS, Complex3, Surface2, Tri, TriangulationError, euler_characteristic,
                   isomorphic, reversed_tri, side_walks, validate_complex, validate_surface)

LEVEL_TRACE = "prefix-ball order from trace"
LEVEL_SEARCH = "prefix-ball order from exhaustive search"
LEVEL_MANIFOLD = "manifold checks only"


@dataclass
class Finding:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class Certificate:
    findings: list[Finding] = field(default_factory=list)
    level: str = ""

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.findings)

    def __bool__(self) -> bool:
        return self.ok

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.findings.append(Finding(name, bool(ok), detail))
        return bool(ok)

    def failed(self) -> list[Finding]:
        return [f for f in self.findings if not f.ok]

    def render(self) -> str:
        lines = [f"verdict: {'pass' if self.ok else 'FAIL'}"]
        if self.level:
            lines.append(f"level: {self.level}")
        for f in self.findings:
            lines.append(f"  [{'ok' if f.ok else 'FAIL'}] {f.name}" + (f": {f.detail}" if f.detail else ""))
        return "\n".join(lines)


def _tet_edge_ids(C: Complex3, k: int) -> dict[frozenset, int]:
    T = C.tets[k]
    out = {}
    for f, m in zip(T.faces, T.maps):
        sides = C.tris[f].sides
        for s, (i, j) in enumerate(SIDE_CORNERS):
            out[frozenset((T.corners[m[i]], T.corners[m[j]]))] = sides[s]
    return out


def check_prefix_order(C: Complex3, order: Sequence[int]) -> tuple[bool, str]:
    """Every tetrahedron after the first meets the union of the earlier ones in
    one boundary face whose opposite corner is new, or in two boundary faces
    whose opposite edge is new."""
    if sorted(order) != sorted(C.tets) or len(set(order)) != len(order):
        return False, "order is not a permutation of the tetrahedra"
    count: dict[int, int] = {}
    verts: set[int] = set()
    edges: set[int] = set()
    for step, k in enumerate(order):
        T = C.tets[k]
        te = _tet_edge_ids(C, k)
        if step:
            shared = [i for i, f in enumerate(T.faces) if f in count]
            if any(count[T.faces[i]] != 1 for i in shared):
                return False, f"step {step}: tet {k} meets an interior face"
            if len(shared) == 1:
                if T.corners[shared[0]] in verts:
                    return False, f"step {step}: tet {k} glued along one face but its apex is old"
            elif len(shared) == 2:
                u, w = (T.corners[i] for i in shared)
                if te[frozenset((u, w))] in edges:
                    return False, f"step {step}: tet {k} glued along two faces but their opposite edge is old"
            else:
                return False, f"step {step}: tet {k} meets the prefix in {len(shared)} faces"
        for f in T.faces:
            count[f] = count.get(f, 0) + 1
        verts.update(T.corners)
        edges.update(te.values())
    return True, ""


def _boundary(C: Complex3) -> dict[int, Tri]:
    count: dict[int, list[tuple[int, int]]] = {}
    for k, T in C.tets.items():
        for i, f in enumerate(T.faces):
            count.setdefault(f, []).append((k, i))
    out = {}
    for f, uses in count.items():
        if len(uses) != 1:
            continue
        k, i = uses[0]
        T = C.tets[k]
        rest = [T.corners[j] for j in range(4) if j != i]
        if i % 2:
            rest.reverse()
        tri = C.tris[f]
        # stored orientation vs the one the tetrahedron induces
        idx = tri.corners.index(rest[0])
        rot = tri.corners[idx:] + tri.corners[:idx]
        out[f] = tri if tuple(rot) == tuple(rest) else reversed_tri(tri)
    return out


def verify_extension(S: Surface2, colors: Mapping[int, int], res, *, trace_starts: int = 1,
                     search_bound: int = 10) -> Certificate:
    """Certificate that ``res.ball`` is a colored ball with boundary ``S``.

    ``res`` needs ``.ball`` and ``.trace`` (which may be None).
    """
    cert = Certificate()
    C: Complex3 = res.ball
    rep = validate_complex(C)
    cert.add("ball validates", rep.ok, "; ".join(rep.errors[:3]))

    bd = _boundary(C)
    same = set(bd) == set(S.tris) and all(bd[t] == S.tris[t] for t in S.tris)
    flipped = (not same and set(bd) == set(S.tris)
               and all(reversed_tri(bd[t]) == S.tris[t] for t in S.tris))
    edges_ok = all(C.edges.get(e) == S.edges[e] for e in S.edges)
    detail = "" if same else ("orientation reversed" if flipped else
                              f"{len(set(bd) ^ set(S.tris))} triangles differ")
    cert.add("boundary equals input (identity labels)", (same or flipped) and edges_ok, detail)

    vdiff = set(C.vertices) ^ set(S.vertices)
    cert.add("vertex sets equal", not vdiff, f"{len(vdiff)} vertices differ" if vdiff else "")

    missing = [v for v in C.vertices if v not in colors]
    proper = not missing and all(colors[u] != colors[v] for u, v in C.edges.values())
    rainbow = not missing and all(len({colors[v] for v in T.corners}) == 4 for T in C.tets.values())
    cert.add("coloring proper, every tet rainbow", proper and rainbow,
             f"{len(missing)} uncolored" if missing else "")

    chi = euler_characteristic(C)
    cert.add("euler characteristic 1", chi == 1, f"chi={chi}")

    bd_verts = {v for t in bd.values() for v in t.corners}
    inner = set(C.vertices) - bd_verts
    cert.add("no interior vertices", not inner, f"{len(inner)} interior" if inner else "")

    trace = getattr(res, "trace", None)
    if trace is not None:
        from .sequencer import attachment_order
        starts = sorted(C.tets)[:max(1, trace_starts)]
        for s in starts:
            try:
                order = attachment_order(res, s).order
            except TriangulationError as exc:
                cert.add(f"prefix-ball order from tet {s}", False, str(exc))
                continue
            ok, why = check_prefix_order(C, order)
            cert.add(f"prefix-ball order from tet {s}", ok, why)
        cert.level = LEVEL_TRACE
    elif len(C.tets) <= search_bound and C.tets:
        from .sequencer import exhaustive_shelling
        found = exhaustive_shelling(C, min(C.tets), bound=search_bound)
        ok, why = check_prefix_order(C, found.order) if found else (False, "no order exists")
        cert.add("prefix-ball order by search", ok, why)
        cert.level = LEVEL_SEARCH
    else:
        cert.level = LEVEL_MANIFOLD
    return cert


class _Replay:
    """Minimal sphere with the move conventions, kept apart from ``moves``."""

    def __init__(self, base):
        vs = [v for v, _ in base]
        self.colors = {v: c for v, c in base}
        pairs = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
        self.edges = {k: (vs[i], vs[j]) for k, (i, j) in enumerate(pairs)}
        eid = {frozenset((vs[i], vs[j])): k for k, (i, j) in enumerate(pairs)}
        self.tris = {}
        for i in range(4):
            rest = [vs[j] for j in range(4) if j != i]
            if i % 2:
                rest.reverse()
            a, b, c = rest
            self.tris[i] = Tri((a, b, c), (eid[frozenset((a, b))], eid[frozenset((b, c))], eid[frozenset((a, c))]))
        self.nv, self.ne, self.nt = max(vs) + 1, 6, 4

    def surface(self) -> Surface2:
        return Surface2(set(self.colors), self.edges, self.tris, closed=True)

    def tris_on(self, e: int) -> list[int]:
        return sorted(t for t, x in self.tris.items() if e in x.sides)

    def flip(self, e: int, new: int) -> str:
        ts = self.tris_on(e)
        if len(ts) != 2:
            return f"edge {e} is not on two triangles"
        t, h = ts
        T, H = self.tris[t], self.tris[h]
        wt, wh = dict(zip(side_walks(T), T.sides)), dict(zip(side_walks(H), H.sides))
        a, b = next(w for w, s in wt.items() if s == e)
        c = next(x for x in T.corners if x not in (a, b))
        d = next(x for x in H.corners if x not in (a, b))
        if (b, a) not in wh:
            return f"triangles on edge {e} are not coherently oriented"
        if self.colors[c] == self.colors[d]:
            return f"flip of {e}: opposite corners {c},{d} share color {self.colors[c]}"
        if new != self.ne:
            return f"new edge should be {self.ne}, got {new}"
        self.ne += 1
        del self.edges[e]
        self.edges[new] = (c, d)
        self.tris[t] = Tri((c, a, d), (wt[(c, a)], wh[(a, d)], new))
        self.tris[h] = Tri((d, b, c), (wh[(d, b)], wt[(b, c)], new))
        return ""

    def subdivide(self, t: int, x: int, color: int, kids, spokes) -> str:
        if t not in self.tris:
            return f"no triangle {t}"
        T = self.tris[t]
        cs = [self.colors[v] for v in T.corners]
        if len(set(cs)) != 3 or color != 6 - sum(cs) or color in cs:
            return f"subdivision color {color} is not the missing color of {cs}"
        if (x, tuple(kids), tuple(spokes)) != (self.nv, (self.nt, self.nt + 1, self.nt + 2),
                                               (self.ne, self.ne + 1, self.ne + 2)):
            return "recorded ids are not the next fresh ids"
        a, b, c = T.corners
        w = dict(zip(side_walks(T), T.sides))
        xa, xb, xc = spokes
        self.colors[x] = color
        self.edges.update({xa: (a, x), xb: (b, x), xc: (c, x)})
        del self.tris[t]
        self.tris[kids[0]] = Tri((a, b, x), (w[(a, b)], xb, xa))
        self.tris[kids[1]] = Tri((b, c, x), (w[(b, c)], xc, xb))
        self.tris[kids[2]] = Tri((c, a, x), (w[(c, a)], xa, xc))
        self.nv, self.ne, self.nt = x + 1, self.ne + 3, self.nt + 3
        sign = _sign(T, self.colors)
        if any(_sign(self.tris[k], self.colors) == sign for k in kids):
            return "a child triangle keeps the parent's sign"
        return ""


def _sign(tri: Tri, colors: Mapping[int, int]) -> int:
    seq = [colors[u] ^ colors[v] for u, v in side_walks(tri)]
    return 1 if seq in ([1, 2, 3], [2, 3, 1], [3, 1, 2]) else -1


def verify_move_sequence(S: Surface2, colors: Mapping[int, int], seq, *,
                         revalidate_every: int = 1) -> Certificate:
    """Replay ``seq`` with checks after every move and compare the result with (S, colors).

    The full surface validation runs every ``revalidate_every`` moves and at the end.
    """
    cert = Certificate()
    base = list(seq.base)
    if len(base) != 4 or len({v for v, _ in base}) != 4 or sorted(c for _, c in base) != [0, 1, 2, 3]:
        cert.add("base tetrahedron", False, f"base {base} is not four vertices of four colors")
        return cert
    R = _Replay(base)
    cert.add("base tetrahedron", True)
    for step, m in enumerate(seq.moves):
        if hasattr(m, "new_edge"):
            why = R.flip(m.edge, m.new_edge)
        else:
            why = R.subdivide(m.tri, m.new_vertex, m.color, m.new_tris, m.new_edges)
        if why:
            cert.add(f"move {step}", False, why)
            return cert
        last = step == len(seq.moves) - 1
        if revalidate_every and (step % revalidate_every == 0 or last):
            rep = validate_surface(R.surface())
            if not rep.ok:
                cert.add(f"move {step}", False, "; ".join(rep.errors[:3]))
                return cert
    cert.add(f"{len(seq.moves)} moves replayed", True)
    final = R.surface()
    cert.add("coloring strict", len(set(R.colors.values())) == 4)
    cert.add("result isomorphic to input", isomorphic(final, S, R.colors, colors) is not None)
    return cert
