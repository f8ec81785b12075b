"""Attachment orders of the tetrahedra of a constructed ball, and the moves
they realize on the evolving boundary.

``attachment_order`` follows the construction trace: each trace node owns a
contiguous range of tetrahedron ids, cones are ordered by shelling their
base disk, and sub-balls are spliced in at the tetrahedron next to the
triangle along which they were glued.  Every prefix of the order meets the
next tetrahedron in one face (the new corner is a fresh vertex) or in two
faces (the edge opposite to both is fresh), so each prefix is a ball.

Adding a tetrahedron along one face subdivides that boundary triangle;
adding it along two faces flips their common edge.  ``moves_from_order``
records exactly these moves.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .ball_extend import (ConeOfDeletion, DoubleCone, ExtensionResult, GraftInner, GraftSurface,
                          RemoveFillRecurse, Trace)
from .core import Complex3, PreconditionError, StructuralError, Surface2, Tri, deep_call
from .disk_fill import shell_disk2
from .moves import BASE_PAIRS, MoveSequence, WorkingSphere

DEFAULT_SHELL_BOUND = 10
_SEED = -1


@dataclass
class AttachmentOrder:
    order: list[int]
    start: int

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)


def _children(n: Trace) -> tuple:
    if isinstance(n, RemoveFillRecurse):
        return (n.inner,)
    if isinstance(n, (GraftInner, GraftSurface)):
        return (n.b1, n.b2)
    return ()


def _own_tets(n: Trace) -> list[int]:
    if isinstance(n, (ConeOfDeletion, RemoveFillRecurse)):
        return [k for _, k in n.cone]
    if isinstance(n, DoubleCone):
        return [k for _, k in n.cone1 + n.cone2]
    return []


class _Sequencer:
    def __init__(self, ball: Complex3, trace: Trace):
        self.ball = ball
        self.ranges: dict[int, tuple[int, int]] = {}
        self.faces = {k: list(T.faces) for k, T in ball.tets.items()}
        # post-order walk: tet ranges per node, and undo the triangle split of each graft
        stack = [(trace, False)]
        while stack:
            n, done = stack.pop()
            if not done:
                stack.append((n, True))
                stack += [(c, False) for c in _children(n)]
                continue
            ids = _own_tets(n) + [x for c in _children(n) for x in self.ranges[id(c)]]
            if not ids:
                raise StructuralError(f"trace node {type(n).__name__} owns no tetrahedra")
            self.ranges[id(n)] = (min(ids), max(ids))
        # faces as they were when each cone was built: undo the triangle split
        # of every graft, enclosing grafts first
        stack = [trace]
        while stack:
            n = stack.pop()
            if isinstance(n, GraftInner):
                for tau, half in ((n.tau1, n.t1), (n.tau2, n.t2)):
                    fs = self.faces.get(tau)
                    if fs is None or half not in fs:
                        raise StructuralError(f"trace names tet {tau} with face {half}, not in the ball")
                    fs[fs.index(half)] = n.t
            stack += reversed(_children(n))
        lo, hi = self.ranges[id(trace)]
        if (lo, hi) != (min(ball.tets), max(ball.tets)) or hi - lo + 1 != len(ball.tets):
            raise StructuralError("trace does not cover the tetrahedra of the ball")
        self.face_tets: dict[int, list[int]] = defaultdict(list)
        for k in sorted(self.faces):
            for f in self.faces[k]:
                self.face_tets[f].append(k)
        self.out: list[int] = []
        self.hooks: dict[int, list] = defaultdict(list)

    def inside(self, n: Trace, k: int) -> bool:
        lo, hi = self.ranges[id(n)]
        return lo <= k <= hi

    def push(self, k: int) -> None:
        self.out.append(k)
        for fire in self.hooks.pop(k, ()):
            fire(k)

    def pseudo_tri(self, k: int) -> Tri:
        """The base triangle of cone tet ``k`` with its side faces standing in for edges."""
        c = self.ball.tets[k].corners
        f = self.faces[k]
        return Tri((c[1], c[2], c[3]), (f[3], f[1], f[2]))

    def cone_shell(self, tets: Sequence[int], start: int, seed: Tri | None = None) -> list[int]:
        tris = {k: self.pseudo_tri(k) for k in tets}
        if seed is not None:
            tris[_SEED] = seed
        edges = {}
        for tri in tris.values():
            a, b, c = tri.corners
            edges.update(zip(tri.sides, ((a, b), (b, c), (a, c))))
        D = Surface2({v for x in tris.values() for v in x.corners}, edges, tris, closed=False)
        return [k for k in shell_disk2(D, start) if k != _SEED]

    def other_on(self, face: int, k: int, n: Trace) -> int:
        ks = [x for x in self.face_tets[face] if x != k and self.inside(n, x)]
        if not ks:
            raise StructuralError(f"no tetrahedron of the sub-ball behind face {face}")
        return min(ks)

    def emit(self, n: Trace, start: int) -> None:
        if isinstance(n, ConeOfDeletion):
            for k in self.cone_shell([k for _, k in n.cone], start):
                self.push(k)
        elif isinstance(n, RemoveFillRecurse):
            cone = [k for _, k in n.cone]
            if self.inside(n.inner, start):
                self.emit(n.inner, start)
                for k in self.cone_shell(cone, min(cone)):
                    self.push(k)
            else:
                order = self.cone_shell(cone, start)
                self.push(start)
                self.emit(n.inner, self.other_on(self.faces[start][0], start, n.inner))
                for k in order[1:]:
                    self.push(k)
        elif isinstance(n, GraftInner):
            if self.inside(n.b2, start):
                self.emit(n.b2, start)
                self.emit(n.b1, min(n.tau1, n.tau2))
            else:
                fired = []

                def fire(k: int) -> None:
                    if not fired:
                        fired.append(k)
                        other = n.tau2 if k == n.tau1 else n.tau1
                        rest = [h for h in self.hooks.get(other, ()) if h is not fire]
                        if rest:
                            self.hooks[other] = rest
                        else:
                            self.hooks.pop(other, None)
                        self.emit(n.b2, n.sigma1 if k == n.tau1 else n.sigma2)

                self.hooks[n.tau1].append(fire)
                self.hooks[n.tau2].append(fire)
                self.emit(n.b1, start)
                if not fired:
                    raise StructuralError("graft splice point never reached")
        elif isinstance(n, GraftSurface):
            if self.inside(n.b1, start):
                self.emit(n.b1, start)
                self.emit(n.b2, n.rho2)
            else:
                self.emit(n.b2, start)
                self.emit(n.b1, n.rho1)
        elif isinstance(n, DoubleCone):
            cone1 = [k for _, k in n.cone1]
            cone2 = [k for _, k in n.cone2]
            if start in cone1:
                first, second, glued, apex = cone1, cone2, n.t2, n.apex1
            else:
                first, second, glued, apex = cone2, cone1, n.t1, n.apex2
            for k in self.cone_shell(first, start):
                self.push(k)
            for k in self.cone_shell(second, _SEED, self._seed(n, glued, apex)):
                self.push(k)
        else:
            raise StructuralError(f"unknown trace node {n!r}")

    def _seed(self, n: DoubleCone, glued: int, apex: int) -> Tri:
        """Stand-in for the triangle ``glued`` (already covered by the first cone)
        in the base disk of the second cone."""
        # glue_i joins the two apexes to the end vi of the bigon edge
        k = next(k for _, k in n.cone2 if n.glue_i in self.faces[k])
        T = self.ball.tets[k]
        vi = next(v for s, v in enumerate(T.corners)
                  if v not in (n.apex1, n.apex2) and self.faces[k][s] != n.glue_i)
        k = next(k for _, k in n.cone2 if n.glue_j in self.faces[k])
        T = self.ball.tets[k]
        vj = next(v for s, v in enumerate(T.corners)
                  if v not in (n.apex1, n.apex2) and self.faces[k][s] != n.glue_j)
        return Tri((vi, vj, apex), (-2, n.glue_j, n.glue_i))


def attachment_order(res: ExtensionResult, start: int) -> AttachmentOrder:
    """Order of all tetrahedra, beginning at ``start``, whose prefixes are balls."""
    ball = res.ball
    if start not in ball.tets:
        raise PreconditionError(f"tetrahedron {start} is not in the ball")
    seq = _Sequencer(ball, res.trace)
    deep_call(seq.emit, res.trace, start)
    if seq.hooks:
        raise StructuralError("unused splice points left after sequencing")
    if len(seq.out) != len(ball.tets) or len(set(seq.out)) != len(seq.out):
        raise StructuralError("sequencer did not visit every tetrahedron exactly once")
    return AttachmentOrder(seq.out, start)


def step_shares(ball: Complex3, k: int, count: Mapping[int, int], verts: set[int],
                edges: set[int]) -> list[int] | None:
    """Face slots of tet ``k`` shared with the prefix if attaching it keeps a ball, else None."""
    T = ball.tets[k]
    shared = [i for i, f in enumerate(T.faces) if count.get(f, 0)]
    if any(count[T.faces[i]] != 1 for i in shared):
        return None
    if len(shared) == 1:
        return shared if T.corners[shared[0]] not in verts else None
    if len(shared) == 2:
        i, j = shared
        return shared if ball.tet_edges(k)[frozenset((i, j))] not in edges else None
    return None


def _add(ball: Complex3, k: int, count: dict[int, int], verts: set[int], edges: set[int]) -> None:
    T = ball.tets[k]
    for f in T.faces:
        count[f] = count.get(f, 0) + 1
    verts.update(T.corners)
    edges.update(ball.tet_edges(k).values())


def moves_from_order(ball: Complex3, colors: Mapping[int, int], order: AttachmentOrder | Sequence[int]) -> MoveSequence:
    """Moves on the boundary realized by attaching the tetrahedra in ``order``.

    The base is the first tetrahedron with its own vertex ids; vertices added
    later are numbered by the replay allocator, not by their ids in the ball.
    """
    order = list(order)
    if not order:
        raise PreconditionError("empty order")
    T0 = ball.tets[order[0]]
    base = tuple((v, colors[v]) for v in T0.corners)
    W = WorkingSphere.base(base)
    seq = MoveSequence(base)
    # ball cell -> replay cell, for cells on the current boundary
    inv = {v: v for v in T0.corners}
    tmap = {f: i for i, f in enumerate(T0.faces)}
    e0 = ball.tet_edges(order[0])
    emap = {e0[frozenset(p)]: k for k, p in enumerate(BASE_PAIRS)}
    count: dict[int, int] = {}
    verts: set[int] = set()
    edges: set[int] = set()
    _add(ball, order[0], count, verts, edges)
    for step, k in enumerate(order[1:], 1):
        T = ball.tets[k]
        shared = step_shares(ball, k, count, verts, edges)
        if shared is None:
            raise StructuralError(f"step {step}: tet {k} does not attach along 1 or 2 boundary faces")
        te = ball.tet_edges(k)
        slot_of = {v: s for s, v in enumerate(T.corners)}
        if len(shared) == 1:
            (i,) = shared
            w = T.corners[i]
            r = tmap.pop(T.faces[i])
            A, B, C = (inv[x] for x in W.tris[r].corners)
            m = W.subdivide(r)
            if m.color != colors[w]:
                raise StructuralError(f"step {step}: forced color {m.color} but vertex {w} has color {colors[w]}")
            inv[m.new_vertex] = w
            for u, new_e in zip((A, B, C), m.new_edges):
                emap[te[frozenset((i, slot_of[u]))]] = new_e
            # new triangles (A,B,x), (B,C,x), (C,A,x) omit C, A, B
            for u, new_t in zip((C, A, B), m.new_tris):
                tmap[T.faces[slot_of[u]]] = new_t
        else:
            i, j = shared
            common = te[frozenset(range(4)) - {i, j}]
            t_lo, (_, rb, _), t_hi, _ = W.flip_data(emap[common])
            m = W.flip(emap.pop(common))
            emap[te[frozenset((i, j))]] = m.new_edge
            del tmap[T.faces[i]], tmap[T.faces[j]]
            # the flipped triangle without corner b keeps the smaller id
            for s in range(4):
                if s not in (i, j):
                    tmap[T.faces[s]] = t_lo if T.corners[s] == inv[rb] else t_hi
        seq.moves.append(m)
        _add(ball, k, count, verts, edges)
    return seq


def exhaustive_shelling(ball: Complex3, start: int, bound: int = DEFAULT_SHELL_BOUND) -> AttachmentOrder | None:
    """Depth-first search over all attachment orders from ``start``.

    Candidates are tried in increasing id order, so the order returned is the
    lexicographically first one.  None if no order exists.
    """
    if start not in ball.tets:
        raise PreconditionError(f"tetrahedron {start} is not in the ball")
    if len(ball.tets) > bound:
        raise PreconditionError(f"{len(ball.tets)} tetrahedra exceed the search bound {bound}")
    ids = sorted(ball.tets)
    order = [start]

    def rec(count, verts, edges) -> bool:
        if len(order) == len(ids):
            return True
        for k in ids:
            if k in order or step_shares(ball, k, count, verts, edges) is None:
                continue
            c2, v2, e2 = dict(count), set(verts), set(edges)
            _add(ball, k, c2, v2, e2)
            order.append(k)
            if rec(c2, v2, e2):
                return True
            order.pop()
        return False

    count: dict[int, int] = {}
    verts: set[int] = set()
    edges: set[int] = set()
    _add(ball, start, count, verts, edges)
    return AttachmentOrder(order, start) if rec(count, verts, edges) else None
