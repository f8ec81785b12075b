import pytest

from ballext.core import (CycleGraph, PreconditionError, StructuralError, Surface2, Tri,
                          boundary_surface, build_complex, cone_cycle, cone_disk, euler_characteristic,
                          glue_bigon_shut, isomorphic, split_along_bigon, star_and_deletion,
                          validate_complex, validate_surface, vertex_link)
from ballext.moves import generate_random

from conftest import bipyramid, flipped_tetrahedron, octahedron, tetrahedron


def single_tet():
    S, colors = tetrahedron()
    return cone_disk(Surface2.from_tris(S.edges, S.tris, [0]), apex=0), colors


def test_tetrahedron_valid():
    S, _ = tetrahedron()
    rep = validate_surface(S)
    assert rep.ok and not rep.parallel_edges
    assert (len(S.vertices), len(S.edges), len(S.tris)) == (4, 6, 4)


def test_missing_glue_invalid():
    S, _ = tetrahedron()
    del S.tris[3]
    S = Surface2(S.vertices, S.edges, S.tris, closed=True)
    rep = validate_surface(S)
    assert not rep.ok
    assert any("one triangle" in e for e in rep.errors)


def test_flipped_tetrahedron_parallel():
    S, _ = flipped_tetrahedron()
    rep = validate_surface(S)
    assert rep.ok
    assert rep.parallel_edges == [(5, 6)]
    assert set(S.edges[5]) == {2, 3}
    assert euler_characteristic(S) == 2


def test_euler():
    S, _ = tetrahedron()
    assert euler_characteristic(S) == 2
    C, _ = single_tet()
    assert euler_characteristic(C) == 1
    assert validate_complex(C).ok


def test_vertex_link_tetrahedron():
    S, _ = tetrahedron()
    for v in S.vertices:
        L = vertex_link(S, v)
        assert len(L.vertices) == 3 and set(L.vertices) == S.vertices - {v}


def test_vertex_link_bipyramid_apex():
    S, _ = bipyramid()
    assert set(vertex_link(S, 4).vertices) == {1, 2, 3}
    assert set(vertex_link(S, 0).vertices) == {1, 2, 3}


def test_vertex_link_flipped_endpoint():
    S, _ = flipped_tetrahedron()
    # vertex 0 lost its edge to 1: its link is a 3-cycle through 2, 3 and one of the parallel copies
    L = vertex_link(S, 1)
    assert len(L.vertices) == 2 or len(L.vertices) == 3
    assert len(L.edges) == len(L.vertices)


def test_star_and_deletion():
    S, _ = tetrahedron()
    st, dl = star_and_deletion(S, 0)
    assert len(st.tris) == 3 and len(dl.tris) == 1
    assert 0 not in dl.vertices
    B, _ = bipyramid()
    st, dl = star_and_deletion(B, 4)
    assert len(st.tris) == 3 and len(dl.tris) == 3
    O, _ = octahedron()
    for v in O.vertices:
        st, dl = star_and_deletion(O, v)
        assert len(st.tris) == len(dl.tris) == 4
        assert euler_characteristic(st) == euler_characteristic(dl) == 1


def test_star_and_deletion_rejects_parallel():
    S, _ = flipped_tetrahedron()
    with pytest.raises(PreconditionError):
        star_and_deletion(S, 0)


def test_cone_disk():
    C, _ = single_tet()
    assert len(C.tets) == 1
    B, _ = bipyramid()
    st, dl = star_and_deletion(B, 4)
    cone = cone_disk(dl, apex=4)
    assert len(cone.tets) == 3
    assert validate_complex(cone).ok
    assert isomorphic(boundary_surface(cone), B) is not None


def test_cone_disk_square():
    S, _ = tetrahedron()
    sq = Surface2.from_tris(S.edges, S.tris, [0, 1])
    C = cone_disk(sq)
    assert len(C.tets) == 2
    inner = [t for t, ts in C.tri_tets().items() if len(ts) == 2]
    assert len(inner) == 1


def test_cone_cycle():
    edges = {0: (0, 1), 1: (1, 2), 2: (2, 0)}
    D = cone_cycle(CycleGraph((0, 1, 2), (0, 1, 2)), edges, apex=9)
    assert len(D.tris) == 3 and validate_surface(D).ok
    edges5 = {k: (k, (k + 1) % 5) for k in range(5)}
    D5 = cone_cycle(CycleGraph(tuple(range(5)), tuple(range(5))), edges5, apex=9)
    assert len(D5.tris) == 5 and euler_characteristic(D5) == 1


def test_cone_cycle_bigon():
    edges = {0: (0, 1), 1: (0, 1)}
    D = cone_cycle(CycleGraph((0, 1), (0, 1)), edges, apex=2)
    assert len(D.tris) == 2
    assert {e for t in D.tris.values() for e in t.sides} >= {0, 1}
    assert validate_surface(D).ok
    P = glue_bigon_shut(D)
    assert validate_surface(P).ok and len(P.tris) == 2 and euler_characteristic(P) == 2


def test_split_along_bigon():
    S, _ = flipped_tetrahedron()
    D1, D2 = split_along_bigon(S, 5, 6)
    assert len(D1.tris) == len(D2.tris) == 2
    inner = sorted(D1.vertices - {2, 3}) + sorted(D2.vertices - {2, 3})
    assert sorted(inner) == [0, 1]
    for D in (D1, D2):
        assert validate_surface(D).ok and euler_characteristic(D) == 1
        P = glue_bigon_shut(D)
        assert validate_surface(P).ok and euler_characteristic(P) == 2
        assert len(P.vertices) == 3


def test_split_requires_parallel():
    S, _ = tetrahedron()
    with pytest.raises(PreconditionError):
        split_along_bigon(S, 0, 1)


def test_split_generated():
    for seed in range(200):
        S, _, _ = generate_random(20, seed)
        if S.parallel_classes():
            e, e2 = S.parallel_classes()[0][:2]
            D1, D2 = split_along_bigon(S, e, e2)
            assert len(D1.tris) + len(D2.tris) == len(S.tris)
            return
    pytest.fail("no generated sphere with a parallel pair")


def test_glue_bigon_shut_rejects_triangle_boundary():
    S, _ = tetrahedron()
    with pytest.raises(PreconditionError):
        glue_bigon_shut(Surface2.from_tris(S.edges, S.tris, [0]))


def test_boundary_of_cone_over_disk():
    O, _ = octahedron()
    st, dl = star_and_deletion(O, 0)
    C = cone_disk(dl, apex=0)
    bd = boundary_surface(C)
    assert len(bd.tris) == 2 * len(dl.tris) and euler_characteristic(bd) == 2


def test_isomorphic():
    S, _ = tetrahedron()
    m = isomorphic(S, S)
    assert m is not None
    B, _ = bipyramid()
    assert isomorphic(S, B) is None


def test_isomorphic_relabelled():
    S, colors, _ = generate_random(30, 5)
    shift = {v: v + 100 for v in S.vertices}
    T = Surface2({shift[v] for v in S.vertices},
                 {e + 7: (shift[a], shift[b]) for e, (a, b) in S.edges.items()},
                 {t + 3: Tri(tuple(shift[v] for v in x.corners), tuple(e + 7 for e in x.sides))
                  for t, x in S.tris.items()})
    assert isomorphic(S, T) is not None
    assert isomorphic(S, T, colors, {shift[v]: c for v, c in colors.items()}) is not None
    bad = {shift[v]: (c ^ 1) for v, c in colors.items()}
    assert isomorphic(S, T, colors, bad) is None


def test_build_complex_rejects_bad_face_map():
    S, _ = tetrahedron()
    # face i must omit corner i; swapping two faces breaks that
    tets = {0: ((0, 1, 2, 3), (1, 0, 2, 3))}
    rep = validate_complex(build_complex(S.edges, S.tris, tets))
    assert not rep.ok and "does not omit corner" in rep.errors[0]


def test_build_complex_rejects_foreign_corner():
    S, _ = octahedron()
    with pytest.raises(StructuralError):
        build_complex(S.edges, S.tris, {0: ((0, 1, 2, 3), (6, 1, 2, 3))})
