import pytest
from hypothesis import given, settings, strategies as st

from ballext.ball_extend import (ConeOfDeletion, DoubleCone, GraftInner, GraftSurface, RemoveFillRecurse,
                                 extend_parallel_case, extend_to_ball, find_link_tricolor_vertex, trace_kinds)
from ballext.core import PreconditionError, boundary_surface, validate_complex, vertex_link
from ballext.formats import write_trc
from ballext.moves import generate_random
from ballext.verify import verify_extension

from conftest import bipyramid, flipped_tetrahedron, octahedron, tetrahedron


def link_colors(S, colors, v):
    return {colors[w] for w in vertex_link(S, v).vertices}


def assert_extension(S, colors, res):
    C = res.ball
    assert validate_complex(C).ok
    assert C.vertices == S.vertices
    assert all(len({colors[v] for v in T.corners}) == 4 for T in C.tets.values())
    assert verify_extension(S, colors, res).ok


def test_tetrahedron():
    S, c = tetrahedron()
    res = extend_to_ball(S, c)
    assert len(res.ball.tets) == 1
    assert isinstance(res.trace, ConeOfDeletion)
    assert boundary_surface(res.ball) == S
    assert_extension(S, c, res)


def test_bipyramid():
    S, c = bipyramid()
    res = extend_to_ball(S, c)
    # 2 tets: the only unique-colored vertices are on the equator and a cone from
    # an apex would contain the edge between the two color-0 apexes
    assert len(res.ball.tets) == 2
    assert isinstance(res.trace, ConeOfDeletion) and res.trace.v == 1
    assert_extension(S, c, res)


def test_flipped_tetrahedron():
    S, c = flipped_tetrahedron()
    res = extend_to_ball(S, c)
    assert len(res.ball.tets) == 2
    assert isinstance(res.trace, DoubleCone)
    assert {res.trace.apex1, res.trace.apex2} == {0, 1}
    assert boundary_surface(res.ball) == S
    assert_extension(S, c, res)


def test_octahedron():
    S, c = octahedron()
    res = extend_to_ball(S, c)
    assert_extension(S, c, res)


def test_link_tricolor_examples():
    S, c = tetrahedron()
    # region from triangle 0 = (1,2,3) is that triangle; smallest boundary edge is {1,2}
    assert find_link_tricolor_vertex(S, c) == 1
    B, bc = bipyramid()
    v = find_link_tricolor_vertex(B, bc)
    # seed triangle 1 = (3,2,0) grows over triangle 5 = (2,3,4); smallest boundary edge is {0,2}
    assert v == 0 and link_colors(B, bc, v) == {1, 2, 3}
    O, oc = octahedron()
    v = find_link_tricolor_vertex(O, oc)
    brute = [w for w in sorted(O.vertices) if len(link_colors(O, oc, w)) == 3]
    assert brute and v in brute


def test_link_tricolor_rejects_parallel():
    S, c = flipped_tetrahedron()
    with pytest.raises(PreconditionError):
        find_link_tricolor_vertex(S, c)


def test_parallel_case_b2():
    S, c = flipped_tetrahedron()
    res = extend_parallel_case(S, c, 5, 6)
    assert isinstance(res.trace, DoubleCone) and len(res.ball.tets) == 2
    assert_extension(S, c, res)


def test_parallel_case_b1():
    for seed in range(300):
        S, c, _ = generate_random(30, seed)
        for e, e2, *_ in S.parallel_classes():
            res = extend_parallel_case(S, c, e, e2)
            if isinstance(res.trace, (GraftInner, GraftSurface)):
                assert_extension(S, c, res)
                return
    pytest.fail("no generated instance took the grafting branch")


def test_parallel_case_rejects_non_parallel():
    S, c = tetrahedron()
    with pytest.raises(PreconditionError):
        extend_parallel_case(S, c, 0, 1)


def test_rejects_bad_input():
    S, c = tetrahedron()
    with pytest.raises(PreconditionError):
        extend_to_ball(S, {**c, 3: 2})
    O, oc = octahedron()
    with pytest.raises(PreconditionError):
        extend_to_ball(O, {**oc, 5: 3})  # only three colors left
    del S.tris[0]
    with pytest.raises(PreconditionError):
        extend_to_ball(S, c)


def test_trace_kinds_and_stats():
    S, c, _ = generate_random(200, 7)
    res = extend_to_ball(S, c)
    kinds = trace_kinds(res.trace)
    names = {"ConeOfDeletion": "cone_of_deletion", "RemoveFillRecurse": "remove_fill",
             "GraftInner": "graft_inner", "GraftSurface": "graft_surface", "DoubleCone": "double_cone"}
    assert {names[k]: v for k, v in kinds.items()} == {k: v for k, v in res.stats.items() if v}


def test_deterministic():
    S, c, _ = generate_random(300, 11)
    a, b = extend_to_ball(S, c), extend_to_ball(S, c)
    assert a.ball.tets == b.ball.tets and a.ball.tris == b.ball.tris
    assert write_trc(a.trace) == write_trc(b.trace)


def test_remove_fill_used():
    for seed in range(100):
        S, c, _ = generate_random(40, seed, flip_ratio=0.0)
        res = extend_to_ball(S, c)
        if trace_kinds(res.trace)["RemoveFillRecurse"]:
            assert_extension(S, c, res)
            return
    pytest.fail("no subdivision-only instance needed the link-fill step")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 120), st.sampled_from([0.2, 0.5, 0.8]))
def test_random_spheres(seed, n, ratio):
    S, c, _ = generate_random(n, seed, ratio)
    res = extend_to_ball(S, c)
    assert_extension(S, c, res)
    assert isinstance(res.trace, (ConeOfDeletion, RemoveFillRecurse, GraftInner, GraftSurface, DoubleCone))
