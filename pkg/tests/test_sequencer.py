import itertools
import random
from collections import Counter

import pytest

from ballext.ball_extend import DoubleCone, extend_to_ball
from ballext.core import (PreconditionError, build_complex, induced_face, isomorphic, reversed_tri, same_cycle,
                          validate_complex)
from ballext.moves import Flip, Subdivide, generate_random, replay
from ballext.verify import check_prefix_order
from ballext.sequencer import _add, attachment_order, exhaustive_shelling, moves_from_order, step_shares

from conftest import bipyramid, flipped_tetrahedron, octahedron, tetrahedron


def prefixes_are_balls(ball, order):
    """Oracle: rebuild and fully validate every prefix as a complex.

    Triangles interior to the ball may lie on a prefix boundary with the
    wrong stored orientation, so those are reoriented first.
    """
    for k in range(1, len(order) + 1):
        raw = {t: (ball.tets[t].corners, ball.tets[t].faces) for t in order[:k]}
        slots = Counter(f for t in order[:k] for f in ball.tets[t].faces)
        tris = dict(ball.tris)
        for t in order[:k]:
            T = ball.tets[t]
            for i, f in enumerate(T.faces):
                if slots[f] == 1 and not same_cycle(induced_face(T.corners, i), tris[f].corners):
                    tris[f] = reversed_tri(tris[f])
        if not validate_complex(build_complex(ball.edges, tris, raw)).ok:
            return False
    return True


def shares(ball, order):
    count, verts, edges, out = {}, set(), set(), []
    for i, k in enumerate(order):
        if i:
            out.append(len(step_shares(ball, k, count, verts, edges)))
        _add(ball, k, count, verts, edges)
    return out


def round_trip(S, c, res, start):
    order = attachment_order(res, start)
    seq = moves_from_order(res.ball, c, order)
    R, rc = replay(seq)
    return order, seq, isomorphic(R, S, rc, c) is not None


def test_single_tet():
    S, c = tetrahedron()
    res = extend_to_ball(S, c)
    (t,) = res.ball.tets
    order, seq, iso = round_trip(S, c, res, t)
    assert order.order == [t] and len(seq) == 0 and iso


def test_bipyramid_ball():
    S, c = bipyramid()
    res = extend_to_ball(S, c)
    for start in res.ball.tets:
        order, seq, iso = round_trip(S, c, res, start)
        assert order.order[0] == start and len(order) == 2
        assert shares(res.ball, order.order) == [1]
        assert [type(m) for m in seq.moves] == [Subdivide] and iso


def test_flipped_ball():
    S, c = flipped_tetrahedron()
    res = extend_to_ball(S, c)
    assert isinstance(res.trace, DoubleCone)
    start = res.trace.cone1[0][1]
    order, seq, iso = round_trip(S, c, res, start)
    assert len(order) == 2 and shares(res.ball, order.order) == [2]
    assert [type(m) for m in seq.moves] == [Flip] and iso


def test_octahedron_every_start():
    S, c = octahedron()
    res = extend_to_ball(S, c)
    for start in res.ball.tets:
        order, seq, iso = round_trip(S, c, res, start)
        assert prefixes_are_balls(res.ball, order.order) and iso


def test_unknown_start():
    S, c = tetrahedron()
    res = extend_to_ball(S, c)
    with pytest.raises(PreconditionError):
        attachment_order(res, 99)
    with pytest.raises(PreconditionError):
        exhaustive_shelling(res.ball, 99)


def test_base_keeps_vertex_ids():
    S, c, _ = generate_random(25, 3)
    res = extend_to_ball(S, c)
    start = min(res.ball.tets)
    seq = moves_from_order(res.ball, c, attachment_order(res, start))
    assert [v for v, _ in seq.base] == list(res.ball.tets[start].corners)
    assert all(c[v] == col for v, col in seq.base)


def test_generated_round_trips():
    for seed in range(60):
        S, c, _ = generate_random(random.Random(seed).randint(1, 60), seed)
        res = extend_to_ball(S, c)
        for start in random.Random(seed).sample(sorted(res.ball.tets), min(3, len(res.ball.tets))):
            order, seq, iso = round_trip(S, c, res, start)
            assert iso
            assert len(seq) == len(res.ball.tets) - 1


def test_prefixes_validate_against_oracle():
    for seed in range(15):
        S, c, _ = generate_random(20, seed)
        res = extend_to_ball(S, c)
        order = attachment_order(res, max(res.ball.tets))
        assert prefixes_are_balls(res.ball, order.order)


def small_balls(limit):
    for seed in range(400):
        S, c, _ = generate_random(random.Random(seed).randint(1, 8), seed)
        res = extend_to_ball(S, c)
        if len(res.ball.tets) <= limit:
            yield res


def test_exhaustive_agrees():
    checked = 0
    for res in small_balls(6):
        for start in res.ball.tets:
            found = exhaustive_shelling(res.ball, start)
            assert found is not None and found.order[0] == start
            assert prefixes_are_balls(res.ball, found.order)
            attachment_order(res, start)  # constructive order exists too
            checked += 1
    assert checked > 100


def test_exhaustive_eight_tets():
    res = next(r for r in small_balls(8) if len(r.ball.tets) == 8)
    found = exhaustive_shelling(res.ball, min(res.ball.tets))
    assert found is not None and prefixes_are_balls(res.ball, found.order)


def test_exhaustive_bound():
    S, c, _ = generate_random(60, 1, flip_ratio=0.0)
    res = extend_to_ball(S, c)
    with pytest.raises(PreconditionError):
        exhaustive_shelling(res.ball, min(res.ball.tets), bound=10)


def test_prefix_checker_matches_oracle_on_all_permutations():
    seen_bad = seen_good = 0
    for n, res in enumerate(small_balls(5)):
        if n >= 25:
            break
        for perm in itertools.permutations(sorted(res.ball.tets)):
            ok, _ = check_prefix_order(res.ball, list(perm))
            assert ok == prefixes_are_balls(res.ball, list(perm))
            seen_good += ok
            seen_bad += not ok
    assert seen_good and seen_bad
