import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ballext.core import CycleGraph, PreconditionError, Surface2, Tri, validate_surface
from ballext.disk_fill import (enumerate_polygon_fillings, fill_cycle, filling_signature,
                               polygon_triangulations, prefix_is_disk_sequence, shell_disk2,
                               shell_disk2_by_cuts)

from conftest import surface_from_corners


def cycle(cols):
    n = len(cols)
    return CycleGraph(tuple(range(n)), tuple(range(n))), dict(enumerate(cols))


def chords(D, n):
    ring = {frozenset((k, (k + 1) % n)) for k in range(n)}
    return {frozenset(p) for p in D.edges.values()} - ring


def test_three_cycle():
    C, c = cycle([1, 2, 3])
    D = fill_cycle(C, c)
    assert len(D.tris) == 1 and not chords(D, 3)
    assert len(enumerate_polygon_fillings(C, c)) == 1


def test_four_cycle():
    C, c = cycle([1, 2, 3, 2])
    D = fill_cycle(C, c)
    assert len(D.tris) == 2 and chords(D, 4) == {frozenset((0, 2))}
    fills = enumerate_polygon_fillings(C, c)
    assert len(polygon_triangulations(4)) == 2
    assert len(fills) == 1 and filling_signature(fills[0]) == filling_signature(D)


def test_five_cycle():
    C, c = cycle([1, 2, 3, 1, 2])
    D = fill_cycle(C, c)
    assert len(D.tris) == 3
    assert chords(D, 5) == {frozenset((0, 2)), frozenset((2, 4))}
    assert len(polygon_triangulations(5)) == 5


def test_fill_rejects_bad_cycles():
    for cols in ([1, 2, 1, 2], [1, 1, 2, 3], [1, 2]):
        C, c = cycle(cols)
        with pytest.raises(PreconditionError):
            fill_cycle(C, c)


def test_enumeration_bound():
    C, c = cycle([1, 2, 3] * 5)
    with pytest.raises(PreconditionError):
        enumerate_polygon_fillings(C, c, bound=12)


def test_catalan_counts():
    assert [len(polygon_triangulations(n)) for n in range(3, 10)] == [1, 2, 5, 14, 42, 132, 429]


def strict_colorings(n):
    for cols in itertools.product((0, 1, 2, 3), repeat=n):
        if all(cols[i] != cols[(i + 1) % n] for i in range(n)) and len(set(cols)) == 3:
            yield cols


def test_fill_in_enumeration_small():
    for n in range(3, 7):
        for cols in strict_colorings(n):
            C, c = cycle(list(cols))
            D = fill_cycle(C, c)
            assert D.vertices == set(range(n)) and validate_surface(D).ok
            assert all(c[u] != c[v] for u, v in D.edges.values())
            sigs = {filling_signature(F) for F in enumerate_polygon_fillings(C, c)}
            assert filling_signature(D) in sigs


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([0, 1, 2, 3]), min_size=3, max_size=30), st.integers(0, 10**6))
def test_fill_long_cycles(cols, seed):
    # repair the list into a proper cycle coloring using three colors
    cols = [x for i, x in enumerate(cols) if i == 0 or x != cols[i - 1]]
    while len(cols) > 1 and cols[-1] == cols[0]:
        cols.pop()
    if len(cols) < 3 or len(set(cols)) != 3:
        return
    vs = tuple(v * 3 + 11 for v in range(len(cols)))
    C = CycleGraph(vs, tuple(range(40, 40 + len(vs))))
    c = dict(zip(vs, cols))
    D = fill_cycle(C, c)
    assert len(D.tris) == len(vs) - 2 and D.vertices == set(vs)
    assert validate_surface(D).ok
    assert all(c[u] != c[v] for u, v in D.edges.values())


def square():
    return surface_from_corners([(0, 1, 2), (0, 2, 3)], {}, closed=False)[0]


def fan(k):
    return surface_from_corners([(9, i, i + 1) for i in range(k)], {}, closed=False)[0]


def test_shell_single_and_square():
    D = surface_from_corners([(0, 1, 2)], {}, closed=False)[0]
    assert shell_disk2(D, 0) == [0]
    S = square()
    assert shell_disk2(S, 0) == [0, 1] and shell_disk2(S, 1) == [1, 0]


def test_shell_fan_middle():
    F = fan(5)
    order = shell_disk2(F, 2)
    assert order[0] == 2 and prefix_is_disk_sequence(F, order)


def test_shell_rejects_unknown_start():
    with pytest.raises(PreconditionError):
        shell_disk2(square(), 7)


def test_shell_disk_with_inner_vertices():
    # wheel around 9 inside a hexagon, plus an outer ring of ears
    tris = [(9, i, (i + 1) % 6) for i in range(6)] + [(i, 10 + i, (i + 1) % 6) for i in range(6)]
    D = surface_from_corners(tris, {}, closed=False)[0]
    assert validate_surface(D).ok
    for start in D.tris:
        for fn in (shell_disk2, shell_disk2_by_cuts):
            order = fn(D, start)
            assert order[0] == start and prefix_is_disk_sequence(D, order)


def test_shell_all_polygons_small():
    for n in range(3, 8):
        for tri_set in polygon_triangulations(n):
            D = surface_from_corners(tri_set, {}, closed=False)[0]
            for start in D.tris:
                assert prefix_is_disk_sequence(D, shell_disk2(D, start))
                assert prefix_is_disk_sequence(D, shell_disk2_by_cuts(D, start))
