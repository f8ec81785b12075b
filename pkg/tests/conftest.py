import random

import pytest

from ballext.core import Surface2, Tri
from ballext.moves import DEFAULT_BASE, apply_flip, apply_subdivide, base_tetrahedron


def surface_from_corners(triples, colors, closed=True):
    """Simplicial surface from oriented corner triples; edge ids in order of first use."""
    eid, edges, tris = {}, {}, {}
    for t, (a, b, c) in enumerate(triples):
        sides = []
        for u, v in ((a, b), (b, c), (a, c)):
            key = frozenset((u, v))
            if key not in eid:
                eid[key] = len(eid)
                edges[eid[key]] = (u, v)
            sides.append(eid[key])
        tris[t] = Tri((a, b, c), tuple(sides))
    vs = {v for tri in triples for v in tri}
    return Surface2(vs, edges, tris, closed=closed), dict(colors)


def tetrahedron():
    return base_tetrahedron(DEFAULT_BASE)


def flipped_tetrahedron():
    S, colors = tetrahedron()
    F, _ = apply_flip(S, colors, 0)
    return F, colors


def bipyramid():
    S, colors = tetrahedron()
    B, colors, _ = apply_subdivide(S, colors, 0)
    return B, colors


def octahedron():
    # antipodal pairs (0,5), (1,3), (2,4) colored (3,0), (1,1), (2,2)
    triples = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
               (5, 2, 1), (5, 3, 2), (5, 4, 3), (5, 1, 4)]
    return surface_from_corners(triples, {0: 3, 5: 0, 1: 1, 3: 1, 2: 2, 4: 2})


@pytest.fixture
def tet_sphere():
    return tetrahedron()


@pytest.fixture
def flip_sphere():
    return flipped_tetrahedron()


@pytest.fixture
def bipyr_sphere():
    return bipyramid()


@pytest.fixture
def octa_sphere():
    return octahedron()


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
