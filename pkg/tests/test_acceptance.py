"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (printed in the terminal summary by
conftest) and then asserts.  Thresholds are pinned constants below.
"""
import itertools
import json
import os
import random
import subprocess
import sys
import time
from functools import lru_cache

from ballext.ball_extend import DoubleCone, GraftInner, GraftSurface, extend_to_ball, trace_kinds
from ballext.coloring import Sign, triangle_sign
from ballext.core import CycleGraph, Surface2, euler_characteristic, isomorphic, validate_surface
from ballext.disk_fill import enumerate_polygon_fillings, fill_cycle, filling_signature, polygon_triangulations, shell_disk2
from ballext.moves import DEFAULT_BASE, WorkingSphere, apply_flip, apply_subdivide, base_tetrahedron, generate_random, replay
from ballext.sequencer import attachment_order, moves_from_order
from ballext.verify import check_prefix_order, verify_extension

from conftest import bipyramid, flipped_tetrahedron, surface_from_corners, tetrahedron

FIXTURE_SECONDS = 1.0
CORPUS_SEEDS = range(500)
CORPUS_SECONDS = 60.0
ROUND_TRIP_STARTS = 3
ROUND_TRIP_SECONDS = 300.0
CYCLE_LENGTHS = range(3, 9)
CYCLE_SECONDS = 30.0
MAX_POLYGON_TRIS = 8
LAW_TRIALS = 10_000
MIN_B1, MIN_B2 = 50, 20
BIG_MOVES = 10_000
BIG_SECONDS = 60.0
BIG_BYTES = 1 << 30

RESULTS: list[str] = []


def report(n, ok, detail):
    RESULTS.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def corpus_instance(seed):
    n = random.Random(seed).randint(1, 60)
    return generate_random(n, seed, 0.5)


@lru_cache(maxsize=None)
def corpus():
    """Extension and certificate for every corpus seed, with the total time."""
    t0 = time.perf_counter()
    out = []
    for seed in CORPUS_SEEDS:
        S, c, _ = corpus_instance(seed)
        res = extend_to_ball(S, c)
        out.append((seed, S, c, res, verify_extension(S, c, res)))
    return out, time.perf_counter() - t0


def test_criterion_1_fixtures():
    rows, ok = [], True
    for name, make, want in (("tetrahedron", tetrahedron, lambda r: len(r.ball.tets) == 1),
                             ("flipped", flipped_tetrahedron,
                              lambda r: len(r.ball.tets) == 2 and isinstance(r.trace, DoubleCone)),
                             ("bipyramid", bipyramid, lambda r: True)):
        t0 = time.perf_counter()
        S, c = make()
        res = extend_to_ball(S, c)
        cert = verify_extension(S, c, res)
        dt = time.perf_counter() - t0
        good = cert.ok and want(res) and dt < FIXTURE_SECONDS
        ok &= good
        rows.append(f"{name}={len(res.ball.tets)}tet/{dt * 1000:.0f}ms{'' if good else '!'}")
    report(1, ok, " ".join(rows))


def test_criterion_2_corpus():
    rows, dt = corpus()
    bad = []
    for seed, S, c, res, cert in rows:
        C = res.ball
        if not (cert.ok and C.vertices == S.vertices and euler_characteristic(C) == 1
                and all(len({c[v] for v in T.corners}) == 4 for T in C.tets.values())):
            bad.append(seed)
    report(2, not bad and dt < CORPUS_SECONDS,
           f"{len(rows) - len(bad)}/{len(rows)} certified in {dt:.1f}s (limit {CORPUS_SECONDS:.0f}s) bad={bad[:5]}")


def test_criterion_3_round_trip():
    rows, _ = corpus()
    t0 = time.perf_counter()
    bad, checked = [], 0
    for seed, S, c, res, _ in rows:
        tets = sorted(res.ball.tets)
        for start in random.Random(seed).sample(tets, min(ROUND_TRIP_STARTS, len(tets))):
            order = attachment_order(res, start)
            ok, _ = check_prefix_order(res.ball, order.order)
            R, rc = replay(moves_from_order(res.ball, c, order))
            if not (ok and order.order[0] == start and isomorphic(R, S, rc, c) is not None):
                bad.append((seed, start))
            checked += 1
    dt = time.perf_counter() - t0
    report(3, not bad and dt < ROUND_TRIP_SECONDS,
           f"{checked - len(bad)}/{checked} orders prefix-valid and replay-isomorphic in {dt:.1f}s "
           f"(limit {ROUND_TRIP_SECONDS:.0f}s) bad={bad[:5]}")


def test_criterion_4_cycle_fill():
    t0 = time.perf_counter()
    bad, checked = [], 0
    for n in CYCLE_LENGTHS:
        C = CycleGraph(tuple(range(n)), tuple(range(n)))
        for cols in itertools.product(range(4), repeat=n):
            if len(set(cols)) != 3 or any(cols[i] == cols[(i + 1) % n] for i in range(n)):
                continue
            c = dict(enumerate(cols))
            checked += 1
            try:
                D = fill_cycle(C, c)
            except Exception as exc:
                bad.append((cols, repr(exc)))
                continue
            oracle = {filling_signature(F) for F in enumerate_polygon_fillings(C, c)}
            if not (D.vertices == set(range(n)) and validate_surface(D).ok
                    and all(c[u] != c[v] for u, v in D.edges.values())
                    and filling_signature(D) in oracle):
                bad.append((cols, "not an oracle filling"))
    dt = time.perf_counter() - t0
    report(4, not bad and dt < CYCLE_SECONDS,
           f"{checked - len(bad)}/{checked} colorings filled in {dt:.1f}s (limit {CYCLE_SECONDS:.0f}s) bad={bad[:3]}")


def test_criterion_5_disk_shelling():
    bad, checked = [], 0
    for n in range(3, MAX_POLYGON_TRIS + 3):
        for tri_set in polygon_triangulations(n):
            D = surface_from_corners(tri_set, {}, closed=False)[0]
            for start in sorted(D.tris):
                order = shell_disk2(D, start)
                checked += 1
                good = order[0] == start and sorted(order) == sorted(D.tris) and all(
                    validate_surface(Surface2.from_tris(D.edges, D.tris, order[:k], closed=False)).ok
                    for k in range(1, len(order) + 1))
                if not good:
                    bad.append((tri_set, start))
    report(5, not bad, f"{checked - len(bad)}/{checked} (triangulation, start) pairs shell with disk prefixes")


def test_criterion_6_move_laws():
    rng = random.Random(6)
    pool = [generate_random(rng.randint(0, 40), s)[:2] for s in range(100)]
    sub_bad = flip_bad = flips = 0
    for k in range(LAW_TRIALS):
        S, c = pool[k % len(pool)]
        t = rng.choice(sorted(S.tris))
        parent = S.tris[t]
        T, c2, rec = apply_subdivide(S, c, t)
        a, b, d = (c[v] for v in parent.corners)
        sign = triangle_sign(parent, c)
        if c2[rec.new_vertex] != a ^ b ^ d or any(triangle_sign(T.tris[x], c2) is sign for x in rec.new_tris):
            sub_bad += 1
        if k % 3 == 0:
            pool[k % len(pool)] = (T, c2)
    for k in range(LAW_TRIALS):
        S, c = pool[k % len(pool)]
        W = WorkingSphere(S, c)
        cand = sorted(e for e in S.edges if W.can_flip(e))
        if not cand:
            continue
        F, rec = apply_flip(S, c, rng.choice(cand))
        G, _ = apply_flip(F, c, rec.new_edge)
        flips += 1
        if isomorphic(S, G, c, c) is None:
            flip_bad += 1
        if k % 3 == 0:
            pool[k % len(pool)] = (F, c)
    same = all(len({triangle_sign(x, cc) for x in B.tris.values()}) == 1
               for B, cc in (base_tetrahedron(tuple(zip(range(4), p))) for p in itertools.permutations(range(4))))
    ok = sub_bad == 0 and flip_bad == 0 and flips == LAW_TRIALS and same
    report(6, ok, f"subdivisions {LAW_TRIALS - sub_bad}/{LAW_TRIALS}, flip-back {flips - flip_bad}/{flips} "
                  f"(of {LAW_TRIALS}), base uniform sign for all 24 colorings: {same}")


def test_criterion_7_parallel_coverage():
    rows, _ = corpus()
    b1 = b2 = 0
    uncertified = []
    for seed, S, c, res, cert in rows:
        kinds = trace_kinds(res.trace)
        hit1 = kinds[GraftInner.__name__] + kinds[GraftSurface.__name__] > 0
        hit2 = kinds[DoubleCone.__name__] > 0
        b1 += hit1
        b2 += hit2
        if (hit1 or hit2) and not cert.ok:
            uncertified.append(seed)
    report(7, b1 >= MIN_B1 and b2 >= MIN_B2 and not uncertified,
           f"B1 instances={b1} (min {MIN_B1}), B2 instances={b2} (min {MIN_B2}), uncertified={uncertified[:5]}")


BIG_SCRIPT = """
import json, resource, sys, time
from ballext.ball_extend import extend_to_ball
from ballext.moves import generate_random
from ballext.verify import verify_extension
t0 = time.perf_counter()
S, c, _ = generate_random(int(sys.argv[1]), 0, 0.5)
res = extend_to_ball(S, c)
cert = verify_extension(S, c, res)
dt = time.perf_counter() - t0
rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
print(json.dumps({"ok": cert.ok, "seconds": dt, "rss": rss, "V": len(S.vertices), "T": len(res.ball.tets)}))
"""


def test_criterion_8_performance():
    out = subprocess.run([sys.executable, "-c", BIG_SCRIPT, str(BIG_MOVES)], capture_output=True, text=True,
                         check=True)
    r = json.loads(out.stdout)
    ok = r["ok"] and r["seconds"] < BIG_SECONDS and r["rss"] < BIG_BYTES
    report(8, ok, f"V={r['V']} T={r['T']} generate+extend+verify {r['seconds']:.1f}s (limit {BIG_SECONDS:.0f}s), "
                  f"peak RSS {r['rss'] / 2**20:.0f} MiB (limit {BIG_BYTES / 2**20:.0f} MiB)")


def _pipeline(d, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))

    def cli(*args):
        subprocess.run([sys.executable, "-m", "ballext.cli", *map(str, args)], cwd=d, env=env, check=True,
                       capture_output=True)

    cli("generate", "--moves", 400, "--seed", 9, "-o", "s.d2s", "--record", "rec.mvs")
    cli("extend", "s.d2s", "-o", "b.d3c", "--trace", "b.trc")
    start = max(int(line.split()[1]) for line in open(os.path.join(d, "b.d3c")) if line.startswith("tet "))
    cli("sequence", "b.d3c", "--trace", "b.trc", "--start", start, "-o", "q.mvs")
    cli("replay", "q.mvs", "-o", "r.d2s")
    names = ("s.d2s", "rec.mvs", "b.d3c", "b.trc", "q.mvs", "r.d2s")
    return {n: open(os.path.join(d, n), "rb").read() for n in names}


def test_criterion_9_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    first, second = _pipeline(a, 1), _pipeline(b, 2)
    diff = [n for n in first if first[n] != second[n]]
    report(9, not diff and all(first.values()),
           f"{len(first) - len(diff)}/{len(first)} files byte-identical across two runs (different hash seeds)")
