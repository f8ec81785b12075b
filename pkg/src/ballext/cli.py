"""Command-line interface.

Exit codes: 0 success, 1 verification failed, 2 usage or parse error,
3 structural error (invalid input triangulation or internal inconsistency).
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import formats
from .ball_extend import ExtensionResult, extend_to_ball
from .coloring import check_coloring
from .core import CycleGraph, TriangulationError, validate_complex, validate_surface
from .disk_fill import enumerate_polygon_fillings, fill_cycle, filling_signature
from .moves import generate_random, replay
from .sequencer import attachment_order, exhaustive_shelling, moves_from_order
from .verify import check_prefix_order, verify_extension, verify_move_sequence

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_STRUCTURAL = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _identity_result(ball, trace) -> ExtensionResult:
    return ExtensionResult(ball, trace, {v: v for v in sorted(ball.vertices)})


def cmd_validate(a) -> int:
    text = _read(a.file)
    kind = formats.sniff(text)
    if kind == "d2s":
        S, colors = formats.read_d2s(text)
        rep = validate_surface(S)
        crep = check_coloring(S, colors, require_strict=S.closed)
        print(f"d2s {'closed' if S.closed else 'disk'}: V={len(S.vertices)} E={len(S.edges)} F={len(S.tris)} "
              f"chi={rep.euler}")
        if rep.parallel_edges:
            print(f"parallel edge classes: {len(rep.parallel_edges)}")
    elif kind == "d3c":
        C, colors = formats.read_d3c(text)
        rep = validate_complex(C)
        crep = check_coloring(C, colors)
        print(f"d3c: V={len(C.vertices)} E={len(C.edges)} F={len(C.tris)} T={len(C.tets)} chi={rep.euler}")
    elif kind == "mvs":
        seq = formats.read_mvs(text)
        try:
            S, colors = replay(seq)
        except TriangulationError as exc:
            print(f"invalid: {exc}")
            return EXIT_FAIL
        print(f"mvs: {len(seq)} moves, result V={len(S.vertices)} F={len(S.tris)}")
        return EXIT_OK
    else:
        formats.read_trc(text)
        print("trc: well-formed")
        return EXIT_OK
    for err in rep.errors:
        print(f"error: {err}")
    if not crep.ok:
        print(f"coloring: proper={crep.proper} colors={crep.n_colors} bad edges={crep.bad_edges[:10]}")
    ok = rep.ok and crep.ok
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_extend(a) -> int:
    S, colors = formats.read_d2s(_read(a.input))
    res = extend_to_ball(S, colors)
    _write(a.output, formats.write_d3c(res.ball, colors))
    if a.trace:
        _write(a.trace, formats.write_trc(res.trace))
    print(f"ball: T={len(res.ball.tets)} " + " ".join(f"{k}={v}" for k, v in sorted(res.stats.items())),
          file=sys.stderr)
    return EXIT_OK


def cmd_sequence(a) -> int:
    C, colors = formats.read_d3c(_read(a.input))
    trace = formats.read_trc(_read(a.trace))
    order = attachment_order(_identity_result(C, trace), a.start)
    ok, why = check_prefix_order(C, order.order)
    if not ok:
        print(f"attachment order rejected: {why}", file=sys.stderr)
        return EXIT_STRUCTURAL
    _write(a.output, formats.write_mvs(moves_from_order(C, colors, order)))
    return EXIT_OK


def cmd_replay(a) -> int:
    S, colors = replay(formats.read_mvs(_read(a.input)))
    _write(a.output, formats.write_d2s(S, colors))
    return EXIT_OK


def cmd_generate(a) -> int:
    if a.moves < 0 or not 0.0 <= a.flip_ratio <= 1.0:
        raise _Usage("--moves must be >= 0 and --flip-ratio in [0, 1]")
    S, colors, seq = generate_random(a.moves, a.seed, a.flip_ratio)
    _write(a.output, formats.write_d2s(S, colors))
    if a.record:
        _write(a.record, formats.write_mvs(seq))
    return EXIT_OK


def cmd_verify_ext(a) -> int:
    S, colors = formats.read_d2s(_read(a.surface))
    C, ball_colors = formats.read_d3c(_read(a.ball))
    trace = formats.read_trc(_read(a.trace)) if a.trace else None
    merged = dict(colors)
    for v, c in ball_colors.items():
        if merged.setdefault(v, c) != c:
            print(f"vertex {v} has color {colors[v]} in the surface but {c} in the ball")
            return EXIT_FAIL
    cert = verify_extension(S, merged, _identity_result(C, trace))
    print(cert.render())
    return EXIT_OK if cert.ok else EXIT_FAIL


def cmd_verify_seq(a) -> int:
    S, colors = formats.read_d2s(_read(a.surface))
    seq = formats.read_mvs(_read(a.moves))
    cert = verify_move_sequence(S, colors, seq, revalidate_every=a.every)
    print(cert.render())
    return EXIT_OK if cert.ok else EXIT_FAIL


def cmd_oracle_disk(a) -> int:
    try:
        cols = [int(x) for x in a.cycle.split(",")]
    except ValueError:
        raise _Usage("--cycle expects comma-separated colors") from None
    n = len(cols)
    C = CycleGraph(tuple(range(n)), tuple(range(n)))
    colors = dict(enumerate(cols))
    fills = enumerate_polygon_fillings(C, colors, bound=a.bound)
    mine = fill_cycle(C, colors)
    sig = filling_signature(mine)
    print(f"cycle of length {n}: {len(fills)} properly colored chord fillings")
    for D in fills:
        s = filling_signature(D)
        mark = "*" if s == sig else " "
        print(f" {mark} " + " ".join("(" + ",".join(map(str, sorted(t))) + ")" for t in sorted(map(sorted, s))))
    member = any(filling_signature(D) == sig for D in fills)
    print(f"fill_cycle result is {'one of them' if member else 'NOT among them'}")
    return EXIT_OK if member else EXIT_FAIL


def cmd_oracle_shell(a) -> int:
    C, _ = formats.read_d3c(_read(a.input))
    found = exhaustive_shelling(C, a.start, bound=a.bound)
    if found is None:
        print("no attachment order exists from this start")
        return EXIT_FAIL
    print("order: " + " ".join(map(str, found.order)))
    return EXIT_OK


def cmd_export(a) -> int:
    text = _read(a.input)
    kind = formats.sniff(text)
    if kind == "d2s":
        X, colors = formats.read_d2s(text)
    elif kind == "d3c":
        X, colors = formats.read_d3c(text)
    elif kind == "mvs":
        X, colors = replay(formats.read_mvs(text))
    else:
        raise _Usage("export needs a .d2s, .d3c or .mvs file")
    _write(a.output, formats.to_dot(X.vertices, X.edges, colors))
    return EXIT_OK


def cmd_bench(a) -> int:
    print("seed    V      T     gen_s  extend_s  verify_s  ok")
    worst = EXIT_OK
    total = time.perf_counter()
    for i in range(a.count):
        seed = a.seed + i
        t0 = time.perf_counter()
        S, colors, _ = generate_random(a.moves, seed, a.flip_ratio)
        t1 = time.perf_counter()
        res = extend_to_ball(S, colors)
        t2 = time.perf_counter()
        cert = verify_extension(S, colors, res)
        t3 = time.perf_counter()
        print(f"{seed:<6d} {len(S.vertices):<6d} {len(res.ball.tets):<6d} {t1 - t0:<6.2f} {t2 - t1:<9.2f} "
              f"{t3 - t2:<9.2f} {'yes' if cert.ok else 'NO'}")
        if not cert.ok:
            worst = EXIT_FAIL
    print(f"total {time.perf_counter() - total:.2f} s")
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ballext", description="Colored 3-balls bounded by 4-colored spheres.")
    p.add_argument("--debug", action="store_true", help="run internal consistency checks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a .d2s/.d3c/.mvs/.trc file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("extend", help="build a colored ball bounded by a sphere")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--trace")
    s.set_defaults(fn=cmd_extend)

    s = sub.add_parser("sequence", help="move sequence from a ball and its trace")
    s.add_argument("input")
    s.add_argument("--trace", required=True)
    s.add_argument("--start", type=int, required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_sequence)

    s = sub.add_parser("replay", help="apply a move sequence to its base tetrahedron")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_replay)

    s = sub.add_parser("generate", help="random sphere from random moves")
    s.add_argument("--moves", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--flip-ratio", type=float, default=0.5)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--record")
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("verify-ext", help="certify a ball against its boundary sphere")
    s.add_argument("surface")
    s.add_argument("ball")
    s.add_argument("--trace")
    s.set_defaults(fn=cmd_verify_ext)

    s = sub.add_parser("verify-seq", help="replay and check a move sequence against a sphere")
    s.add_argument("surface")
    s.add_argument("moves")
    s.add_argument("--every", type=int, default=1, help="full surface validation every N moves")
    s.set_defaults(fn=cmd_verify_seq)

    s = sub.add_parser("oracle-disk", help="enumerate chord fillings of a colored cycle")
    s.add_argument("--cycle", required=True)
    s.add_argument("--bound", type=int, default=12)
    s.set_defaults(fn=cmd_oracle_disk)

    s = sub.add_parser("oracle-shell", help="search all attachment orders of a small ball")
    s.add_argument("input")
    s.add_argument("--start", type=int, required=True)
    s.add_argument("--bound", type=int, default=10)
    s.set_defaults(fn=cmd_oracle_shell)

    s = sub.add_parser("export", help="1-skeleton as Graphviz DOT")
    s.add_argument("input")
    s.add_argument("--format", choices=["dot"], default="dot")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_export)

    s = sub.add_parser("bench", help="time generate/extend/verify")
    s.add_argument("--moves", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--flip-ratio", type=float, default=0.5)
    s.set_defaults(fn=cmd_bench)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if a.debug:
        from .core import set_debug
        set_debug(True)
    try:
        return a.fn(a)
    except (_Usage, formats.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TriangulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except KeyError as exc:
        # dangling cell reference in an input file
        print(f"error: reference to unknown cell {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
