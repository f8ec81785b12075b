"""Line-oriented text formats.

``.d2s`` surface, ``.d3c`` 3-complex, ``.mvs`` move sequence and ``.trc``
construction trace.  Cells are written sorted by id and every writer is a
pure function of its input, so files are byte-stable.  ``#`` starts a
comment anywhere on a line.
"""
from __future__ import annotations

import re
from dataclasses import fields
from typing import Mapping

from .ball_extend import ConeOfDeletion, DoubleCone, GraftInner, GraftSurface, RemoveFillRecurse, Trace
from .core import Complex3, Surface2, Tet, Tri
from .moves import Flip, MoveSequence, Subdivide


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _int(tok: str, n: int) -> int:
    if not tok.isdigit():
        raise FormatError(f"expected a non-negative integer, got {tok!r}", n)
    return int(tok)


def _ints(tok: str, n: int, count: int | None = None, sep: str = ",") -> tuple[int, ...]:
    out = tuple(_int(x, n) for x in tok.split(sep))
    if count is not None and len(out) != count:
        raise FormatError(f"expected {count} values in {tok!r}", n)
    return out


def _kw(tok: str, key: str, n: int) -> str:
    if not tok.startswith(key + "="):
        raise FormatError(f"expected {key}=..., got {tok!r}", n)
    return tok[len(key) + 1:]


def _cells_header(kind: str, closed: bool | None, vertices, edges, tris, colors) -> list[str]:
    out = [f"{kind} 1"]
    if closed is not None:
        out.append(f"mode {'closed' if closed else 'disk'}")
    for v in sorted(vertices):
        out.append(f"vertex {v} color={colors[v]}")
    for e in sorted(edges):
        u, w = edges[e]
        out.append(f"edge {e} {u} {w}")
    for t in sorted(tris):
        x = tris[t]
        out.append(f"tri {t} v={','.join(map(str, x.corners))} e={','.join(map(str, x.sides))}")
    return out


def write_d2s(S: Surface2, colors: Mapping[int, int]) -> str:
    return "\n".join(_cells_header("d2s", S.closed, S.vertices, S.edges, S.tris, colors)) + "\n"


def write_d3c(C: Complex3, colors: Mapping[int, int]) -> str:
    out = _cells_header("d3c", None, C.vertices, C.edges, C.tris, colors)
    for k in sorted(C.tets):
        T = C.tets[k]
        maps = ";".join("".join(map(str, m)) for m in T.maps)
        out.append(f"tet {k} v={','.join(map(str, T.corners))} f={','.join(map(str, T.faces))} map={maps}")
    return "\n".join(out) + "\n"


def _read_cells(text: str, kind: str):
    it = iter(_lines(text))
    first = next(it, None)
    if first is None or first[1] != [kind, "1"]:
        raise FormatError(f"missing header '{kind} 1'", first[0] if first else None)
    closed = None
    colors: dict[int, int] = {}
    edges: dict[int, tuple[int, int]] = {}
    tris: dict[int, Tri] = {}
    tets: dict[int, Tet] = {}
    seen = set()
    for n, toks in it:
        tag = toks[0]
        if tag == "mode" and kind == "d2s" and len(toks) == 2 and toks[1] in ("closed", "disk"):
            if closed is not None:
                raise FormatError("repeated mode line", n)
            closed = toks[1] == "closed"
            continue
        if tag == "vertex" and len(toks) == 3:
            key, val = (tag, _int(toks[1], n)), _int(_kw(toks[2], "color", n), n)
            if val > 3:
                raise FormatError(f"color {val} is not in 0..3", n)
            colors[key[1]] = val
        elif tag == "edge" and len(toks) == 4:
            key = (tag, _int(toks[1], n))
            edges[key[1]] = (_int(toks[2], n), _int(toks[3], n))
        elif tag == "tri" and len(toks) == 4:
            key = (tag, _int(toks[1], n))
            tris[key[1]] = Tri(_ints(_kw(toks[2], "v", n), n, 3), _ints(_kw(toks[3], "e", n), n, 3))
        elif tag == "tet" and kind == "d3c" and len(toks) == 5:
            key = (tag, _int(toks[1], n))
            maps = tuple(tuple(_int(ch, n) for ch in p) for p in _kw(toks[4], "map", n).split(";"))
            if len(maps) != 4 or any(len(p) != 3 or any(i > 3 for i in p) for p in maps):
                raise FormatError("map needs four 3-digit corner lists", n)
            tets[key[1]] = Tet(_ints(_kw(toks[2], "v", n), n, 4), _ints(_kw(toks[3], "f", n), n, 4), maps)
        else:
            raise FormatError(f"unrecognized line {' '.join(toks)!r}", n)
        if key in seen:
            raise FormatError(f"duplicate {key[0]} id {key[1]}", n)
        seen.add(key)
    return closed, colors, edges, tris, tets


def read_d2s(text: str) -> tuple[Surface2, dict[int, int]]:
    closed, colors, edges, tris, _ = _read_cells(text, "d2s")
    if closed is None:
        raise FormatError("missing mode line")
    return Surface2(set(colors), edges, tris, closed=closed), colors


def read_d3c(text: str) -> tuple[Complex3, dict[int, int]]:
    _, colors, edges, tris, tets = _read_cells(text, "d3c")
    return Complex3(set(colors), edges, tris, tets), colors


def write_mvs(seq: MoveSequence) -> str:
    out = ["mvs 1", "base " + " ".join(f"{v}:{c}" for v, c in seq.base)]
    for m in seq.moves:
        if isinstance(m, Flip):
            out.append(f"flip e{m.edge} -> e{m.new_edge}")
        else:
            out.append(f"subdiv t{m.tri} -> v{m.new_vertex}:{m.color} "
                       f"{','.join(f't{k}' for k in m.new_tris)} {','.join(f'e{k}' for k in m.new_edges)}")
    return "\n".join(out) + "\n"


_FLIP = re.compile(r"flip e(\d+) -> e(\d+)$")
_SUBDIV = re.compile(r"subdiv t(\d+) -> v(\d+):([0-3]) t(\d+),t(\d+),t(\d+) e(\d+),e(\d+),e(\d+)$")


def read_mvs(text: str) -> MoveSequence:
    it = iter(_lines(text))
    first = next(it, None)
    if first is None or first[1] != ["mvs", "1"]:
        raise FormatError("missing header 'mvs 1'", first[0] if first else None)
    nb = next(it, None)
    if nb is None or nb[1][0] != "base" or len(nb[1]) != 5:
        raise FormatError("missing base line", nb[0] if nb else None)
    base = []
    for tok in nb[1][1:]:
        v, _, c = tok.partition(":")
        base.append((_int(v, nb[0]), _int(c, nb[0])))
    seq = MoveSequence(tuple(base))
    for n, toks in it:
        line = " ".join(toks)
        if m := _FLIP.match(line):
            seq.moves.append(Flip(int(m[1]), int(m[2])))
        elif m := _SUBDIV.match(line):
            g = [int(x) for x in m.groups()]
            seq.moves.append(Subdivide(g[0], g[1], g[2], tuple(g[3:6]), tuple(g[6:9])))
        else:
            raise FormatError(f"unrecognized move {line!r}", n)
    return seq


_NODE_NAMES = {ConeOfDeletion: "cone-of-deletion", RemoveFillRecurse: "remove-fill-recurse",
               GraftInner: "graft-inner", GraftSurface: "graft-surface", DoubleCone: "double-cone"}
_NODE_TYPES = {v: k for k, v in _NODE_NAMES.items()}
_CHILD_FIELDS = ("inner", "b1", "b2")
_PAIR_FIELDS = ("cone", "cone1", "cone2")


def write_trc(trace: Trace) -> str:
    """One node per line, children after their parent; ``)`` closes a node."""
    lines = ["trc 1"]
    stack: list = [(trace, 0)]
    while stack:
        n, depth = stack.pop()
        if n is None:
            lines[-1] += ")"
            continue
        parts = [f"({_NODE_NAMES[type(n)]}"]
        kids = []
        for f in fields(n):
            val = getattr(n, f.name)
            if f.name in _CHILD_FIELDS:
                kids.append(val)
            elif f.name in _PAIR_FIELDS:
                parts.append(f"{f.name}=" + (",".join(f"{b}:{k}" for b, k in val) or "-"))
            elif f.name == "fill":
                parts.append(f"{f.name}=" + (",".join(map(str, val)) or "-"))
            else:
                parts.append(f"{f.name}={val}")
        lines.append(" " * min(depth, 32) + " ".join(parts) + ("" if kids else ")"))
        if kids:
            stack.append((None, depth))
            stack += [(k, depth + 1) for k in reversed(kids)]
    return "\n".join(lines) + "\n"


def read_trc(text: str) -> Trace:
    body = [(n, toks) for n, toks in _lines(text)]
    if not body or body[0][1] != ["trc", "1"]:
        raise FormatError("missing header 'trc 1'", body[0][0] if body else None)
    stack: list = []
    result = None
    for n, toks in body[1:]:
        for tok in toks:
            closes = len(tok) - len(tok.rstrip(")"))
            tok = tok.rstrip(")")
            if tok.startswith("("):
                name = tok[1:]
                if name not in _NODE_TYPES:
                    raise FormatError(f"unknown record {name!r}", n)
                if result is not None:
                    raise FormatError("content after the root record", n)
                stack.append((_NODE_TYPES[name], {}, [], n))
            elif tok:
                if not stack:
                    raise FormatError(f"field {tok!r} outside a record", n)
                key, eq, val = tok.partition("=")
                if not eq:
                    raise FormatError(f"expected key=value, got {tok!r}", n)
                stack[-1][1][key] = (val, n)
            for _ in range(closes):
                if not stack:
                    raise FormatError("unbalanced ')'", n)
                node = _build_node(*stack.pop())
                if stack:
                    stack[-1][2].append(node)
                else:
                    result = node
    if stack or result is None:
        raise FormatError("unterminated record")
    return result


def _build_node(cls, raw: dict, kids: list, line: int):
    args = {}
    kid_iter = iter(kids)
    for f in fields(cls):
        if f.name in _CHILD_FIELDS:
            node = next(kid_iter, None)
            if node is None:
                raise FormatError(f"{_NODE_NAMES[cls]} is missing a sub-record", line)
            args[f.name] = node
            continue
        if f.name not in raw:
            raise FormatError(f"{_NODE_NAMES[cls]} lacks field {f.name}", line)
        val, n = raw.pop(f.name)
        if f.name in _PAIR_FIELDS:
            args[f.name] = () if val == "-" else tuple(_ints(p, n, 2, ":") for p in val.split(","))
        elif f.name == "fill":
            args[f.name] = () if val == "-" else _ints(val, n)
        else:
            args[f.name] = _int(val, n)
    if raw:
        raise FormatError(f"unknown field {next(iter(raw))!r} in {_NODE_NAMES[cls]}", line)
    if next(kid_iter, None) is not None:
        raise FormatError(f"too many sub-records in {_NODE_NAMES[cls]}", line)
    return cls(**args)


def to_dot(vertices, edges: Mapping[int, tuple[int, int]], colors: Mapping[int, int] | None = None,
           name: str = "skeleton") -> str:
    """Graphviz description of the 1-skeleton (parallel edges drawn separately)."""
    palette = ("red", "green", "blue", "gold")
    out = [f"graph {name} {{"]
    for v in sorted(vertices):
        attr = f' [label="{v}", color={palette[colors[v]]}]' if colors and v in colors else f' [label="{v}"]'
        out.append(f"  v{v}{attr};")
    for e in sorted(edges):
        u, w = edges[e]
        out.append(f'  v{u} -- v{w} [label="e{e}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def sniff(text: str) -> str:
    """Format name from the header line ('d2s', 'd3c', 'mvs', 'trc')."""
    for _, toks in _lines(text):
        if len(toks) == 2 and toks[1] == "1" and toks[0] in ("d2s", "d3c", "mvs", "trc"):
            return toks[0]
        break
    raise FormatError("unknown file format (no recognized header)")
