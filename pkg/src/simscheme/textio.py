"""Scheme and pair text files, approximation graphs and their exports.

File grammar::

    # comment
    [Y]
    0 1
    [X0]
    0 1
    [X1]
    d00 m01 d11
    [phi]
    0 d00            # x0 x1
    [pi]
    0 1 m01          # y x0 x1
    [Z]              # pair files only
    [phiZ]           # x0 z

Token lists may span several lines.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from .fixedpoint import Pair
from .scheme import FORBIDDEN_TOKEN_CHARS, FiniteScheme, SchemeError
from .tower import Tower, cells

SECTIONS = ("Y", "X0", "X1", "phi", "pi", "Z", "phiZ")
SCHEME_SECTIONS = ("Y", "X0", "X1", "phi", "pi")
_HEADER = re.compile(r"^\[([^\]]*)\]$")


class ParseError(SchemeError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class _Section:
    line: int
    entries: list[tuple[int, list[str]]]


def _sections(text: str) -> dict[str, _Section]:
    out: dict[str, _Section] = {}
    current: _Section | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            name = m.group(1).strip()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno)
            if name in out:
                raise ParseError(f"duplicate section [{name}]", lineno)
            current = out[name] = _Section(lineno, [])
            continue
        if current is None:
            raise ParseError("entry outside of any section", lineno)
        tokens = line.split()
        for t in tokens:
            bad = FORBIDDEN_TOKEN_CHARS & set(t)
            if bad:
                raise ParseError(f"token {t!r} contains {''.join(sorted(bad))!r}", lineno)
        current.entries.append((lineno, tokens))
    return out


def _require(sections: dict[str, _Section], names: Iterable[str]) -> None:
    for name in names:
        if name not in sections:
            raise ParseError(f"missing section [{name}]")


def _token_list(section: _Section, kind: str) -> list[str]:
    tokens: list[str] = []
    seen: set[str] = set()
    for lineno, entry in section.entries:
        for t in entry:
            if t in seen:
                raise ParseError(f"duplicate token {t!r} in [{kind}]", lineno)
            seen.add(t)
            tokens.append(t)
    if not tokens:
        raise ParseError(f"section [{kind}] is empty", section.line)
    return tokens


def _mapping(section: _Section, kind: str, domains: list[set[str]], codomain: set[str]) -> dict:
    """Entries ``d1 .. dk c``; keys are single tokens or tuples for k > 1."""
    arity = len(domains)
    out: dict = {}
    for lineno, entry in section.entries:
        if len(entry) != arity + 1:
            raise ParseError(f"[{kind}] entry needs {arity + 1} tokens, got {len(entry)}", lineno)
        *args, value = entry
        for t, dom in zip(args, domains):
            if t not in dom:
                raise ParseError(f"undeclared token {t!r} in [{kind}]", lineno)
        if value not in codomain:
            raise ParseError(f"undeclared token {value!r} in [{kind}]", lineno)
        key = args[0] if arity == 1 else tuple(args)
        if key in out:
            raise ParseError(f"duplicate [{kind}] entry for {' '.join(args)}", lineno)
        out[key] = value
    return out


def _check_total(section: _Section, kind: str, mapping: dict, keys: Iterable) -> None:
    for key in keys:
        if key not in mapping:
            shown = " ".join(key) if isinstance(key, tuple) else key
            raise ParseError(f"[{kind}] has no entry for {shown}", section.line)


def _scheme_from_sections(sections: dict[str, _Section]) -> FiniteScheme:
    _require(sections, SCHEME_SECTIONS)
    Y = _token_list(sections["Y"], "Y")
    X0 = _token_list(sections["X0"], "X0")
    X1 = _token_list(sections["X1"], "X1")
    phi = _mapping(sections["phi"], "phi", [set(X0)], set(X1))
    _check_total(sections["phi"], "phi", phi, X0)
    pi = _mapping(sections["pi"], "pi", [set(Y), set(X0)], set(X1))
    _check_total(sections["pi"], "pi", pi, [(y, x) for y in Y for x in X0])
    return FiniteScheme.from_maps(Y, X0, X1, phi, pi)


def parse_scheme(text: str) -> FiniteScheme:
    """Parse a scheme file; any [Z]/[phiZ] sections are checked for syntax only."""
    return _scheme_from_sections(_sections(text))


def parse_pair(text: str, scheme: FiniteScheme) -> Pair:
    """Read ``[Z]`` and ``[phiZ]`` from a pair file (which may also hold a scheme)."""
    sections = _sections(text)
    _require(sections, ("Z", "phiZ"))
    Z = _token_list(sections["Z"], "Z")
    phiZ = _mapping(sections["phiZ"], "phiZ", [set(scheme.X0)], set(Z))
    _check_total(sections["phiZ"], "phiZ", phiZ, scheme.X0)
    return Pair.from_map(scheme, Z, phiZ)


def serialize_scheme(scheme: FiniteScheme) -> str:
    lines = [
        "[Y]", " ".join(scheme.Y),
        "[X0]", " ".join(scheme.X0),
        "[X1]", " ".join(scheme.X1),
        "[phi]",
    ]
    lines += [f"{x} {v}" for x, v in scheme.phi_map.items()]
    lines.append("[pi]")
    lines += [f"{y} {x} {v}" for (y, x), v in scheme.pi_map.items()]
    return "\n".join(lines) + "\n"


def serialize_pair(scheme: FiniteScheme, pair: Pair) -> str:
    lines = ["[Z]", " ".join(pair.Z), "[phiZ]"]
    lines += [f"{x} {pair.Z[z]}" for x, z in zip(scheme.X0, pair.phiZ)]
    return "\n".join(lines) + "\n"


# approximation graphs ----------------------------------------------------------


@dataclass(frozen=True)
class ApproxGraph:
    """Points of ``X_n`` joined whenever they share a cell; edges carry the words of those cells."""

    n: int
    vertices: tuple[int, ...]
    edges: dict[tuple[int, int], tuple[str, ...]]


def word_label(scheme: FiniteScheme, word) -> str:
    return scheme.format_word(word) if word else "∅"


def approx_graph(tower: Tower, n: int) -> ApproxGraph:
    tower.level(n)
    edges: dict[tuple[int, int], list[str]] = {}
    for c in cells(tower, n):
        members = sorted(c.members)
        label = word_label(tower.scheme, c.word)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                edges.setdefault((a, b), []).append(label)
    return ApproxGraph(
        n,
        tuple(range(tower.level(n).size)),
        {e: tuple(ws) for e, ws in sorted(edges.items())},
    )


def _dot_string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(tower: Tower, graph: ApproxGraph) -> str:
    names = tower.level(graph.n).names
    lines = [f"graph level_{graph.n} {{"]
    lines += [f"  {v} [label={_dot_string(names[v])}];" for v in graph.vertices]
    lines += [f"  {a} -- {b} [label={_dot_string(' '.join(ws))}];" for (a, b), ws in graph.edges.items()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_structured(tower: Tower, n: int) -> str:
    """Levels ``0..n`` with their maps and cells as JSON, keys sorted."""
    scheme = tower.scheme
    levels = []
    for m in range(n + 1):
        lv = tower.level(m)
        entry: dict = {
            "n": m,
            "points": list(lv.names),
            "cells": {
                word_label(scheme, c.word): sorted(lv.names[x] for x in c.members)
                for c in cells(tower, m)
            },
        }
        if m > 0:
            prev = tower.level(m - 1)
            entry["emb"] = {prev.names[i]: lv.names[int(v)] for i, v in enumerate(lv.emb)}
            entry["proj"] = {
                scheme.Y[y]: {prev.names[i]: lv.names[int(v)] for i, v in enumerate(row)}
                for y, row in enumerate(lv.proj)
            }
        levels.append(entry)
    graph = approx_graph(tower, n)
    names = tower.level(n).names
    doc = {
        "scheme": {
            "Y": list(scheme.Y),
            "X0": list(scheme.X0),
            "X1": list(scheme.X1),
            "phi": scheme.phi_map,
            "pi": {f"{y} {x}": v for (y, x), v in scheme.pi_map.items()},
        },
        "levels": levels,
        "graph": {
            "n": n,
            "edges": [[names[a], names[b], list(ws)] for (a, b), ws in graph.edges.items()],
        },
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def export_graph(tower: Tower, n: int, fmt: str = "dot") -> str:
    tower.level(n)
    if fmt == "dot":
        return to_dot(tower, approx_graph(tower, n))
    if fmt == "structured":
        return to_structured(tower, n)
    raise ValueError(f"unknown export format {fmt!r}")

