"""The approximation tower ``X0 -> X1 -> X2 -> ...`` of a finite scheme.

Level ``n+1`` is the quotient of ``Y x X_n`` that glues ``(y, e(x0))`` to
``(y', e(x0'))`` whenever ``pi(y, x0) == pi(y', x0')``, where ``e`` is the
embedding of X0 into ``X_n``.  Points of every level are integers
``0..size-1`` ordered by their lexicographically least preimage in
``Y^n x X0`` (symbols and X0 points compared in declaration order).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .scheme import FiniteScheme, SchemeError, Word, validate
from .unionfind import DisjointSet


class TowerError(ValueError):
    """Unbuilt level, unknown point or malformed word."""


class Level:
    """One level ``X_n``; treat as immutable.

    ``proj[y, x]`` is the projection ``Y x X_{n-1} -> X_n``, ``emb[x]`` the
    embedding ``X_{n-1} -> X_n`` and ``emb0[x0]`` the composite embedding of
    X0.  ``leaders[x]`` is the least ``(y, x_{n-1})`` pair projecting to ``x``.
    """

    def __init__(
        self,
        n: int,
        names: tuple[str, ...],
        reps: tuple[tuple[Word, int], ...],
        emb0: np.ndarray,
        emb: np.ndarray | None = None,
        proj: np.ndarray | None = None,
        leaders: np.ndarray | None = None,
    ):
        self.n = n
        self.names = names
        self.reps = reps
        self.emb0 = emb0
        self.emb = emb
        self.proj = proj
        self.leaders = leaders

    def __len__(self) -> int:
        return len(self.names)

    @property
    def size(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"Level(n={self.n}, size={self.size})"

    @cached_property
    def fibers(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Preimages of each point under ``proj``, in ``(y, x)`` order."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.size)]
        if self.proj is not None:
            for (y, x), p in np.ndenumerate(self.proj):
                out[p].append((y, x))
        return tuple(tuple(f) for f in out)

    @cached_property
    def fresh(self) -> frozenset[int]:
        """Points outside the image of the previous level (all of X0 at level 0)."""
        if self.emb is None:
            return frozenset(range(self.size))
        return frozenset(range(self.size)) - frozenset(self.emb.tolist())

    @cached_property
    def emb0_inverse(self) -> dict[int, int]:
        return {int(p): x0 for x0, p in enumerate(self.emb0)}

    @cached_property
    def name_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}


def _level_zero(scheme: FiniteScheme) -> Level:
    n0 = len(scheme.X0)
    return Level(0, scheme.X0, tuple(((), x) for x in range(n0)), np.arange(n0))


def _next_level(scheme: FiniteScheme, prev: Level) -> Level:
    k, size = len(scheme.Y), prev.size
    total = k * size
    # generating pairs only involve embedded X0 points
    groups: dict[int, list[int]] = defaultdict(list)
    for y, row in enumerate(scheme.pi):
        for x0, v in enumerate(row):
            groups[v].append(y * size + int(prev.emb0[x0]))
    ds: DisjointSet[int] = DisjointSet()
    for members in groups.values():
        for e in members:
            ds.union(members[0], e)
    least = np.arange(total)
    for e, lead in ds.leaders().items():
        least[e] = lead
    is_leader = least == np.arange(total)
    ids = np.cumsum(is_leader) - 1
    proj = ids[least].reshape(k, size)
    lead_y, lead_x = np.divmod(np.flatnonzero(is_leader), size)
    leaders = np.stack([lead_y, lead_x], axis=1)
    reps = tuple(
        ((int(y),) + prev.reps[x][0], prev.reps[x][1]) for y, x in zip(lead_y.tolist(), lead_x.tolist())
    )
    n = prev.n + 1
    if n == 1:
        x1_to_id = {scheme.pi[y][x]: int(proj[y, x]) for y in range(k) for x in range(size)}
        emb = np.array([x1_to_id[v] for v in scheme.phi])
        names_by_id = {i: scheme.X1[v] for v, i in x1_to_id.items()}
        names = tuple(names_by_id[i] for i in range(len(reps)))
    else:
        # the squares of the tower commute: emb(proj(y, x)) = proj(y, emb(x))
        emb = proj[prev.leaders[:, 0], prev.emb[prev.leaders[:, 1]]]
        names = tuple(f"{scheme.format_word(w)}:{scheme.X0[x0]}" for w, x0 in reps)
    return Level(n, names, reps, emb[prev.emb0], emb, proj, leaders)


class Tower:
    """Levels ``0..depth`` of a valid scheme.  ``extend`` returns a new tower."""

    def __init__(self, scheme: FiniteScheme, levels: Sequence[Level] | None = None, _cache=None):
        if levels is None:
            report = validate(scheme)
            if not report.ok:
                raise SchemeError("; ".join(msg for _, msg in report.violations))
            levels = (_level_zero(scheme),)
        self.scheme = scheme
        self.levels: tuple[Level, ...] = tuple(levels)
        # tables keyed by (p, q) only depend on levels <= p+q, so towers share them
        self._cache: dict = {} if _cache is None else _cache

    @classmethod
    def build(cls, scheme: FiniteScheme, depth: int) -> Tower:
        return cls(scheme).upto(depth)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def sizes(self) -> list[int]:
        return [lv.size for lv in self.levels]

    def level(self, n: int) -> Level:
        if not 0 <= n <= self.depth:
            raise TowerError(f"level {n} is not built (depth {self.depth})")
        return self.levels[n]

    def extend(self) -> Tower:
        return extend(self)

    def upto(self, n: int) -> Tower:
        t = self
        while t.depth < n:
            t = extend(t)
        return t

    def check_point(self, n: int, x: int) -> int:
        if not 0 <= x < self.level(n).size:
            raise TowerError(f"unknown point {x} at level {n}")
        return x

    def check_word(self, word: Sequence[int]) -> Word:
        k = len(self.scheme.Y)
        word = tuple(word)
        for s in word:
            if not 0 <= s < k:
                raise TowerError(f"symbol {s} not in Y")
        return word

    def label(self, n: int, x: int) -> str:
        return self.level(n).names[self.check_point(n, x)]

    def point(self, n: int, label: str) -> int:
        """Resolve a point by name, by ``#id``, or by an address ``w:x0`` with ``|w| = n``."""
        lv = self.level(n)
        if label in lv.name_index:
            return lv.name_index[label]
        if label.startswith("#") and label[1:].isdigit():
            return self.check_point(n, int(label[1:]))
        if ":" in label:
            w_text, x0_text = label.rsplit(":", 1)
            try:
                w = self.scheme.parse_word(w_text)
                x0 = self.scheme.x0(x0_text)
            except SchemeError as exc:
                raise TowerError(str(exc)) from None
            if len(w) != n:
                raise TowerError(f"address {label!r} has length {len(w)}, expected {n}")
            return project_word(self, w, 0, x0)
        raise TowerError(f"unknown point {label!r} at level {n}")


def extend(tower: Tower) -> Tower:
    nxt = _next_level(tower.scheme, tower.levels[-1])
    return Tower(tower.scheme, (*tower.levels, nxt), _cache=tower._cache)


def embed(tower: Tower, m: int, n: int, p: int) -> int:
    """The embedding ``X_m -> X_n`` applied to ``p``."""
    if m > n:
        raise TowerError(f"cannot embed level {m} into lower level {n}")
    tower.level(n)
    tower.check_point(m, p)
    for j in range(m + 1, n + 1):
        p = int(tower.levels[j].emb[p])
    return p


def project_word(tower: Tower, word: Sequence[int], q: int, x: int) -> int:
    """The projection ``Y^p x X_q -> X_{p+q}`` at ``(word, x)``.

    Folds from the right: the last symbol is applied first.
    """
    word = tower.check_word(word)
    tower.level(q + len(word))
    tower.check_point(q, x)
    for offset, y in enumerate(reversed(word)):
        x = int(tower.levels[q + offset + 1].proj[y, x])
    return x


def word_index(word: Sequence[int], k: int) -> int:
    i = 0
    for s in word:
        i = i * k + s
    return i


def index_word(i: int, p: int, k: int) -> Word:
    out = []
    for _ in range(p):
        i, s = divmod(i, k)
        out.append(s)
    return tuple(reversed(out))


def words(k: int, p: int) -> Iterator[Word]:
    """All words of length p in index order (first symbol most significant)."""
    for i in range(k**p):
        yield index_word(i, p, k)


def projection_table(tower: Tower, p: int, q: int) -> np.ndarray:
    """Array ``T`` with ``T[word_index(w), x] = project_word(w, q, x)``."""
    key = ("proj", p, q)
    if key in tower._cache:
        return tower._cache[key]
    tower.level(p + q)
    if p == 0:
        table = np.arange(tower.levels[q].size)[None, :]
    else:
        k = len(tower.scheme.Y)
        head = projection_table(tower, p - 1, q + 1)
        table = head[:, tower.levels[q + 1].proj].reshape(k**p, tower.levels[q].size)
    tower._cache[key] = table
    return table


def split_table(tower: Tower, p: int, q: int, j: int) -> np.ndarray:
    """``T_{p-j,q+j} o (id x T_{j,q})``; equals ``projection_table(p, q)`` for every j."""
    k = len(tower.scheme.Y)
    head = projection_table(tower, p - j, q + j)
    tail = projection_table(tower, j, q)
    return head[:, tail].reshape(k**p, tower.levels[q].size)


@dataclass(frozen=True)
class CellSet:
    word: Word
    members: frozenset[int]


def cell(tower: Tower, word: Sequence[int]) -> CellSet:
    word = tower.check_word(word)
    members = frozenset(project_word(tower, word, 0, x0) for x0 in range(len(tower.scheme.X0)))
    return CellSet(word, members)


def cells(tower: Tower, n: int) -> list[CellSet]:
    """All cells of level n, in word order."""
    k = len(tower.scheme.Y)
    table = projection_table(tower, n, 0)
    return [CellSet(w, frozenset(table[i].tolist())) for i, w in enumerate(words(k, n))]


def preimages(tower: Tower, n: int, x: int) -> dict[Word, frozenset[int]]:
    """Map each word w of length n with ``x`` in ``cell(w)`` to ``{x0 : project_word(w, 0, x0) == x}``."""
    tower.check_point(n, x)
    key = ("pre", n, x)
    if key in tower._cache:
        return tower._cache[key]
    if n == 0:
        out = {(): frozenset([x])}
    else:
        acc: dict[Word, set[int]] = defaultdict(set)
        for y, xi in tower.levels[n].fibers[x]:
            for w, v in preimages(tower, n - 1, xi).items():
                acc[(y,) + w] |= v
        out = {w: frozenset(v) for w, v in sorted(acc.items())}
    tower._cache[key] = out
    return out


@dataclass(frozen=True)
class BasicEquivalenceWitness:
    k: int
    xi0: int
    xi0prime: int


def decompose(
    tower: Tower, n: int, left: tuple[Sequence[int], int], right: tuple[Sequence[int], int]
) -> BasicEquivalenceWitness:
    """Locate where two distinct presentations of one point of ``X_n`` get glued.

    ``left = (w, xi)`` with ``xi`` a point of ``X_{n-|w|}``.  Walks the words
    from the front: the first position k where the pairs
    ``(w_k, tail_k)`` differ is a single gluing of two embedded X0 points.
    """
    (w, xi), (w2, xi2) = (tuple(left[0]), left[1]), (tuple(right[0]), right[1])
    m = len(w)
    if len(w2) != m or not 1 <= m <= n:
        raise TowerError("words must share a length m with 1 <= m <= n")
    q = n - m
    if (w, xi) == (w2, xi2):
        raise TowerError("pair equal")
    if project_word(tower, w, q, xi) != project_word(tower, w2, q, xi2):
        raise TowerError("projections differ")
    for k in range(1, m + 1):
        tail = project_word(tower, w[k:], q, xi)
        tail2 = project_word(tower, w2[k:], q, xi2)
        if (w[k - 1], tail) != (w2[k - 1], tail2):
            inverse = tower.levels[n - k].emb0_inverse
            if tail not in inverse or tail2 not in inverse:
                raise RuntimeError("gluing of non-embedded points; tower is inconsistent")
            return BasicEquivalenceWitness(k, inverse[tail], inverse[tail2])
    raise RuntimeError("unreachable: distinct pairs with identical tails")
