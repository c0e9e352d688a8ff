"""Infinite addresses and the sets of addresses that land on a given point.

An address ``u.v.v.v...`` lands on ``x`` in ``X_n`` when, for every
``p >= n``, the embedded copy of ``x`` in ``X_p`` lies in the cell of the
length-p prefix.  Membership is decided with a subset automaton over X0:
the witness set after p symbols is ``{x0 : prefix projects x0 onto x}``
and it evolves one symbol at a time through ``step``.
"""

from __future__ import annotations

import enum
import math
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .scheme import FiniteScheme, SchemeError, Word
from .tower import Tower, TowerError, cell, preimages, project_word
from .unionfind import DisjointSet


@dataclass(frozen=True)
class UltimatelyPeriodicAddress:
    """The address ``u v v v ...``; stored with shortest ``u`` and primitive ``v``."""

    u: Word
    v: Word

    def __post_init__(self) -> None:
        u, v = tuple(self.u), tuple(self.v)
        if not v:
            raise ValueError("period must be nonempty")
        for d in range(1, len(v) + 1):
            if len(v) % d == 0 and v[:d] * (len(v) // d) == v:
                v = v[:d]
                break
        while u and u[-1] == v[-1]:
            u, v = u[:-1], v[-1:] + v[:-1]
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def symbol(self, i: int) -> int:
        if i < len(self.u):
            return self.u[i]
        return self.v[(i - len(self.u)) % len(self.v)]

    def prefix(self, p: int) -> Word:
        return tuple(self.symbol(i) for i in range(p))

    def shift(self, k: int = 1) -> UltimatelyPeriodicAddress:
        if k <= len(self.u):
            return UltimatelyPeriodicAddress(self.u[k:], self.v)
        r = (k - len(self.u)) % len(self.v)
        return UltimatelyPeriodicAddress((), self.v[r:] + self.v[:r])

    def first_difference(self, other: UltimatelyPeriodicAddress) -> int | None:
        """1-based position of the first differing symbol, None if equal."""
        horizon = max(len(self.u), len(other.u)) + math.lcm(len(self.v), len(other.v))
        for i in range(horizon):
            if self.symbol(i) != other.symbol(i):
                return i + 1
        return None


_ADDRESS = re.compile(r"^\s*([^()]*)\(([^()]+)\)\s*$")


def parse_address(scheme: FiniteScheme, text: str) -> UltimatelyPeriodicAddress:
    """Parse ``u(v)``, e.g. ``01(10)``; comma-separated symbols when they are multi-character."""
    m = _ADDRESS.match(text)
    if not m:
        raise SchemeError(f"malformed address {text!r}; expected u(v)")
    u_text = m.group(1).strip().rstrip(",")
    return UltimatelyPeriodicAddress(scheme.parse_word(u_text), scheme.parse_word(m.group(2)))


def format_address(scheme: FiniteScheme, a: UltimatelyPeriodicAddress) -> str:
    u = scheme.format_word(a.u)
    if u and not scheme.single_char_symbols:
        u += ","
    return f"{u}({scheme.format_word(a.v)})"


def random_address(rng: random.Random, k: int, max_prefix: int = 4, max_period: int = 3) -> UltimatelyPeriodicAddress:
    u = tuple(rng.randrange(k) for _ in range(rng.randint(0, max_prefix)))
    v = tuple(rng.randrange(k) for _ in range(rng.randint(1, max_period)))
    return UltimatelyPeriodicAddress(u, v)


# transfer automaton -------------------------------------------------------


class _Transfer:
    """Witness sets as bitmasks over X0."""

    def __init__(self, scheme: FiniteScheme):
        self.scheme = scheme
        n0 = len(scheme.X0)
        # pre[y][x1]: bits of x0 with pi(y, x0) == x1
        self.pre = [[0] * len(scheme.X1) for _ in scheme.Y]
        for y, row in enumerate(scheme.pi):
            for x0, v in enumerate(row):
                self.pre[y][v] |= 1 << x0
        self.single = [[self.pre[y][scheme.phi[x]] for x in range(n0)] for y in range(len(scheme.Y))]
        self._memo: dict[tuple[int, int], int] = {}

    def step(self, mask: int, y: int) -> int:
        key = (mask, y)
        out = self._memo.get(key)
        if out is None:
            out = 0
            row = self.single[y]
            m, i = mask, 0
            while m:
                if m & 1:
                    out |= row[i]
                m >>= 1
                i += 1
            self._memo[key] = out
        return out


@lru_cache(maxsize=64)
def _transfer(scheme: FiniteScheme) -> _Transfer:
    return _Transfer(scheme)


def to_mask(points: Iterable[int]) -> int:
    mask = 0
    for p in points:
        mask |= 1 << p
    return mask


def from_mask(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def step(scheme: FiniteScheme, witnesses: Iterable[int], y: int) -> frozenset[int]:
    """``{x0 : pi(y, x0) in phi(witnesses)}``: the witness set one symbol deeper."""
    if not 0 <= y < len(scheme.Y):
        raise SchemeError(f"symbol {y} not in Y")
    return from_mask(_transfer(scheme).step(to_mask(witnesses), y))


def run_transfer(scheme: FiniteScheme, witnesses: Iterable[int], word: Sequence[int]) -> frozenset[int]:
    tr = _transfer(scheme)
    mask = to_mask(witnesses)
    for y in word:
        mask = tr.step(mask, y)
    return from_mask(mask)


# shadows -------------------------------------------------------------------


@dataclass(frozen=True)
class ShadowTree:
    """Depth-``depth`` truncation of the addresses landing on point ``x`` of ``X_n``.

    ``nodes`` maps every word of length ``n..depth`` in the tree to its witness set.
    """

    n: int
    x: int
    depth: int
    nodes: dict[Word, frozenset[int]] = field(compare=False)

    def words_at(self, k: int) -> list[Word]:
        return sorted(w for w in self.nodes if len(w) == k)

    def leaves(self) -> list[Word]:
        return self.words_at(self.depth)

    def children(self, word: Word) -> list[Word]:
        return sorted(w for w in self.nodes if len(w) == len(word) + 1 and w[:-1] == word)


def shadow(tower: Tower, n: int, x: int, p: int) -> ShadowTree:
    if p < n:
        raise TowerError(f"shadow depth {p} below base level {n}")
    tower.check_point(n, x)
    tr = _transfer(tower.scheme)
    k = len(tower.scheme.Y)
    frontier = {w: to_mask(v) for w, v in preimages(tower, n, x).items()}
    nodes = {w: from_mask(m) for w, m in frontier.items()}
    for _ in range(n, p):
        nxt = {}
        for w, mask in frontier.items():
            for y in range(k):
                out = tr.step(mask, y)
                if out:
                    nxt[w + (y,)] = out
        frontier = nxt
        nodes.update((w, from_mask(m)) for w, m in nxt.items())
    return ShadowTree(n, x, p, nodes)


def seed_mask(tower: Tower, n: int, x: int, word: Sequence[int]) -> int:
    """Bits of ``x0`` with ``project_word(word, 0, x0) == x``, ``len(word) == n``."""
    return to_mask(x0 for x0 in range(len(tower.scheme.X0)) if project_word(tower, word, 0, x0) == x)


def gamma_contains(tower: Tower, n: int, x: int, addr: UltimatelyPeriodicAddress) -> bool:
    """Exact membership of an ultimately periodic address in the address set of ``x``."""
    tower = tower.upto(n)
    tower.check_point(n, x)
    tr = _transfer(tower.scheme)
    mask = seed_mask(tower, n, x, addr.prefix(n))
    lu, lv = len(addr.u), len(addr.v)
    seen: set[tuple[int, int]] = set()
    p = n
    while mask:
        if p >= lu:
            state = ((p - lu) % lv, mask)
            if state in seen:
                return True
            seen.add(state)
        mask = tr.step(mask, addr.symbol(p))
        p += 1
    return False


# relations -----------------------------------------------------------------


class Verdict(enum.Enum):
    RELATED = "RELATED"
    UNRELATED = "UNRELATED"
    UNKNOWN_UP_TO_BOUND = "UNKNOWN_UP_TO_BOUND"


@dataclass(frozen=True)
class RelationEvidence:
    verdict: Verdict
    witness: tuple[int, int] | None = None
    bound: int = 0
    reason: str = ""
    case: int | None = None
    glue: tuple[int, int] | None = None

    @property
    def definite(self) -> bool:
        return self.verdict is not Verdict.UNKNOWN_UP_TO_BOUND


def related(
    tower: Tower, a1: UltimatelyPeriodicAddress, a2: UltimatelyPeriodicAddress, maxlevel: int
) -> RelationEvidence:
    """Search levels ``0..maxlevel`` for a point whose address set holds both addresses.

    A gluing that identifies two distinct addresses always happens at or
    before the first position where they differ, so once ``maxlevel``
    reaches that position an empty search is a proof of ``UNRELATED``.
    """
    if a1 == a2:
        return RelationEvidence(Verdict.RELATED, None, maxlevel, "equal addresses")
    d = a1.first_difference(a2)
    assert d is not None
    top = min(maxlevel, d)
    tower = tower.upto(top)
    for n in range(top + 1):
        shared = cell(tower, a1.prefix(n)).members & cell(tower, a2.prefix(n)).members
        fresh = tower.level(n).fresh
        for x in sorted(shared):
            # embedded points carry the address set of their preimage, already tried
            if x not in fresh:
                continue
            if gamma_contains(tower, n, x, a1) and gamma_contains(tower, n, x, a2):
                return RelationEvidence(Verdict.RELATED, (n, x), maxlevel, "shared point")
    if maxlevel >= d:
        return RelationEvidence(Verdict.UNRELATED, None, maxlevel, f"no shared point up to level {d}")
    return RelationEvidence(Verdict.UNKNOWN_UP_TO_BOUND, None, maxlevel, f"first difference at {d}")


def hat_related(
    tower: Tower, a1: UltimatelyPeriodicAddress, a2: UltimatelyPeriodicAddress, maxlevel: int
) -> RelationEvidence:
    """The one-step-unfolded relation: same first symbol and related tails, or a gluing at X1.

    Case 1 (same first symbol) defers to ``related`` on the tails; case 2
    is an exact check over pairs ``(x0, x0')`` glued by ``pi``.
    """
    if a1 == a2:
        return RelationEvidence(Verdict.RELATED, None, maxlevel, "equal addresses")
    scheme = tower.scheme
    y1, y2 = a1.symbol(0), a2.symbol(0)
    t1, t2 = a1.shift(1), a2.shift(1)
    tail_verdict = Verdict.UNRELATED
    if y1 == y2:
        ev = related(tower, t1, t2, maxlevel)
        if ev.verdict is Verdict.RELATED:
            return RelationEvidence(Verdict.RELATED, ev.witness, maxlevel, "related tails", case=1)
        tail_verdict = ev.verdict
    n0 = range(len(scheme.X0))
    in1 = [gamma_contains(tower, 0, x, t1) for x in n0]
    in2 = [gamma_contains(tower, 0, x, t2) for x in n0]
    for x, x2 in product(n0, n0):
        if in1[x] and in2[x2] and scheme.pi[y1][x] == scheme.pi[y2][x2]:
            return RelationEvidence(Verdict.RELATED, None, maxlevel, "glued at level 1", case=2, glue=(x, x2))
    if tail_verdict is Verdict.UNKNOWN_UP_TO_BOUND:
        return RelationEvidence(Verdict.UNKNOWN_UP_TO_BOUND, None, maxlevel, "tails undecided")
    return RelationEvidence(Verdict.UNRELATED, None, maxlevel, "neither clause holds")


class WitnessClosure:
    """Equivalence generated by RELATED evidence: addresses sharing a witness point are merged."""

    def __init__(self) -> None:
        self._ds: DisjointSet = DisjointSet()

    def add(self, a1: UltimatelyPeriodicAddress, a2: UltimatelyPeriodicAddress, ev: RelationEvidence) -> None:
        self._ds.add(("addr", a1))
        self._ds.add(("addr", a2))
        if ev.verdict is not Verdict.RELATED:
            return
        self._ds.union(("addr", a1), ("addr", a2))
        if ev.witness is not None:
            self._ds.union(("addr", a1), ("point", ev.witness))

    def related(self, a1: UltimatelyPeriodicAddress, a2: UltimatelyPeriodicAddress) -> bool:
        if a1 == a2:
            return True
        k1, k2 = ("addr", a1), ("addr", a2)
        return k1 in self._ds and k2 in self._ds and self._ds.same(k1, k2)
