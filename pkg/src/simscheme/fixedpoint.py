"""The gluing endofunctor on pairs ``(Z, phiZ: X0 -> Z)``, shift maps and full injectivity."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .address import UltimatelyPeriodicAddress, _transfer, to_mask
from .scheme import FiniteScheme, SchemeError, check_token, is_discrete
from .tower import Tower, cells, preimages
from .unionfind import DisjointSet


@dataclass(frozen=True)
class Pair:
    """A finite space ``Z`` with a map of X0 into it, ``phiZ[x0]`` indexing ``Z``.

    With ``injective_flag`` set the map must be injective; without it the
    pair lives in the enlarged category where collapsing X0 is allowed.
    """

    Z: tuple[str, ...]
    phiZ: tuple[int, ...]
    injective_flag: bool = True

    def __post_init__(self) -> None:
        if not self.Z:
            raise SchemeError("Z is empty")
        if len(set(self.Z)) != len(self.Z):
            raise SchemeError("duplicate token in Z")
        for t in self.Z:
            check_token(t)
        if any(not 0 <= z < len(self.Z) for z in self.phiZ):
            raise SchemeError("phiZ value does not name a Z point")
        if self.injective_flag and len(set(self.phiZ)) != len(self.phiZ):
            raise SchemeError("phiZ is not injective")

    @classmethod
    def from_map(
        cls,
        scheme: FiniteScheme,
        Z: Sequence[str],
        phiZ: Mapping[str, str],
        injective_flag: bool | None = None,
    ) -> Pair:
        """Token-level constructor; the flag defaults to whether ``phiZ`` is injective."""
        Z = tuple(Z)
        index = {z: i for i, z in enumerate(Z)}
        try:
            values = tuple(index[phiZ[x]] for x in scheme.X0)
        except KeyError as exc:
            raise SchemeError(f"phiZ: undefined or undeclared token {exc.args[0]!r}") from None
        if injective_flag is None:
            injective_flag = len(set(values)) == len(values)
        return cls(Z, values, injective_flag)

    @classmethod
    def identity(cls, scheme: FiniteScheme) -> Pair:
        return cls(scheme.X0, tuple(range(len(scheme.X0))))

    @classmethod
    def from_level(cls, tower: Tower, n: int) -> Pair:
        lv = tower.level(n)
        return cls(lv.names, tuple(int(p) for p in lv.emb0))


def functor_quotient(scheme: FiniteScheme, pair: Pair) -> tuple[np.ndarray, Pair]:
    """Apply the scheme to ``pair``; also return the quotient map ``Y x Z -> Zhat``.

    Classes are numbered by their least ``(y, z)`` member.  Union-find takes
    the full transitive closure, which only matters for non-injective pairs.
    """
    k, nz = len(scheme.Y), len(pair.Z)
    groups: dict[int, list[int]] = defaultdict(list)
    for y, row in enumerate(scheme.pi):
        for x0, v in enumerate(row):
            groups[v].append(y * nz + pair.phiZ[x0])
    ds: DisjointSet[int] = DisjointSet()
    for members in groups.values():
        for e in members:
            ds.union(members[0], e)
    least = np.arange(k * nz)
    for e, lead in ds.leaders().items():
        least[e] = lead
    is_leader = least == np.arange(k * nz)
    ids = np.cumsum(is_leader) - 1
    quotient = ids[least].reshape(k, nz)

    names: list[str] = []
    taken: set[str] = set()
    for e in np.flatnonzero(is_leader).tolist():
        y, z = divmod(e, nz)
        name = f"{scheme.Y[y]}:{pair.Z[z]}"
        while name in taken:
            name += "'"
        taken.add(name)
        names.append(name)

    # phi_hat = (X1 -> Zhat) o phi, where X1 -> Zhat sends pi(y, x0) to [(y, phiZ(x0))]
    via_x1 = {}
    for y, row in enumerate(scheme.pi):
        for x0, v in enumerate(row):
            via_x1.setdefault(v, int(quotient[y, pair.phiZ[x0]]))
    phi_hat = tuple(via_x1[v] for v in scheme.phi)
    return quotient, Pair(tuple(names), phi_hat, pair.injective_flag)


def apply_functor(scheme: FiniteScheme, pair: Pair) -> Pair:
    return functor_quotient(scheme, pair)[1]


@dataclass(frozen=True)
class IsoWitness:
    """``theta[z]`` is the image of ``Z[z]``; satisfies ``phiW == theta o phiZ``."""

    theta: tuple[int, ...]

    def describe(self, source: Pair, target: Pair) -> str:
        return " ".join(f"{source.Z[z]}↦{target.Z[w]}" for z, w in enumerate(self.theta))


def find_isomorphism(source: Pair, target: Pair) -> IsoWitness | None:
    """First bijection ``theta`` with ``target.phiZ == theta o source.phiZ``.

    Images of ``phiZ(X0)`` are forced; the remaining points are matched in
    declaration order, which is the least completion since they carry no
    constraint.
    """
    if len(source.Z) != len(target.Z) or len(source.phiZ) != len(target.phiZ):
        return None
    theta: dict[int, int] = {}
    for z, w in zip(source.phiZ, target.phiZ):
        if theta.setdefault(z, w) != w:
            return None
    if len(set(theta.values())) != len(theta):
        return None
    free_targets = iter(w for w in range(len(target.Z)) if w not in set(theta.values()))
    for z in range(len(source.Z)):
        if z not in theta:
            theta[z] = next(free_targets)
    return IsoWitness(tuple(theta[z] for z in range(len(source.Z))))


def is_fixed_point(scheme: FiniteScheme, pair: Pair) -> IsoWitness | None:
    image = apply_functor(scheme, pair)
    if len(image.Z) != len(pair.Z):
        return None
    return find_isomorphism(pair, image)


# shift maps -----------------------------------------------------------------


def shift_map(tower: Tower, y: int, n: int) -> tuple[int, ...]:
    """``x -> project(y, x)`` from ``X_n`` to ``X_{n+1}``."""
    if not 0 <= y < len(tower.scheme.Y):
        raise SchemeError(f"symbol {y} not in Y")
    tower = tower.upto(n + 1)
    return tuple(int(v) for v in tower.level(n + 1).proj[y])


def shift_injective(tower: Tower, y: int, n: int) -> bool:
    images = shift_map(tower, y, n)
    return len(set(images)) == len(images)


# full injectivity ------------------------------------------------------------


class InjectivityStatus(enum.Enum):
    CERTIFIED_FULLY_INJECTIVE = "CERTIFIED_FULLY_INJECTIVE"
    VIOLATION = "VIOLATION"
    NO_VIOLATION_UP_TO_DEPTH = "NO_VIOLATION_UP_TO_DEPTH"


@dataclass(frozen=True)
class Violation:
    """Two distinct points of ``X_level`` whose address sets share ``address``."""

    level: int
    x: int
    x2: int
    address: UltimatelyPeriodicAddress


@dataclass(frozen=True)
class InjectivityReport:
    status: InjectivityStatus
    depth: int
    detail: str = ""
    violation: Violation | None = None


def _lasso(start, successors):
    """Symbols ``(prefix, cycle)`` of a path from ``start`` into a cycle, or None."""
    GRAY, BLACK = 1, 2
    color = {start: GRAY}
    position = {start: 0}
    stack = [(start, iter(successors(start)))]
    path: list[int] = []
    while stack:
        state, it = stack[-1]
        for sym, nxt in it:
            c = color.get(nxt)
            if c is None:
                color[nxt] = GRAY
                position[nxt] = len(stack)
                path.append(sym)
                stack.append((nxt, iter(successors(nxt))))
                break
            if c == GRAY:
                i = position[nxt]
                return path[:i], path[i:] + [sym]
        else:
            color[state] = BLACK
            stack.pop()
            if path:
                path.pop()
    return None


def shared_address(tower: Tower, n: int, x: int, x2: int) -> UltimatelyPeriodicAddress | None:
    """An ultimately periodic address landing on both ``x`` and ``x2``, if any exists.

    Runs the product of the two witness automata; an infinite common path
    exists exactly when a cycle is reachable with both witness sets nonempty.
    """
    tr = _transfer(tower.scheme)
    k = len(tower.scheme.Y)
    pre1, pre2 = preimages(tower, n, x), preimages(tower, n, x2)

    def successors(state):
        m1, m2 = state
        for y in range(k):
            o1, o2 = tr.step(m1, y), tr.step(m2, y)
            if o1 and o2:
                yield y, (o1, o2)

    for w in sorted(set(pre1) & set(pre2)):
        found = _lasso((to_mask(pre1[w]), to_mask(pre2[w])), successors)
        if found is not None:
            prefix, cycle = found
            return UltimatelyPeriodicAddress(w + tuple(prefix), tuple(cycle))
    return None


def injectivity_report(tower: Tower, depth: int) -> InjectivityReport:
    """Certify full injectivity through discreteness, or hunt for a shared address.

    A shared address for two distinct points of one level is an exact
    certificate that the limit identifies them.  Levels ``0..depth-1`` are scanned.
    """
    scheme = tower.scheme
    discrete, _ = is_discrete(scheme)
    if discrete:
        return InjectivityReport(
            InjectivityStatus.CERTIFIED_FULLY_INJECTIVE,
            depth,
            "every level-1 cell meets the embedded X0 in at most one point",
        )
    tower = tower.upto(max(depth - 1, 0))
    for n in range(depth):
        pairs: set[tuple[int, int]] = set()
        lv = tower.level(n)
        # a shared address needs a shared level-n cell
        for c in cells(tower, n):
            pairs.update(combinations(sorted(c.members), 2))
        for x, x2 in sorted(pairs):
            addr = shared_address(tower, n, x, x2)
            if addr is not None:
                return InjectivityReport(
                    InjectivityStatus.VIOLATION,
                    depth,
                    f"points {lv.names[x]} and {lv.names[x2]} of level {n} share an address",
                    Violation(n, x, x2, addr),
                )
    return InjectivityReport(InjectivityStatus.NO_VIOLATION_UP_TO_DEPTH, depth, f"levels 0..{depth - 1} scanned")
