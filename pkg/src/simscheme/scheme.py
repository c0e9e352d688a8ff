"""Finite similarity schemes ``X0 --phi--> X1 <--pi-- Y x X0``.

A scheme is stored by index: ``phi[i]`` is the X1 index of the image of
the i-th X0 point and ``pi[y][i]`` the X1 index of ``(y, X0[i])``.
Declaration order of every token list is significant; it drives all
deterministic tie-breaking downstream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

FORBIDDEN_TOKEN_CHARS = frozenset("#(),")

Word = tuple[int, ...]


class SchemeError(ValueError):
    """Structurally malformed scheme data (undeclared or duplicate tokens, partial maps)."""


def check_token(token: str) -> None:
    if not token or any(c.isspace() or c in FORBIDDEN_TOKEN_CHARS for c in token):
        raise SchemeError(f"invalid token {token!r}")


def _check_tokens(kind: str, tokens: Sequence[str]) -> None:
    if not tokens:
        raise SchemeError(f"{kind} is empty")
    seen: set[str] = set()
    for t in tokens:
        check_token(t)
        if t in seen:
            raise SchemeError(f"duplicate token {t!r} in {kind}")
        seen.add(t)


@dataclass(frozen=True)
class FiniteScheme:
    Y: tuple[str, ...]
    X0: tuple[str, ...]
    X1: tuple[str, ...]
    phi: tuple[int, ...]
    pi: tuple[tuple[int, ...], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        for kind, tokens in (("Y", self.Y), ("X0", self.X0), ("X1", self.X1)):
            _check_tokens(kind, tokens)
        n1 = len(self.X1)
        if len(self.phi) != len(self.X0):
            raise SchemeError("phi must be defined on every X0 point")
        if len(self.pi) != len(self.Y) or any(len(row) != len(self.X0) for row in self.pi):
            raise SchemeError("pi must be defined on every (y, x0) pair")
        for v in (*self.phi, *(v for row in self.pi for v in row)):
            if not 0 <= v < n1:
                raise SchemeError(f"map value {v} does not name an X1 point")
        object.__setattr__(
            self,
            "_index",
            {
                "Y": {t: i for i, t in enumerate(self.Y)},
                "X0": {t: i for i, t in enumerate(self.X0)},
                "X1": {t: i for i, t in enumerate(self.X1)},
            },
        )

    @classmethod
    def from_maps(
        cls,
        Y: Sequence[str],
        X0: Sequence[str],
        X1: Sequence[str],
        phi: Mapping[str, str],
        pi: Mapping[tuple[str, str], str],
    ) -> FiniteScheme:
        """Build a scheme from token-level maps; every referenced token must be declared."""
        Y, X0, X1 = tuple(Y), tuple(X0), tuple(X1)
        for kind, tokens in (("Y", Y), ("X0", X0), ("X1", X1)):
            _check_tokens(kind, tokens)
        x1 = {t: i for i, t in enumerate(X1)}

        def lookup(token: str) -> int:
            if token not in x1:
                raise SchemeError(f"undeclared X1 token {token!r}")
            return x1[token]

        for key in phi:
            if key not in X0:
                raise SchemeError(f"undeclared X0 token {key!r} in phi")
        for y, x in pi:
            if y not in Y:
                raise SchemeError(f"undeclared Y token {y!r} in pi")
            if x not in X0:
                raise SchemeError(f"undeclared X0 token {x!r} in pi")
        try:
            phi_idx = tuple(lookup(phi[x]) for x in X0)
        except KeyError as exc:
            raise SchemeError(f"phi is not defined at {exc.args[0]!r}") from None
        try:
            pi_idx = tuple(tuple(lookup(pi[(y, x)]) for x in X0) for y in Y)
        except KeyError as exc:
            raise SchemeError(f"pi is not defined at {exc.args[0]!r}") from None
        return cls(Y, X0, X1, phi_idx, pi_idx)

    # token helpers

    def y(self, token: str) -> int:
        return self._lookup("Y", token)

    def x0(self, token: str) -> int:
        return self._lookup("X0", token)

    def x1(self, token: str) -> int:
        return self._lookup("X1", token)

    def _lookup(self, kind: str, token: str) -> int:
        try:
            return self._index[kind][token]
        except KeyError:
            raise SchemeError(f"unknown {kind} token {token!r}") from None

    @property
    def phi_map(self) -> dict[str, str]:
        return {x: self.X1[v] for x, v in zip(self.X0, self.phi)}

    @property
    def pi_map(self) -> dict[tuple[str, str], str]:
        return {
            (y, x): self.X1[self.pi[j][i]]
            for j, y in enumerate(self.Y)
            for i, x in enumerate(self.X0)
        }

    @property
    def single_char_symbols(self) -> bool:
        return all(len(s) == 1 for s in self.Y)

    def format_word(self, word: Sequence[int]) -> str:
        sep = "" if self.single_char_symbols else ","
        return sep.join(self.Y[s] for s in word)

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if not text:
            return ()
        if "," in text or not self.single_char_symbols:
            parts = [p.strip() for p in text.split(",")]
        else:
            parts = list(text)
        return tuple(self.y(p) for p in parts)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(scheme: FiniteScheme) -> ValidationReport:
    """Check that phi is injective and pi is surjective, with witnesses."""
    violations: list[tuple[str, str]] = []
    for i, j in combinations(range(len(scheme.X0)), 2):
        if scheme.phi[i] == scheme.phi[j]:
            a, b = scheme.X0[i], scheme.X0[j]
            violations.append(
                ("phi-injective", f"phi not injective: phi({a}) = phi({b}) = {scheme.X1[scheme.phi[i]]}")
            )
    hit = {v for row in scheme.pi for v in row}
    for k, name in enumerate(scheme.X1):
        if k not in hit:
            violations.append(("pi-surjective", f"pi not surjective: {name} has no preimage"))
    return ValidationReport(tuple(violations))


def essential_part(scheme: FiniteScheme) -> frozenset[str]:
    """X0 points glued to a point of a copy with a different symbol."""
    out: set[int] = set()
    pi = scheme.pi
    for y, y2 in combinations(range(len(scheme.Y)), 2):
        for i in range(len(scheme.X0)):
            for j in range(len(scheme.X0)):
                if pi[y][i] == pi[y2][j]:
                    out.update((i, j))
    return frozenset(scheme.X0[i] for i in out)


def is_discrete(scheme: FiniteScheme) -> tuple[bool, tuple[str, str, str] | None]:
    """Whether every level-1 cell meets phi(X0) in at most one point.

    On failure returns the witness ``(y, p, q)`` with ``p != q`` both in the
    cell of ``y`` and in ``phi(X0)`` (X1 tokens).
    """
    image = set(scheme.phi)
    for y, row in enumerate(scheme.pi):
        hits = sorted({v for v in row if v in image})
        if len(hits) > 1:
            return False, (scheme.Y[y], scheme.X1[hits[0]], scheme.X1[hits[1]])
    return True, None


def random_scheme(seed: int, max_symbols: int = 4, max_points: int = 4) -> FiniteScheme:
    """A seeded random valid scheme with ``|Y| <= max_symbols`` and ``|X0| <= max_points``."""
    rng = random.Random(seed)
    ny = rng.randint(1, max_symbols)
    n0 = rng.randint(1, max_points)
    n1 = rng.randint(n0, ny * n0)
    cells = [(y, x) for y in range(ny) for x in range(n0)]
    rng.shuffle(cells)
    # the first n1 pairs guarantee surjectivity
    value = {c: k for k, c in enumerate(cells[:n1])}
    for c in cells[n1:]:
        value[c] = rng.randrange(n1)
    phi = tuple(rng.sample(range(n1), n0))
    pi = tuple(tuple(value[(y, x)] for x in range(n0)) for y in range(ny))
    return FiniteScheme(
        tuple(str(y) for y in range(ny)),
        tuple("abcd"[x] if max_points <= 4 else f"p{x}" for x in range(n0)),
        tuple(f"q{k}" for k in range(n1)),
        phi,
        pi,
    )
