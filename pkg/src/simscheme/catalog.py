"""Ready-made schemes: the diagonal folding family and the two degenerate two-symbol schemes."""

from __future__ import annotations

from .scheme import FiniteScheme


def diagonal(k: int) -> FiniteScheme:
    """``Y = X0 = {0..k-1}``, ``X1`` the unordered pairs, ``phi(y) = {y, y}``.

    k=2 approximates an interval, k=3 the Sierpinski gasket.
    """
    if k < 1:
        raise ValueError("diagonal scheme needs at least one symbol")
    sym = [str(i) for i in range(k)]
    sep = "" if k <= 10 else "_"

    def pair(i: int, j: int) -> str:
        i, j = min(i, j), max(i, j)
        return ("d" if i == j else "m") + sym[i] + sep + sym[j]

    x1 = [pair(i, j) for i in range(k) for j in range(i, k)]
    phi = {sym[i]: pair(i, i) for i in range(k)}
    pi = {(sym[i], sym[j]): pair(i, j) for i in range(k) for j in range(k)}
    return FiniteScheme.from_maps(sym, sym, x1, phi, pi)


def not_fully_injective() -> FiniteScheme:
    """``Y={0,1}``, ``X0={a,b}``, ``X1 = Y x X0 / (0,a)~(1,a)``, ``phi(x) = [(0,x)]``."""
    return FiniteScheme.from_maps(
        ["0", "1"],
        ["a", "b"],
        ["a1", "0b", "1b"],
        {"a": "a1", "b": "0b"},
        {("0", "a"): "a1", ("1", "a"): "a1", ("0", "b"): "0b", ("1", "b"): "1b"},
    )


def nonunique() -> FiniteScheme:
    """``Y={0,1}``, ``X0={a,b,c}``, gluing ``(0,a)~(1,a)`` and ``(0,c)~(1,c)``."""
    return FiniteScheme.from_maps(
        ["0", "1"],
        ["a", "b", "c"],
        ["a1", "c1", "0b", "1b"],
        {"a": "a1", "b": "0b", "c": "c1"},
        {
            ("0", "a"): "a1",
            ("1", "a"): "a1",
            ("0", "b"): "0b",
            ("1", "b"): "1b",
            ("0", "c"): "c1",
            ("1", "c"): "c1",
        },
    )


def singleton() -> FiniteScheme:
    return FiniteScheme.from_maps(["0"], ["o"], ["o1"], {"o": "o1"}, {("0", "o"): "o1"})


def reference_schemes() -> dict[str, FiniteScheme]:
    return {
        "diag2": diagonal(2),
        "nfi": not_fully_injective(),
        "nonunique": nonunique(),
    }
