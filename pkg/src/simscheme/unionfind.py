"""Disjoint-set forest with deterministic class leaders."""

from __future__ import annotations

from collections import defaultdict
from typing import Generic, Hashable, Iterable, TypeVar

T = TypeVar("T", bound=Hashable)


class DisjointSet(Generic[T]):
    def __init__(self, elements: Iterable[T] = ()):
        self.parent: dict[T, T] = {}
        self.size: dict[T, int] = {}
        for e in elements:
            self.add(e)

    def add(self, e: T) -> None:
        if e not in self.parent:
            self.parent[e] = e
            self.size[e] = 1

    def __contains__(self, e: object) -> bool:
        return e in self.parent

    def __len__(self) -> int:
        return len(self.parent)

    def find(self, e: T) -> T:
        self.add(e)
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        # path compression
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, a: T, b: T) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def same(self, a: T, b: T) -> bool:
        return self.find(a) == self.find(b)

    def classes(self) -> list[list[T]]:
        """Classes as sorted lists, ordered by their least element.

        Elements must be mutually comparable.
        """
        groups: dict[T, list[T]] = defaultdict(list)
        for e in self.parent:
            groups[self.find(e)].append(e)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])

    def leaders(self) -> dict[T, T]:
        """Map every element to the least element of its class."""
        out: dict[T, T] = {}
        for group in self.classes():
            for e in group:
                out[e] = group[0]
        return out
