"""Disjoint sets over hashable elements."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable


class UnionFind:
    """Union-find with path compression and union by size.

    ``key`` orders elements; the representative reported by :meth:`classes`
    is the least element of each class under it, independently of the
    order of the unions.
    """

    def __init__(self, elements: Iterable[Hashable] = (), key: Callable | None = None):
        self.parent: dict = {}
        self.size: dict = {}
        self.key = key
        for x in elements:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def __contains__(self, x) -> bool:
        return x in self.parent

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True

    def same(self, x, y) -> bool:
        return self.find(x) == self.find(y)

    def classes(self) -> dict:
        """Map canonical representative -> sorted list of members."""
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        out = {}
        for members in groups.values():
            members.sort(key=self.key)
            out[members[0]] = members
        return dict(sorted(out.items(), key=lambda kv: self.key(kv[0]) if self.key else kv[0]))

    def canonical(self) -> dict:
        """Map every element to the canonical representative of its class."""
        out = {}
        for rep, members in self.classes().items():
            for x in members:
                out[x] = rep
        return out
