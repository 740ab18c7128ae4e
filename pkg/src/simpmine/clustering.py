"""Grouping of quasi-identical simplifications.

Two keys are linked when their character-level Levenshtein distance is at
most a radius (default 2); clusters are the connected components of that
graph. The all-pairs computation prunes on length difference and uses a
band-limited distance with early exit, since key sets can be large.
Distances are computed on raw keys (no case folding): the small radius is
what absorbs plural forms and case variation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert / delete / substitute) over characters."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        current = [i + 1]
        for j, cb in enumerate(b):
            current.append(min(previous[j + 1] + 1,       # deletion from a
                               current[j] + 1,            # insertion into a
                               previous[j] + (ca != cb)))  # substitution
        previous = current
    return previous[-1]


def within_distance(a: str, b: str, radius: int) -> bool:
    """True iff levenshtein(a, b) <= radius; band-limited with early exit."""
    la, lb = len(a), len(b)
    if abs(la - lb) > radius:
        return False
    if radius == 0:
        return a == b
    if la < lb:
        a, b, la, lb = b, a, lb, la
    big = radius + 1  # any value > radius acts as infinity
    previous = [j if j <= radius else big for j in range(lb + 1)]
    for i in range(1, la + 1):
        lo = max(1, i - radius)
        hi = min(lb, i + radius)
        current = [i] + [big] * lb
        if lo > 1:
            current[lo - 1] = big
        ca = a[i - 1]
        row_min = current[0] if lo == 1 else big
        for j in range(lo, hi + 1):
            cost = min(previous[j] + 1,
                       current[j - 1] + 1,
                       previous[j - 1] + (ca != b[j - 1]))
            if cost > radius:
                cost = big
            current[j] = cost
            if cost < row_min:
                row_min = cost
        if row_min > radius:
            return False
        previous = current
    return previous[lb] <= radius


@dataclass(frozen=True)
class Cluster:
    id: int
    members: frozenset[str]
    representative: str


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _pick_representative(members: Sequence[str], pair_counts: Mapping[str, int]) -> str:
    return min(members, key=lambda k: (-pair_counts.get(k, 0), k))


def cluster_simplifications(
    keys: Iterable[str],
    radius: int = 2,
    pair_counts: Optional[Mapping[str, int]] = None,
) -> list[Cluster]:
    """Connected components of the distance-<=radius graph over the keys.

    The representative of a cluster is its member with the highest pair
    count (ties broken lexicographically); without counts every key counts
    as 0 so the representative is the lexicographically smallest member.
    Cluster ids are assigned in order of each cluster's smallest key, so
    the result is deterministic for a given key set.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    ordered = sorted(set(keys))
    counts = pair_counts or {}
    uf = _UnionFind(len(ordered))
    # Sorting by length lets the inner loop stop once the length gap alone
    # exceeds the radius.
    by_length = sorted(range(len(ordered)), key=lambda i: len(ordered[i]))
    for pos, i in enumerate(by_length):
        ki = ordered[i]
        for j in by_length[pos + 1:]:
            kj = ordered[j]
            if len(kj) - len(ki) > radius:
                break
            if uf.find(i) == uf.find(j):
                continue
            if within_distance(ki, kj, radius):
                uf.union(i, j)
    components: dict[int, list[str]] = {}
    for i, key in enumerate(ordered):
        components.setdefault(uf.find(i), []).append(key)
    clusters = []
    for cid, root in enumerate(sorted(components, key=lambda r: ordered[r])):
        members = components[root]
        clusters.append(Cluster(
            id=cid,
            members=frozenset(members),
            representative=_pick_representative(members, counts),
        ))
    return clusters


def cluster_of(clusters: Sequence[Cluster]) -> dict[str, Cluster]:
    lookup: dict[str, Cluster] = {}
    for cluster in clusters:
        for member in cluster.members:
            lookup[member] = cluster
    return lookup


def expand_selection(selected: Iterable[str], clusters: Sequence[Cluster]) -> set[str]:
    """Union of the full member sets of every cluster touching the selection."""
    lookup = cluster_of(clusters)
    expanded: set[str] = set()
    for key in selected:
        if key not in lookup:
            raise KeyError(f"key not present in clustering: {key!r}")
        expanded.update(lookup[key].members)
    return expanded
