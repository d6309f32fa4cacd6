"""Information-set invariants and clique censuses for RM(2,5).

The clique graph has the 2-flats lying entirely inside V_J as vertices; two
flats are adjacent when they share at most one point.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from . import gf2
from .code import CodeSpec, is_information_set
from .geometry import Flat, enumerate_flats


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class InfoSetInvariants:
    a: int
    n: tuple[int, ...]
    c: int
    n_max: int

    def row(self) -> tuple[int, ...]:
        return (self.a, *self.n, self.c, self.n_max)


@dataclass
class CliqueGraph:
    flats: list[Flat]
    adj: list[int]  # bitset of neighbours per vertex

    @classmethod
    def from_flats(cls, flats: Sequence[Flat]) -> "CliqueGraph":
        flats = list(flats)
        adj = [0] * len(flats)
        for i, j in combinations(range(len(flats)), 2):
            if (flats[i].mask & flats[j].mask).bit_count() <= 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        return cls(flats, adj)

    def __len__(self) -> int:
        return len(self.flats)

    def degeneracy_order(self) -> list[int]:
        n = len(self.adj)
        alive = (1 << n) - 1
        order = []
        while alive:
            v = min((i for i in range(n) if alive >> i & 1), key=lambda i: (self.adj[i] & alive).bit_count())
            order.append(v)
            alive &= ~(1 << v)
        return order

    def relabel(self, order: Sequence[int]) -> "CliqueGraph":
        pos = {v: i for i, v in enumerate(order)}
        adj = []
        for v in order:
            row = 0
            nb = self.adj[v]
            while nb:
                low = nb & -nb
                row |= 1 << pos[low.bit_length() - 1]
                nb ^= low
            adj.append(row)
        return CliqueGraph([self.flats[v] for v in order], adj)


def _points_mask(spec: CodeSpec, J: Sequence[int]) -> int:
    mask = 0
    for j in J:
        mask |= 1 << spec.ordering.points[j]
    return mask


def inner_flats(spec: CodeSpec, J: Sequence[int], flats: Sequence[Flat] | None = None) -> list[Flat]:
    """The r-flats with every point in V_J."""
    vmask = _points_mask(spec, J)
    flats = flats if flats is not None else enumerate_flats(spec.m, spec.r)
    return [f for f in flats if f.mask & vmask == f.mask]


def intersection_profile(spec: CodeSpec, J: Sequence[int], flats: Sequence[Flat] | None = None) -> tuple[int, ...]:
    """n_i = number of r-flats meeting V_J in exactly i points."""
    vmask = _points_mask(spec, J)
    flats = flats if flats is not None else enumerate_flats(spec.m, spec.r)
    n = [0] * ((1 << spec.r) + 1)
    for f in flats:
        n[(f.mask & vmask).bit_count()] += 1
    return tuple(n)


def affine_independent_count(points: Sequence[int], size: int) -> int:
    """Number of ``size``-subsets whose difference vectors to the first have full rank."""
    count = 0
    want = size - 1
    for sub in combinations(points, size):
        p0 = sub[0]
        if gf2.rank(p ^ p0 for p in sub[1:]) == want:
            count += 1
    return count


def clique_counts(graph: CliqueGraph, min_size: int = 1) -> dict[int, int]:
    """Number of cliques of every size >= min_size (each clique counted once)."""
    g = graph.relabel(graph.degeneracy_order())
    n = len(g)
    # forward neighbourhoods: neighbours later in the order
    fwd = [g.adj[v] & ~((1 << (v + 1)) - 1) for v in range(n)]
    counts: dict[int, int] = {}

    def grow(size: int, cand: int) -> None:
        if size >= min_size:
            counts[size] = counts.get(size, 0) + 1
        if size + cand.bit_count() < min_size:
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nxt = cand & fwd[v]
            if size + 1 + nxt.bit_count() >= min_size:
                grow(size + 1, nxt)
            elif size + 1 >= min_size:
                counts[size + 1] = counts.get(size + 1, 0) + 1

    for v in range(n):
        grow(1, fwd[v])
    return dict(sorted(counts.items()))


def iter_cliques(graph: CliqueGraph, min_size: int, max_size: int | None = None):
    """Yield every clique with min_size <= size <= max_size as a tuple of vertex indices of ``graph``."""
    order = graph.degeneracy_order()
    g = graph.relabel(order)
    n = len(g)
    fwd = [g.adj[v] & ~((1 << (v + 1)) - 1) for v in range(n)]
    cap = max_size if max_size is not None else n
    stack: list[int] = []

    def grow(cand: int):
        size = len(stack)
        if size >= min_size:
            yield tuple(order[v] for v in stack)
        if size == cap:
            return
        while cand:
            if size + cand.bit_count() < min_size:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            stack.append(v)
            yield from grow(cand & fwd[v])
            stack.pop()

    yield from grow((1 << n) - 1)


def maximum_cliques(graph: CliqueGraph) -> tuple[int, int]:
    """(size of a maximum clique, number of maximum cliques) by branch and bound."""
    n = len(graph)
    if n == 0:
        return 0, 0
    adj = graph.adj
    best = [0, 0]

    def expand(size: int, cand: int) -> None:
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, 1
            elif size == best[0]:
                best[1] += 1
            return
        while cand:
            if size + cand.bit_count() < best[0]:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            expand(size + 1, cand & adj[v])

    expand(0, (1 << n) - 1)
    return best[0], best[1]


def clique_graph(spec: CodeSpec, J: Sequence[int]) -> CliqueGraph:
    return CliqueGraph.from_flats(inner_flats(spec, J))


def _rm25(spec: CodeSpec | None) -> CodeSpec:
    spec = spec or CodeSpec(2, 5)
    if (spec.r, spec.m) != (2, 5):
        raise AnalysisError("these invariants are defined for RM(2,5)")
    return spec


def invariants(J: Sequence[int], spec: CodeSpec | None = None) -> InfoSetInvariants:
    spec = _rm25(spec)
    J = tuple(sorted(J))
    if len(J) != spec.k or len(set(J)) != spec.k or not is_information_set(spec, J):
        raise AnalysisError(f"{J} is not an information set of {spec}")
    pts = [spec.ordering.points[j] for j in J]
    a = affine_independent_count(pts, spec.m + 1)
    flats = enumerate_flats(spec.m, spec.r)
    n = intersection_profile(spec, J, flats)
    c, n_max = maximum_cliques(CliqueGraph.from_flats(inner_flats(spec, J, flats)))
    return InfoSetInvariants(a, n, c, n_max)


def clique_census(J: Sequence[int], min_size: int = 9, spec: CodeSpec | None = None) -> dict[int, int]:
    """Counts of (not necessarily maximal) cliques by size, for sizes >= min_size."""
    spec = _rm25(spec)
    return clique_counts(clique_graph(spec, J), min_size)


def distinct_orbits(reps: Sequence[Sequence[int]], spec: CodeSpec | None = None) -> bool:
    """True iff every rep is an information set and their ``a`` values are pairwise distinct.

    ``a`` is preserved by affine maps, so distinct values certify distinct
    orbits; this says nothing about how many orbits exist in total.
    """
    spec = _rm25(spec)
    values = []
    for J in reps:
        if len(J) != spec.k or len(set(J)) != spec.k or not is_information_set(spec, J):
            return False
        values.append(affine_independent_count([spec.ordering.points[j] for j in J], spec.m + 1))
    return len(set(values)) == len(values)


def apply_affine(spec: CodeSpec, J: Sequence[int], images: Sequence[int], shift: int) -> tuple[int, ...]:
    if gf2.rank(images) != spec.m:
        raise AnalysisError("affine map is not invertible")
    order = spec.ordering
    return tuple(sorted(order.position(gf2.apply_linear(images, order.points[j]) ^ shift) for j in J))


def affine_invariance_check(
    J: Sequence[int], images: Sequence[int], shift: int = 0, spec: CodeSpec | None = None,
    measure: Callable[[Sequence[int]], object] | None = None,
) -> bool:
    spec = _rm25(spec)
    measure = measure or (lambda s: invariants(s, spec))
    return measure(J) == measure(apply_affine(spec, J, images, shift))
