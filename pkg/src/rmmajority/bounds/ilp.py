"""The usage-profile integer program and its exact solution.

Variables x_1..x_{2^r} count flats used at exactly i positions.  Constraints:
x_i >= 0, sum i*x_i >= k(2^(m-r)-2) (activations) and
sum C(i,2)*x_i <= C(k,2) (active pairs).  Objective: sum x_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from ..code import CodeSpec

MAX_VARS = 32


class IlpError(ValueError):
    pass


@dataclass(frozen=True)
class IlpSolution:
    x: tuple[int, ...]  # x[i-1] = x_i

    @property
    def objective(self) -> int:
        return sum(self.x)

    def descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.x))


@dataclass(frozen=True)
class IlpInstance:
    nvars: int
    demand: int  # activations required
    pair_cap: int

    @classmethod
    def for_spec(cls, spec: CodeSpec) -> "IlpInstance":
        nvars = 1 << spec.r
        if nvars > MAX_VARS:
            raise IlpError(f"{nvars} variables exceeds the supported {MAX_VARS}")
        return cls(nvars, spec.k * spec.votes, comb(spec.k, 2))

    def feasible(self, x) -> bool:
        return (
            all(v >= 0 for v in x)
            and sum((i + 1) * v for i, v in enumerate(x)) >= self.demand
            and sum(comb(i + 1, 2) * v for i, v in enumerate(x)) <= self.pair_cap
        )


def _lp_bound(indices: list[int], demand: int, cap: int) -> Fraction | None:
    """Minimum of sum x_i over the relaxation restricted to ``indices`` (values i).

    None when infeasible.  With two constraints a basic optimum has at most
    two nonzero variables, so singletons and pairs are enumerated exactly.
    """
    if demand <= 0:
        return Fraction(0) if cap >= 0 else None
    best: Fraction | None = None
    for i in indices:
        x = Fraction(demand, i)
        if comb(i, 2) * x <= cap:
            best = x if best is None or x < best else best
    for i, j in combinations(indices, 2):
        # i*a + j*b = demand, C(i,2)a + C(j,2)b = cap
        det = i * comb(j, 2) - j * comb(i, 2)
        if det == 0:
            continue
        a = Fraction(demand * comb(j, 2) - j * cap, det)
        b = Fraction(i * cap - comb(i, 2) * demand, det)
        if a >= 0 and b >= 0:
            val = a + b
            best = val if best is None or val < best else best
    return best


def _min_pairs(count: int, acts: int) -> int:
    """Fewest active pairs for ``count`` flats carrying ``acts`` activations (balanced split)."""
    q, rem = divmod(acts, count)
    return rem * comb(q + 1, 2) + (count - rem) * comb(q, 2)


def _integer_bound(top: int, demand: int, cap: int) -> int | None:
    """Exact minimum number of flats with usages in 1..top meeting demand within cap.

    C(i,2) is convex, so for a fixed count the pair total is minimised by the
    most even split of max(demand, count) activations; that total falls as the
    count grows, which allows a binary search.
    """
    if demand <= 0:
        return 0 if cap >= 0 else None
    if cap < 0:
        return None
    lo, hi = -(-demand // top), demand  # hi: all singletons, zero pairs
    while lo < hi:
        mid = (lo + hi) // 2
        if _min_pairs(mid, max(demand, mid)) <= cap:
            hi = mid
        else:
            lo = mid + 1
    return lo


def solve_ilp(spec: CodeSpec) -> IlpSolution:
    """Exact optimum, choosing x_{2^r}, ..., x_1 in turn.

    The bound from :func:`_integer_bound` is the exact optimum of every
    subproblem, so each level simply takes the largest value that keeps the
    optimum reachable; no backtracking is needed.  Ties therefore go to the
    lexicographically largest (x_{2^r}, ..., x_1).
    """
    inst = IlpInstance.for_spec(spec)
    n = inst.nvars
    optimum = _integer_bound(n, inst.demand, inst.pair_cap)
    if optimum is None:
        raise IlpError("integer program is infeasible")
    x = [0] * n
    demand, cap, left = inst.demand, inst.pair_cap, optimum
    for i in range(n, 0, -1):
        pair = comb(i, 2)
        top = min(left, max(0, -(-demand // i)))
        if pair:
            top = min(top, cap // pair)
        for v in range(top, -1, -1):
            rest = _integer_bound(i - 1, demand - i * v, cap - pair * v) if i > 1 else (
                0 if demand - v <= 0 else None)
            if rest is not None and v + rest == left:
                break
        else:  # pragma: no cover - the bound is exact, so some v always fits
            raise IlpError("inconsistent bound")
        x[i - 1] = v
        demand, cap, left = demand - i * v, cap - pair * v, left - v
    if not inst.feasible(x) or sum(x) != optimum:  # pragma: no cover
        raise IlpError("solution check failed")
    return IlpSolution(tuple(x))


def enumerate_ilp(spec: CodeSpec, target: int, equality: bool = False) -> list[IlpSolution]:
    """All feasible x with sum x_i == target; activations forced to equal demand if ``equality``."""
    inst = IlpInstance.for_spec(spec)
    n = inst.nvars
    out = []

    def rec(i: int, remaining: int, acts: int, pairs: int, x: list[int]) -> None:
        if pairs > inst.pair_cap:
            return
        if i == 0:
            if remaining:
                return
            if acts < inst.demand or (equality and acts != inst.demand):
                return
            out.append(IlpSolution(tuple(x)))
            return
        # remaining variables can add at most i * remaining activations
        if acts + i * remaining < inst.demand:
            return
        for v in range(remaining, -1, -1):
            x[i - 1] = v
            rec(i - 1, remaining - v, acts + i * v, pairs + comb(i, 2) * v, x)
        x[i - 1] = 0

    rec(n, target, 0, 0, [0] * n)
    return out


def ilp_minimum_by_enumeration(spec: CodeSpec, start: int = 0, limit: int = 10_000) -> int:
    """Smallest target with a feasible profile; independent of the branch and bound."""
    for target in range(start, limit):
        if enumerate_ilp(spec, target):
            return target
    raise IlpError("no feasible target below limit")


def lp_relaxation(spec: CodeSpec) -> Fraction:
    inst = IlpInstance.for_spec(spec)
    val = _lp_bound(list(range(1, inst.nvars + 1)), inst.demand, inst.pair_cap)
    if val is None:
        raise IlpError("relaxation infeasible")
    return val


__all__ = [
    "IlpError",
    "IlpInstance",
    "IlpSolution",
    "enumerate_ilp",
    "ilp_minimum_by_enumeration",
    "lp_relaxation",
    "solve_ilp",
]

