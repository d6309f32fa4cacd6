"""Computer-assisted exclusion of small admissible families.

Two engines live here:

* :func:`exclude_28` works for RM(2,5) only. It tries to complete every clique
  of 12 to 15 fully informative 2-flats with 2-flats holding exactly three
  information points, up to 28 flats in total.
* :class:`FamilySearch` is a generic exhaustive backtracking search for a
  J-admissible family of at most ``target`` flats. It backs the μ(2,4) check,
  :func:`exclude_29` and the target-30 sanity run.

The search never reports "excluded" unless the whole space was exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from ..analysis import CliqueGraph, clique_graph, iter_cliques
from ..code import CodeSpec
from ..families import AdmissibleFamily, _assemble
from ..geometry import Flat, enumerate_flats
from .ilp import enumerate_ilp

EXCLUDED = "excluded"
FOUND = "found"
INCONCLUSIVE = "inconclusive"


class ExclusionError(ValueError):
    pass


# -- refined usage profiles -------------------------------------------------

_IS_KEYS = tuple((i, s) for s in range(1, 5) for i in range(1, s + 1))


@dataclass(frozen=True)
class RefinedProfile:
    """Counts x_is of flats with s information points, i of them active."""

    x: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_dict(cls, d: dict[tuple[int, int], int]) -> "RefinedProfile":
        for key in d:
            if key not in _IS_KEYS:
                raise ExclusionError(f"bad index {key}")
        return cls(tuple((key, int(d.get(key, 0))) for key in _IS_KEYS))

    def __getitem__(self, key: tuple[int, int]) -> int:
        return dict(self.x)[key]

    def usage(self) -> tuple[int, int, int, int]:
        """Derived (x_1, x_2, x_3, x_4)."""
        d = dict(self.x)
        return tuple(sum(d[(i, s)] for s in range(i, 5)) for i in range(1, 5))  # type: ignore[return-value]

    @property
    def total(self) -> int:
        return sum(v for _, v in self.x)


def _splits(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for a in range(total + 1):
        for rest in _splits(total - a, parts - 1):
            yield (a, *rest)


def refined_profiles(target: int = 29) -> list[RefinedProfile]:
    """Every x_is split of the RM(2,5) usage profiles of size ``target`` with 96 activations."""
    out = []
    for sol in enumerate_ilp(CodeSpec(2, 5), target, equality=True):
        x1, x2, x3, x4 = sol.x
        for a in _splits(x1, 4):
            for b in _splits(x2, 3):
                for c in _splits(x3, 2):
                    out.append(RefinedProfile.from_dict({
                        (1, 1): a[0], (1, 2): a[1], (1, 3): a[2], (1, 4): a[3],
                        (2, 2): b[0], (2, 3): b[1], (2, 4): b[2],
                        (3, 3): c[0], (3, 4): c[1], (4, 4): x4,
                    }))
    return out


def _passes(p: RefinedProfile) -> bool:
    d = dict(p.x)
    usage = p.usage()
    if any(v < 0 for v in d.values()):
        return False
    if sum((i + 1) * v for i, v in enumerate(usage)) != 96:
        return False
    if sum(comb(i + 1, 2) * v for i, v in enumerate(usage)) > 120:
        return False
    if sum(i * (s - 1) * v for (i, s), v in d.items()) > 240:
        return False
    x34 = d[(3, 4)]
    if x34 > 4:  # forced by the constraints above; kept as a guard
        return False
    lhs = sum(comb(i, 2) * v for (i, s), v in d.items() if i >= 2) + 2 * x34
    return lhs <= (120 if x34 == 0 else 119)


def refined_feasible(profiles: Iterable[RefinedProfile]) -> list[RefinedProfile]:
    """Profiles surviving the activation, pair and refined intersection constraints.

    Every survivor is checked against the consequences x_34 <= 2 and
    8 <= x_33 <= 20; a violation raises rather than being filtered.
    """
    out = [p for p in profiles if _passes(p)]
    for p in out:
        if not (p[(3, 4)] <= 2 and 8 <= p[(3, 3)] <= 20):
            raise ExclusionError(f"profile {p} breaks the derived x_34/x_33 limits")
    return out


def refined_profile_of(fam: AdmissibleFamily) -> RefinedProfile:
    """x_is of an RM(2,5) family (s = information points in the flat, i = active ones)."""
    spec = fam.spec
    vmask = 0
    for j in fam.J:
        vmask |= 1 << spec.ordering.points[j]
    active = [0] * len(fam.flats)
    for idx in fam.usage.values():
        for f in idx:
            active[f] += 1
    d: dict[tuple[int, int], int] = {key: 0 for key in _IS_KEYS}
    for f, flat in enumerate(fam.flats):
        d[(active[f], (flat.mask & vmask).bit_count())] += 1
    return RefinedProfile.from_dict(d)


# -- the 28 case -------------------------------------------------------------

@dataclass
class CliqueCompletion:
    excluded: bool
    cliques_checked: int
    by_size: dict[int, int]
    completion: tuple[Flat, ...] | None = None

    def __bool__(self) -> bool:
        return self.excluded


def _has_clique(adj: Sequence[int], cand: int, need: int) -> int | None:
    """A clique of ``need`` vertices inside ``cand`` as a bitmask, or None.

    Greedy colouring gives the bound: a set coloured with c classes holds no
    clique larger than c.
    """
    if need <= 0:
        return 0
    if cand.bit_count() < need:
        return None

    def colour_bound(c: int) -> int:
        classes = 0
        while c:
            classes += 1
            avail = c
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                c &= ~low
                avail &= ~(low | adj[v])
        return classes

    def rec(cand: int, need: int) -> int | None:
        if need == 0:
            return 0
        while cand:
            if cand.bit_count() < need or colour_bound(cand) < need:
                return None
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            sub = rec(cand & adj[v], need - 1)
            if sub is not None:
                return sub | low
        return None

    return rec(cand, need)


def exclude_28_report(J: Sequence[int], cliques: Iterable[Sequence[Flat]] | None = None,
                      spec: CodeSpec | None = None) -> CliqueCompletion:
    """Try to complete cliques of 12..15 inner flats to 28 flats with 3-point flats."""
    spec = spec or CodeSpec(2, 5)
    if (spec.r, spec.m) != (2, 5):
        raise ExclusionError("exclude_28 is specific to RM(2,5)")
    total = 28
    vmask = 0
    for j in J:
        vmask |= 1 << spec.ordering.points[j]
    three = [f for f in enumerate_flats(spec.m, spec.r) if (f.mask & vmask).bit_count() == 3]
    side = CliqueGraph.from_flats(three)
    if cliques is None:
        graph = clique_graph(spec, J)
        cliques = ([graph.flats[v] for v in c] for c in iter_cliques(graph, 12, 15))
    compat_cache: dict[Flat, int] = {}

    def compat(f: Flat) -> int:
        got = compat_cache.get(f)
        if got is None:
            got = 0
            for idx, g in enumerate(three):
                if (f.mask & g.mask).bit_count() <= 1:
                    got |= 1 << idx
            compat_cache[f] = got
        return got

    checked = 0
    by_size: dict[int, int] = {}
    for clique in cliques:
        clique = tuple(clique)
        checked += 1
        by_size[len(clique)] = by_size.get(len(clique), 0) + 1
        cand = (1 << len(three)) - 1
        for f in clique:
            cand &= compat(f)
        found = _has_clique(side.adj, cand, total - len(clique))
        if found is not None:
            extra = tuple(three[i] for i in range(len(three)) if found >> i & 1)
            return CliqueCompletion(False, checked, by_size, clique + extra)
    return CliqueCompletion(True, checked, by_size)


def exclude_28(J: Sequence[int], census: Iterable[Sequence[Flat]] | None = None,
               spec: CodeSpec | None = None) -> bool:
    """True when no 28-flat family of the forced (12,16,0,0) shape exists for J."""
    return exclude_28_report(J, census, spec).excluded


# -- generic exhaustive search -----------------------------------------------

@dataclass
class SearchResult:
    verdict: str
    target: int
    nodes: int
    family: AdmissibleFamily | None = None
    notes: dict = field(default_factory=dict)

    @property
    def excluded(self) -> bool:
        return self.verdict == EXCLUDED


class _Budget(Exception):
    pass


class FamilySearch:
    """Exhaustive search for a J-admissible family with at most ``target`` flats.

    Each step activates one more flat at one position. The position is the
    open one with the fewest candidates, and within a position flats are
    activated in increasing id, so every family is reached along exactly
    one path. Pruning is conservative:

    * a position with fewer candidates than it still needs is dead;
    * waste: each flat ends with at most 2^r activations and exactly k*N are
      needed, so the activations a flat can no longer receive are bounded in
      total by 2^r * target - k*N;
    * coverage: activations that existing flats cannot absorb need new flats.

    ``preferred`` flats get the smallest ids, which steers the first
    branches towards a known family without affecting completeness.
    """

    def __init__(self, spec: CodeSpec, J: Sequence[int], target: int,
                 preferred: Sequence[Flat] = (), flats: Sequence[Flat] | None = None):
        self.spec = spec
        self.J = tuple(sorted(J))
        self.target = target
        allf = list(flats) if flats is not None else enumerate_flats(spec.m, spec.r)
        pref = [f for f in preferred]
        seen = set(pref)
        self.flats: list[Flat] = pref + [f for f in allf if f not in seen]
        pts = [spec.ordering.points[j] for j in self.J]
        self.point_bit = [1 << p for p in pts]
        self.k = len(self.J)
        self.need0 = spec.votes
        self.full = 1 << spec.r
        self.slack = self.full * target - self.k * self.need0
        self.pair_cap = self.k * (self.k - 1) // 2
        # positions (indices into J) each flat contains; flats through each point
        self.flat_pos: list[tuple[int, ...]] = []
        self.through: list[list[int]] = [[] for _ in range(self.k)]
        for fid, f in enumerate(self.flats):
            members = tuple(a for a in range(self.k) if f.mask & self.point_bit[a])
            self.flat_pos.append(members)
            for a in members:
                self.through[a].append(fid)
        self.masks = [f.mask for f in self.flats]

    def run(self, budget: int | None = None) -> SearchResult:
        k = self.k
        active = [0] * len(self.flats)  # bitmask over J indices
        at: list[list[int]] = [[] for _ in range(k)]
        union = [0] * k
        need = [self.need0] * k
        last = [-1] * k
        used: list[int] = []  # flat ids with some activation
        nodes = [0]
        found: list = []

        def candidates(a: int, room: bool, waste: int) -> list[int]:
            pb = self.point_bit[a]
            spare_waste = self.slack - waste
            u = union[a]
            lo = last[a]
            out = []
            for fid in self.through[a]:
                if fid <= lo:
                    continue
                if active[fid]:
                    if active[fid] >> a & 1:
                        continue
                elif not room or self.full - len(self.flat_pos[fid]) > spare_waste:
                    continue
                if self.masks[fid] & u & ~pb:
                    continue
                out.append(fid)
            return out

        def potential(fid: int) -> int:
            extra = 0
            for a in self.flat_pos[fid]:
                if need[a] and not active[fid] >> a & 1 and fid > last[a] \
                        and not (self.masks[fid] & union[a] & ~self.point_bit[a]):
                    extra += 1
            return extra

        def can_join(fid: int, b: int) -> bool:
            """Whether flat ``fid`` may still be activated at position b."""
            return bool(need[b]) and not active[fid] >> b & 1 and fid > last[b] \
                and not (self.masks[fid] & union[b] & ~self.point_bit[b])

        def holder(a: int, b: int) -> int | None:
            """The flat used at a that contains the point of b, if any."""
            if not union[a] & self.point_bit[b]:
                return None
            pb = self.point_bit[b]
            for fid in at[a]:
                if self.masks[fid] & pb:
                    return fid
            return None  # pragma: no cover - union says one exists

        def possible_pairs(co: list[int]) -> int:
            """Pairs not yet co-active that some completion could still make co-active."""
            total = 0
            for a in range(k):
                for b in range(a + 1, k):
                    if co[a] >> b & 1:
                        continue
                    g = holder(a, b)
                    if g is not None:
                        total += can_join(g, b)
                        continue
                    h = holder(b, a)
                    if h is not None:
                        total += can_join(h, a)
                        continue
                    total += bool(need[a] and need[b])
            return total

        def waste_check() -> int | None:
            """Committed waste, or None when no completion fits the flat and pair budgets.

            Remaining activations go either to existing flats (up to their
            potential) or to new flats. Raising a flat from i to i+1 active
            positions creates i new co-active pairs, and no pair can be
            co-active in two flats, so the cheapest increments bound the
            final pair count from below.
            """
            waste = 0
            pairs = 0
            cnt = [0] * self.full  # increments available at each marginal cost
            co = [0] * k  # co[a]: positions already co-active with a
            for fid in used:
                act = active[fid]
                have = act.bit_count()
                extra = potential(fid)
                waste += self.full - have - extra
                pairs += have * (have - 1) // 2
                for c in range(have, have + extra):
                    cnt[c] += 1
                rest = act
                while rest:
                    low = rest & -rest
                    co[low.bit_length() - 1] |= act & ~low
                    rest ^= low
            if waste > self.slack:
                return None
            cap = pairs + possible_pairs(co)
            if cap > self.pair_cap:
                cap = self.pair_cap
            remaining = sum(need)
            room = self.target - len(used)
            for new in range(0, min(room, remaining) + 1):
                left = remaining - new  # each new flat takes its first activation for free
                cost = pairs
                for c in range(self.full):
                    take = min(cnt[c] + (new if c else 0), left)
                    cost += take * c
                    left -= take
                if left == 0 and cost <= cap:
                    return waste
            return None

        def rec() -> bool:
            nodes[0] += 1
            if budget is not None and nodes[0] > budget:
                raise _Budget
            waste = waste_check()
            if waste is None:
                return False
            room = len(used) < self.target
            best = None
            best_c: list[int] = []
            for a in range(k):
                if not need[a]:
                    continue
                c = candidates(a, room, waste)
                if len(c) < need[a]:
                    return False
                if best is None or len(c) - need[a] < len(best_c) - need[best]:
                    best, best_c = a, c
                    if len(c) == need[a]:
                        break
            if best is None:
                found.append(self._family(at))
                return True
            a = best
            prev_last = last[a]
            prev_union = union[a]
            # choices beyond len - need can never be completed at this position
            for pos in range(len(best_c) - need[a] + 1):
                fid = best_c[pos]
                fresh = not active[fid]
                active[fid] |= 1 << a
                if fresh:
                    used.append(fid)
                at[a].append(fid)
                union[a] = prev_union | self.masks[fid]
                need[a] -= 1
                last[a] = fid
                ok = rec()
                need[a] += 1
                at[a].pop()
                active[fid] &= ~(1 << a)
                if fresh:
                    used.pop()
                union[a] = prev_union
                last[a] = prev_last
                if ok:
                    return True
            return False

        try:
            ok = rec()
        except _Budget:
            return SearchResult(INCONCLUSIVE, self.target, nodes[0] - 1)
        if ok:
            return SearchResult(FOUND, self.target, nodes[0], found[0])
        return SearchResult(EXCLUDED, self.target, nodes[0])

    def _family(self, at: list[list[int]]) -> AdmissibleFamily:
        per_position = {self.J[a]: [self.flats[fid] for fid in at[a]] for a in range(self.k)}
        return _assemble(self.spec, self.J, per_position, source="search")


def search_admissible(spec: CodeSpec, J: Sequence[int], target: int, budget: int | None = None,
                      preferred: Sequence[Flat] = ()) -> SearchResult:
    return FamilySearch(spec, J, target, preferred).run(budget)


def exclude_29(J: Sequence[int], budget: int | None = 1_000_000, spec: CodeSpec | None = None) -> SearchResult:
    """Exhaustive search for a 29-flat RM(2,5) family; 'inconclusive' if the node budget runs out.

    A family found by the search is checked against the refined profile
    constraints before being reported.
    """
    spec = spec or CodeSpec(2, 5)
    if (spec.r, spec.m) != (2, 5):
        raise ExclusionError("exclude_29 is specific to RM(2,5)")
    res = search_admissible(spec, J, 29, budget)
    if res.family is not None:
        prof = refined_profile_of(res.family)
        res.notes["refined_ok"] = bool(refined_feasible([prof])) if prof.total == 29 else None
    return res


__all__ = [
    "EXCLUDED",
    "FOUND",
    "INCONCLUSIVE",
    "CliqueCompletion",
    "ExclusionError",
    "FamilySearch",
    "RefinedProfile",
    "SearchResult",
    "exclude_28",
    "exclude_28_report",
    "exclude_29",
    "refined_feasible",
    "refined_profile_of",
    "refined_profiles",
    "search_admissible",
]
