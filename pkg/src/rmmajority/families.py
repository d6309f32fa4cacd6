"""Admissible families of r-flats: validation, constructions, search, file format.

A family is J-admissible when every information position j has
``2^(m-r) - 2`` flats *used* at j, all containing v_j and meeting pairwise in
exactly {v_j}.  Usage is recorded explicitly, so a flat may contain v_j
without being used there.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from . import gf2
from .code import CodeSpec, canonical_information_set
from .geometry import (
    Flat,
    GeometryError,
    enumerate_flats,
    flat_count,
    flats_through_point,
    map_flat,
    parse_flat,
    partial_spread,
    stabilizing_map,
)

log = logging.getLogger(__name__)

SEARCH_FLAT_LIMIT = 200_000


class AdmissibilityError(ValueError):
    """Raised by :func:`validate`; ``position`` and ``pair`` locate the first violation."""

    def __init__(self, message: str, position: int | None = None, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.position = position
        self.pair = pair


@dataclass(frozen=True)
class UsageProfile:
    """``x[i-1]`` is the number of flats used at exactly i positions."""

    x: tuple[int, ...]

    @property
    def size(self) -> int:
        return sum(self.x)

    def descending(self) -> tuple[int, ...]:
        """(x_{2^r}, ..., x_1), the order used when quoting profiles."""
        return tuple(reversed(self.x))

    def activations(self) -> int:
        return sum((i + 1) * v for i, v in enumerate(self.x))

    def active_pairs(self) -> int:
        return sum(comb(i + 1, 2) * v for i, v in enumerate(self.x))


@dataclass
class AdmissibleFamily:
    spec: CodeSpec
    J: tuple[int, ...]
    flats: list[Flat]
    usage: dict[int, tuple[int, ...]]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.flats)

    def active_positions(self) -> list[list[int]]:
        """For each flat, the positions where it is used."""
        out: list[list[int]] = [[] for _ in self.flats]
        for j in self.J:
            for idx in self.usage.get(j, ()):
                out[idx].append(j)
        return out

    def profile(self) -> UsageProfile:
        return validate(self)

    def flat_positions(self) -> list[list[int]]:
        return [f.positions(self.spec.ordering) for f in self.flats]


def validate(fam: AdmissibleFamily) -> UsageProfile:
    """Check every admissibility condition and return the usage profile."""
    spec = fam.spec
    m, r = spec.m, spec.r
    need = spec.votes
    order = spec.ordering
    nflats = len(fam.flats)
    for i, f in enumerate(fam.flats):
        if f.m != m or f.dim != r:
            raise AdmissibilityError(f"flat {i} is not an {r}-flat of Z2^{m}")
    J = fam.J
    if len(set(J)) != len(J):
        raise AdmissibilityError("repeated position in J")
    extra = set(fam.usage) - set(J)
    if extra:
        raise AdmissibilityError(f"usage given for positions outside J: {sorted(extra)}")
    for j in J:
        used = fam.usage.get(j, ())
        if len(used) != need:
            raise AdmissibilityError(f"position {j} has {len(used)} used flats, need {need}", position=j)
        v = order.points[j]
        for idx in used:
            if not 0 <= idx < nflats:
                raise AdmissibilityError(f"position {j} uses unknown flat {idx}", position=j)
            if v not in fam.flats[idx]:
                raise AdmissibilityError(f"flat {idx} used at {j} does not contain v_{j}", position=j)
        for a in range(need):
            for b in range(a + 1, need):
                fa, fb = fam.flats[used[a]], fam.flats[used[b]]
                if (fa.mask & fb.mask) != 1 << v:
                    raise AdmissibilityError(
                        f"flats {used[a]} and {used[b]} used at {j} do not meet exactly in v_{j}",
                        position=j,
                        pair=(used[a], used[b]),
                    )
    counts = [0] * nflats
    for j in J:
        for idx in fam.usage[j]:
            counts[idx] += 1
    x = [0] * (1 << r)
    for i, c in enumerate(counts):
        if c == 0:
            raise AdmissibilityError(f"flat {i} is never used")
        x[c - 1] += 1
    prof = UsageProfile(tuple(x))
    # necessary conditions on every profile
    if prof.activations() < len(J) * need:
        raise AdmissibilityError("profile violates the activation count bound")
    if prof.active_pairs() > comb(len(J), 2):
        raise AdmissibilityError("profile violates the active-pair bound")
    return prof


def is_valid(fam: AdmissibleFamily) -> bool:
    try:
        validate(fam)
    except AdmissibilityError:
        return False
    return True


def derive_usage(spec: CodeSpec, J: Sequence[int], flats: Sequence[Flat]) -> dict[int, tuple[int, ...]]:
    """Pick, for each j, the lexicographically first admissible set of used flats."""
    need = spec.votes
    usage = {}
    for j in J:
        v = spec.ordering.points[j]
        cands = [i for i, f in enumerate(flats) if v in f]
        chosen: list[int] = []

        def extend(start: int) -> bool:
            if len(chosen) == need:
                return True
            for t in range(start, len(cands)):
                c = cands[t]
                if all(flats[c].mask & flats[o].mask == 1 << v for o in chosen):
                    chosen.append(c)
                    if extend(t + 1):
                        return True
                    chosen.pop()
            return False

        if not extend(0):
            raise AdmissibilityError(f"no admissible choice of flats at position {j}", position=j)
        usage[j] = tuple(chosen)
    return usage


def _assemble(spec: CodeSpec, J: Sequence[int], per_position: dict[int, list[Flat]], dedup: bool = True, **meta):
    flats: list[Flat] = []
    index: dict[Flat, int] = {}
    usage = {}
    for j in J:
        ids = []
        for f in per_position[j]:
            if dedup and f in index:
                ids.append(index[f])
            else:
                index.setdefault(f, len(flats))
                ids.append(len(flats))
                flats.append(f)
        usage[j] = tuple(ids)
    return AdmissibleFamily(spec, tuple(J), flats, usage, dict(meta))


# constructions


def _spread_cover(spec: CodeSpec, subspaces: Sequence[Sequence[int]]) -> tuple[list[Flat], dict[int, tuple[int, ...]]]:
    m = spec.m
    flats = []
    for sub in subspaces:
        seen = set()
        for v in range(1 << m):
            f = Flat.make(m, v, sub)
            if f not in seen:
                seen.add(f)
                flats.append(f)
    by_point: dict[int, list[int]] = {p: [] for p in range(1 << m)}
    for i, f in enumerate(flats):
        for p in f.points:
            by_point[p].append(i)
    usage = {j: tuple(by_point[spec.ordering.points[j]]) for j in range(1 << m)}
    return flats, usage


def construct_full_cover(spec: CodeSpec) -> AdmissibleFamily:
    """Cosets of 2^(m-r)-2 spread members: every position active in 2^(m-r)-2 flats."""
    spread = partial_spread(spec.m, spec.r)
    flats, usage = _spread_cover(spec, spread.subspaces[: spec.votes])
    return AdmissibleFamily(spec, tuple(range(spec.n)), flats, usage, {"construction": "full"})


def construct_naive(spec: CodeSpec, J: Sequence[int]) -> AdmissibleFamily:
    """Separate flats for every position, k * (2^(m-r) - 2) in total."""
    per = {j: flats_through_point(spec.m, spec.r, spec.ordering.points[j]) for j in J}
    return _assemble(spec, sorted(J), per, dedup=False, construction="naive")


def _translate_flat_up(flat_points: Sequence[int], m: int, r: int) -> Flat:
    """Smallest r-flat containing the points, extending directions by unit vectors."""
    f = Flat.from_points(m, flat_points)
    basis = list(f.basis)
    i = 0
    while len(basis) < r:
        e = 1 << i
        if not gf2.in_span(e, gf2.echelon(basis)):
            basis.append(e)
        i += 1
    return Flat.make(m, f.base, basis)


def heavy_point_cover(m: int, r: int, i: int, basis: Sequence[int] | None = None) -> list[Flat]:
    """Cover of all points of weight >= m-r by r-flats.

    First the translates of the all-ones point along coordinate sets of size r
    that contain the first i coordinates, then the leftover points grouped
    r+1 at a time and lifted into flats.
    """
    if basis is None:
        basis = [1 << t for t in range(m)]
    e = 0
    for b in basis:
        e ^= b
    S = []
    for rest in _combos(range(i, m), r - i):
        dirs = [basis[t] for t in range(i)] + [basis[t] for t in rest]
        S.append(Flat.make(m, e, dirs))
    covered = set()
    for f in S:
        covered.update(f.points)
    heavy = [p for p in range(1 << m) if gf2.weight_wrt_basis(p, basis) >= m - r]
    left = [p for p in heavy if p not in covered]
    T = [_translate_flat_up(left[s : s + r + 1], m, r) for s in range(0, len(left), r + 1)]
    return S + T


def _combos(items, size):
    from itertools import combinations

    return combinations(list(items), size)


def greedy_cover(m: int, r: int, targets: Iterable[int], rng: random.Random | None = None) -> list[Flat] | None:
    """Greedy set cover of ``targets`` by r-flats, or None when enumeration is too large."""
    if flat_count(m, r) > SEARCH_FLAT_LIMIT:
        return None
    flats = enumerate_flats(m, r)
    left = 0
    for p in targets:
        left |= 1 << p
    out = []
    while left:
        best = max((f.mask & left).bit_count() for f in flats)
        ties = [f for f in flats if (f.mask & left).bit_count() == best]
        pick = ties[0] if rng is None else rng.choice(ties)
        out.append(pick)
        left &= ~pick.mask
    return out


def construct_upper_a(spec: CodeSpec) -> AdmissibleFamily:
    """One flat per position from a small cover R, the rest carried over by affine maps fixing v_j."""
    m, r = spec.m, spec.r
    J = canonical_information_set(spec)
    heavy = [spec.ordering.points[j] for j in J]
    b = (r).bit_length()  # ceil(log2(r+1))
    R = heavy_point_cover(m, r, b)
    greedy = greedy_cover(m, r, heavy)
    cover_kind = "explicit"
    if greedy is not None and len(greedy) < len(R):
        R, cover_kind = greedy, "greedy"
    per = {}
    for j in J:
        v = spec.ordering.points[j]
        U = next(f for f in R if v in f)
        local = flats_through_point(m, r, v)
        images, shift = stabilizing_map(local[0], U, v)
        per[j] = [U] + [map_flat(L, images, shift) for L in local[1:]]
    fam = _assemble(spec, J, per, construction="33a", cover=cover_kind, cover_size=len(R))
    return _drop_unused(fam)


def _drop_unused(fam: AdmissibleFamily) -> AdmissibleFamily:
    used = sorted({i for ids in fam.usage.values() for i in ids})
    remap = {old: new for new, old in enumerate(used)}
    flats = [fam.flats[i] for i in used]
    usage = {j: tuple(remap[i] for i in ids) for j, ids in fam.usage.items()}
    return AdmissibleFamily(fam.spec, fam.J, flats, usage, fam.meta)


def _independent_members(subspaces: Sequence[Sequence[int]], count: int) -> list[int] | None:
    """Indices of ``count`` spread members whose sum is direct."""
    chosen: list[int] = []

    def extend(start: int) -> bool:
        if len(chosen) == count:
            return True
        for i in range(start, len(subspaces)):
            rows = [b for c in chosen + [i] for b in subspaces[c]]
            if gf2.rank(rows) == len(rows):
                chosen.append(i)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    return chosen if extend(0) else None


def construct_upper_b(spec: CodeSpec) -> AdmissibleFamily:
    """Full cover aligned with a coordinate basis, minus flats missing every information point."""
    m, r = spec.m, spec.r
    spread = partial_spread(m, r).subspaces
    # the coordinate-aligned members cannot outnumber the spread itself
    ell = min(m // r, spec.votes)
    lead = _independent_members(spread, ell)
    if lead is None:
        raise GeometryError(f"spread has no {ell} independent members")
    rest = [i for i in range(len(spread)) if i not in lead]
    chosen = [spread[i] for i in lead] + [spread[i] for i in rest[: spec.votes - ell]]
    basis = gf2.complete_basis([b for c in lead for b in spread[c]], m)
    J = canonical_information_set(spec, basis)
    flats, usage = _spread_cover(spec, chosen)
    usage = {j: usage[j] for j in J}
    fam = AdmissibleFamily(spec, J, flats, usage, {"construction": "33b", "basis": basis})
    return _drop_unused(fam)


def construct_rm1(m: int, ordering: gf2.Ordering | None = None) -> AdmissibleFamily:
    """Pairs {u_j, u_j'} over the affine frame u_0 = 0, u_i = e_i (positions relabelled)."""
    spec = CodeSpec(1, m, ordering)
    frame = [0] + [1 << i for i in range(m)]
    rest = [p for p in range(1 << m) if p not in frame]
    u = frame + rest  # virtual index -> point
    if m == 3:
        pairs = [(0, 1), (0, 2), (1, 3), (2, 3)]
    else:
        top = (1 << (m - 1)) - 2
        pairs = [(j, jp) for j in range(m + 1) for jp in range(j + 1, top + 1)]
    flats = [Flat.from_points(m, (u[a], u[b])) for a, b in pairs]
    pos = spec.ordering.position
    J = tuple(sorted(pos(p) for p in frame))
    usage = {}
    for j in J:
        v = spec.ordering.points[j]
        usage[j] = tuple(i for i, f in enumerate(flats) if v in f)
    return AdmissibleFamily(spec, J, flats, usage, {"construction": "rm1", "relabel": u[: m + 1]})


def restrict_to(fam: AdmissibleFamily, J: Sequence[int]) -> AdmissibleFamily:
    """Keep only the usage at J and the flats used there."""
    usage = {j: fam.usage[j] for j in J}
    sub = AdmissibleFamily(fam.spec, tuple(sorted(J)), fam.flats, usage, dict(fam.meta))
    return _drop_unused(sub)


# heuristic search


class _SearchState:
    def __init__(self, spec: CodeSpec, J: Sequence[int], cands: list[Flat]):
        self.spec = spec
        self.J = list(J)
        self.need = spec.votes
        self.points = {j: spec.ordering.points[j] for j in J}
        self.cands = cands
        jset = {self.points[j]: j for j in J}
        self.cand_js = [[jset[p] for p in f.points if p in jset] for f in cands]
        self.active: dict[int, list[int]] = {j: [] for j in J}  # j -> candidate ids
        self.union: dict[int, int] = {j: 0 for j in J}
        self.members: dict[int, set[int]] = {}  # candidate id -> positions where used

    def copy(self) -> "_SearchState":
        new = object.__new__(_SearchState)
        new.__dict__.update(self.__dict__)
        new.active = {j: list(v) for j, v in self.active.items()}
        new.union = dict(self.union)
        new.members = {c: set(s) for c, s in self.members.items()}
        return new

    def usable_at(self, c: int) -> list[int]:
        f = self.cands[c]
        used = self.members.get(c, ())
        out = []
        for j in self.cand_js[c]:
            if j in used or len(self.active[j]) >= self.need:
                continue
            if f.mask & self.union[j] & ~(1 << self.points[j]):
                continue
            out.append(j)
        return out

    def activate(self, c: int, js: Iterable[int]) -> None:
        mask = self.cands[c].mask
        for j in js:
            self.active[j].append(c)
            self.union[j] |= mask
            self.members.setdefault(c, set()).add(j)

    def remove(self, c: int) -> None:
        for j in self.members.pop(c, ()):
            self.active[j].remove(c)
            u = 0
            for o in self.active[j]:
                u |= self.cands[o].mask
            self.union[j] = u

    def missing(self) -> int:
        return sum(self.need - len(a) for a in self.active.values())

    def fill(self, rng: random.Random) -> bool:
        """Greedy completion; False if some position gets stuck."""
        while self.missing():
            # free activations of flats already in the family
            progressed = False
            for c in sorted(self.members):
                js = self.usable_at(c)
                if js:
                    self.activate(c, js)
                    progressed = True
            if not self.missing():
                break
            if progressed:
                continue
            best, ties = 0, []
            for c in range(len(self.cands)):
                if c in self.members:
                    continue
                s = len(self.usable_at(c))
                if s > best:
                    best, ties = s, [c]
                elif s == best and s:
                    ties.append(c)
            if not best:
                return False
            c = rng.choice(ties)
            self.activate(c, self.usable_at(c))
        return True

    def size(self) -> int:
        return len(self.members)

    def to_family(self, **meta) -> AdmissibleFamily:
        ids = sorted(self.members, key=lambda c: self.cands[c])
        remap = {c: i for i, c in enumerate(ids)}
        flats = [self.cands[c] for c in ids]
        usage = {j: tuple(sorted(remap[c] for c in self.active[j])) for j in self.J}
        return AdmissibleFamily(self.spec, tuple(self.J), flats, usage, dict(meta))


def _flat_key(fam: AdmissibleFamily) -> list[tuple[int, ...]]:
    return sorted(tuple(f.positions(fam.spec.ordering)) for f in fam.flats)


def search_family(
    spec: CodeSpec, J: Sequence[int], budget: int = 200, seed: int = 0, restarts: int = 3
) -> AdmissibleFamily:
    """Greedy cover followed by remove-and-repair local search.

    Returns the smallest valid family found; the full-cover restriction is the
    fallback, reported with ``meta['fallback'] = True`` when nothing better
    turned up.
    """
    J = tuple(sorted(J))
    fallback = restrict_to(construct_full_cover(spec), J)
    fallback.meta.update(construction="search", fallback=True, seed=seed)
    if flat_count(spec.m, spec.r) > SEARCH_FLAT_LIMIT:
        return fallback
    rng = random.Random(seed)
    jpoints = {spec.ordering.points[j] for j in J}
    cands = [f for f in enumerate_flats(spec.m, spec.r) if jpoints.intersection(f.points)]
    best: _SearchState | None = None
    iters = 0
    for _ in range(max(1, restarts)):
        state = _SearchState(spec, J, cands)
        if not state.fill(rng):
            continue
        current = state
        if best is None or current.size() < best.size():
            best = current.copy()
        per_restart = budget // max(1, restarts)
        for _ in range(per_restart):
            iters += 1
            trial = current.copy()
            members = sorted(trial.members)
            k = min(len(members), rng.choice((2, 2, 3)))
            for c in rng.sample(members, k):
                trial.remove(c)
            if not trial.fill(rng):
                continue
            if trial.size() <= current.size():
                current = trial
                if current.size() < best.size():
                    best = current.copy()
    if best is None or best.size() >= len(fallback):
        fallback.meta["iterations"] = iters
        return fallback
    fam = best.to_family(construction="search", fallback=False, seed=seed, iterations=iters)
    validate(fam)
    return fam


# file format


def family_to_text(fam: AdmissibleFamily) -> str:
    order = fam.spec.ordering
    lines = [f"rm {fam.spec.r} {fam.spec.m} {order.label()}"]
    lines.append("J: {" + ",".join(str(j) for j in fam.J) + "}")
    lines.extend(f.to_text(order) for f in fam.flats)
    lines.append("usage:")
    for j in fam.J:
        lines.append(f"{j}: " + " ".join(str(i) for i in fam.usage[j]))
    return "\n".join(lines) + "\n"


class FamilyFormatError(ValueError):
    pass


def family_from_text(text: str) -> AdmissibleFamily:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 2:
        raise FamilyFormatError("family text too short")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "rm":
        raise FamilyFormatError(f"bad header {lines[0]!r}")
    r, m = int(head[1]), int(head[2])
    spec = CodeSpec(r, m, gf2.parse_ordering_label(m, head[3]))
    if not lines[1].startswith("J:"):
        raise FamilyFormatError("second line must be 'J: {...}'")
    body = lines[1][2:].strip()
    J = tuple(int(t) for t in body.strip("{}").split(",") if t.strip())
    flats = []
    pos = 2
    while pos < len(lines) and lines[pos].startswith("{"):
        flats.append(parse_flat(lines[pos], spec.ordering))
        pos += 1
    usage = {}
    if pos < len(lines):
        if lines[pos] != "usage:":
            raise FamilyFormatError(f"unexpected line {lines[pos]!r}")
        for ln in lines[pos + 1 :]:
            key, _, rest = ln.partition(":")
            usage[int(key)] = tuple(int(t) for t in rest.split())
    else:
        usage = derive_usage(spec, J, flats)
    return AdmissibleFamily(spec, J, flats, usage, {"source": "text"})


def family_from_vectors(spec: CodeSpec, J: Sequence[int], flats_text: Sequence[str]) -> AdmissibleFamily:
    """Flats written with basis vectors, e.g. ``{0,e2+e3,e1+e2+e4,e1+e3+e4}``."""
    flats = []
    for line in flats_text:
        pts = [parse_vector(tok) for tok in line.strip().strip("{}").split(",")]
        f = Flat.from_points(spec.m, pts)
        if len(f) != len(set(pts)):
            raise FamilyFormatError(f"{line!r} is not a flat")
        flats.append(f)
    J = tuple(sorted(J))
    return AdmissibleFamily(spec, J, flats, derive_usage(spec, J, flats), {"source": "vectors"})


def parse_vector(tok: str) -> int:
    tok = tok.strip()
    if tok == "0":
        return 0
    v = 0
    for part in tok.split("+"):
        part = part.strip()
        if not part.startswith("e"):
            raise FamilyFormatError(f"bad vector {tok!r}")
        v ^= 1 << (int(part[1:]) - 1)
    return v
