"""RM(r, m) under a chosen position ordering: generators, information sets, encoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from . import gf2
from .gf2 import BitMatrix, Ordering

MAX_ENUM_K = 20


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class CodeSpec:
    r: int
    m: int
    ordering: Ordering = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.m < 3 or not (1 <= self.r and 2 * self.r <= self.m):
            raise CodeError(f"need m >= 3 and 1 <= r <= m/2, got r={self.r}, m={self.m}")
        if self.ordering is None:
            object.__setattr__(self, "ordering", gf2.make_ordering(self.m))
        elif self.ordering.m != self.m:
            raise CodeError("ordering dimension does not match m")

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return sum(comb(self.m, i) for i in range(self.r + 1))

    @property
    def t(self) -> int:
        """Number of correctable errors, 2^(m-r-1) - 1."""
        return (1 << (self.m - self.r - 1)) - 1

    @property
    def d(self) -> int:
        return 1 << (self.m - self.r)

    @property
    def votes(self) -> int:
        """Majority-gate fan-in, 2^(m-r) - 2."""
        return (1 << (self.m - self.r)) - 2

    @property
    def threshold(self) -> int:
        return 1 << (self.m - self.r - 1)

    def __str__(self) -> str:
        return f"RM({self.r},{self.m})"


def rm_generator(order: int, m: int, ordering: Ordering, basis: Sequence[int] | None = None) -> BitMatrix:
    """Rows chi_{U_I} for coordinate subspaces U_I with |I| >= m - order.

    Rows run over I by decreasing size, lexicographic within a size.
    """
    if basis is None:
        basis = [1 << i for i in range(m)]
    rows = []
    for size in range(m, m - order - 1, -1):
        if size < 0:
            break
        for subset in combinations(range(m), size):
            pts = gf2.span([basis[i] for i in subset])
            rows.append(ordering.word_of(pts))
    return BitMatrix(tuple(rows), 1 << m)


def build_generator(spec: CodeSpec) -> BitMatrix:
    return rm_generator(spec.r, spec.m, spec.ordering)


def dual_generator(spec: CodeSpec) -> BitMatrix:
    """Generator of RM(m-r-1, m), the dual code."""
    return rm_generator(spec.m - spec.r - 1, spec.m, spec.ordering)


def _as_positions(spec: CodeSpec, J: Iterable[int]) -> tuple[int, ...]:
    pos = tuple(sorted(set(J)))
    if len(pos) != spec.k:
        raise CodeError(f"information set must have {spec.k} positions, got {len(pos)}")
    if pos[0] < 0 or pos[-1] >= spec.n:
        raise CodeError("position out of range")
    return pos


def is_information_set(spec: CodeSpec, J: Iterable[int], generator: BitMatrix | None = None) -> bool:
    J = _as_positions(spec, J)
    G = generator or build_generator(spec)
    return gf2.rank(G.select_columns(J).rows) == spec.k


def codewords(G: BitMatrix):
    """All codewords spanned by the rows of G, Gray-code order (includes 0)."""
    if G.nrows > MAX_ENUM_K:
        raise CodeError(f"refusing to enumerate 2^{G.nrows} codewords; sample instead")
    word = 0
    yield word
    for i in range(1, 1 << G.nrows):
        # flip the row at the lowest set bit of i
        word ^= G.rows[(i & -i).bit_length() - 1]
        yield word


def is_information_set_dual(spec: CodeSpec, J: Iterable[int]) -> bool:
    """Cross-check: no nonzero dual codeword is supported inside J."""
    J = _as_positions(spec, J)
    mask = 0
    for j in J:
        mask |= 1 << j
    outside = ~mask
    return all(c & outside for c in codewords(dual_generator(spec)) if c)


def systematic_form(spec: CodeSpec, J: Iterable[int], generator: BitMatrix | None = None) -> BitMatrix:
    """Gauss-Jordan on the J columns in ascending order; row i has its unit at J[i]."""
    J = _as_positions(spec, J)
    rows = list((generator or build_generator(spec)).rows)
    for t, j in enumerate(J):
        bit = 1 << j
        pivot = next((i for i in range(t, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            raise CodeError(f"positions {list(J)} are not an information set")
        rows[t], rows[pivot] = rows[pivot], rows[t]
        for i in range(len(rows)):
            if i != t and rows[i] & bit:
                rows[i] ^= rows[t]
    return BitMatrix(tuple(rows), spec.n)


def encode(G_sys: BitMatrix, info: Sequence[int] | int) -> int:
    """Codeword info * G_sys as a packed word."""
    if isinstance(info, int):
        if info >> G_sys.nrows:
            raise CodeError("information word longer than k")
        bits = info
    else:
        if len(info) != G_sys.nrows:
            raise CodeError(f"expected {G_sys.nrows} information bits, got {len(info)}")
        bits = gf2.pack_bits(info)
    word = 0
    i = 0
    while bits:
        if bits & 1:
            word ^= G_sys.rows[i]
        bits >>= 1
        i += 1
    return word


def extract_info(word: int, J: Sequence[int]) -> int:
    out = 0
    for t, j in enumerate(J):
        if word >> j & 1:
            out |= 1 << t
    return out


def canonical_information_set(spec: CodeSpec, basis: Sequence[int] | None = None) -> tuple[int, ...]:
    """Positions of points with weight >= m - r with respect to ``basis``."""
    m = spec.m
    if basis is None:
        basis = [1 << i for i in range(m)]
    if len(basis) != m or gf2.rank(basis) != m:
        raise gf2.GF2Error("basis must be m independent points")
    pts = [p for p in range(spec.n) if gf2.weight_wrt_basis(p, basis) >= m - spec.r]
    J = tuple(spec.ordering.positions(pts))
    if len(J) != spec.k or not is_information_set(spec, J):
        raise AssertionError("canonical information set failed its own check")
    return J


def min_distance_exhaustive(spec: CodeSpec) -> int:
    G = build_generator(spec)
    if G.nrows > MAX_ENUM_K:
        raise CodeError(f"k={G.nrows} exceeds {MAX_ENUM_K}; estimate by sampling instead")
    return min(c.bit_count() for c in codewords(G) if c)
