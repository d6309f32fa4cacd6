"""Affine flats of Z2^m: canonical form, enumeration, superflats and spreads."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import gf2
from .gf2 import GF2Error, Ordering

MAX_ENUM_M = 10


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, eq=True, order=True)
class Flat:
    """A d-flat ``base + span(basis)`` in canonical form.

    ``basis`` is in reduced row echelon form (descending) and ``base`` is the
    smallest point of the flat, so equal flats compare equal and hash alike.
    Construct through :meth:`make` or :meth:`from_points`.
    """

    m: int
    basis: tuple[int, ...]
    base: int

    @classmethod
    def make(cls, m: int, base: int, directions: Iterable[int]) -> "Flat":
        basis = gf2.echelon(directions)
        return cls(m, tuple(basis), gf2.reduce(base, basis))

    @classmethod
    def from_points(cls, m: int, points: Iterable[int]) -> "Flat":
        """Affine span of the given points (which need not form a flat)."""
        pts = list(points)
        if not pts:
            raise GeometryError("empty point set has no affine span")
        p0 = pts[0]
        return cls.make(m, p0, (p ^ p0 for p in pts[1:]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return 1 << len(self.basis)

    @cached_property
    def points(self) -> tuple[int, ...]:
        return tuple(sorted(self.base ^ x for x in gf2.span(self.basis)))

    @cached_property
    def mask(self) -> int:
        """Bit p set iff point p lies in the flat."""
        out = 0
        for p in self.points:
            out |= 1 << p
        return out

    def __contains__(self, v: int) -> bool:
        return gf2.reduce(v ^ self.base, self.basis) == 0

    def canonical(self) -> "Flat":
        return Flat.make(self.m, self.base, self.basis)

    def translate(self, v: int) -> "Flat":
        return Flat.make(self.m, self.base ^ v, self.basis)

    def positions(self, ordering: Ordering) -> list[int]:
        return ordering.positions(self.points)

    def word(self, ordering: Ordering) -> int:
        """Characteristic word chi_U under ``ordering``."""
        return ordering.word_of(self.points)

    def to_text(self, ordering: Ordering) -> str:
        return "{" + ",".join(str(j) for j in self.positions(ordering)) + "}"

    def __repr__(self) -> str:
        return f"Flat(m={self.m}, points={list(self.points)})"


def parse_flat(text: str, ordering: Ordering) -> Flat:
    """Inverse of :meth:`Flat.to_text`; the position set must be a flat."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise GeometryError(f"malformed flat {text!r}")
    positions = [int(tok) for tok in body[1:-1].split(",") if tok.strip()]
    pts = [ordering.points[j] for j in positions]
    flat = Flat.from_points(ordering.m, pts)
    if len(flat) != len(set(pts)) or len(pts) != len(set(pts)):
        raise GeometryError(f"{text!r} is not an affine flat")
    return flat


def gaussian_binomial2(m: int, d: int) -> int:
    if d < 0 or d > m:
        return 0
    num = den = 1
    for i in range(d):
        num *= (1 << (m - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def flat_count(m: int, d: int) -> int:
    return (1 << (m - d)) * gaussian_binomial2(m, d)


def linear_subspaces(m: int, d: int) -> list[tuple[int, ...]]:
    """All d-dimensional subspaces of Z2^m as RREF bases, enumerated by pivot pattern."""
    out = []
    for pivots in combinations(range(m - 1, -1, -1), d):
        # pivots descending; row i has leading bit pivots[i], free bits below
        # it that are not pivots
        free = [
            [b for b in range(pivots[i]) if b not in pivots] for i in range(d)
        ]
        nfree = [len(f) for f in free]
        total = sum(nfree)
        for fill in range(1 << total):
            rows = []
            shift = 0
            for i in range(d):
                row = 1 << pivots[i]
                for t, b in enumerate(free[i]):
                    if fill >> (shift + t) & 1:
                        row |= 1 << b
                shift += nfree[i]
                rows.append(row)
            out.append(tuple(rows))
    return out


def coset_representatives(m: int, basis: Sequence[int]) -> list[int]:
    """Minimal representatives of Z2^m / span(basis): the points with zero pivot bits."""
    pivot_mask = 0
    for b in basis:
        pivot_mask |= 1 << (b.bit_length() - 1)
    return [v for v in range(1 << m) if not v & pivot_mask]


def enumerate_flats(m: int, d: int) -> list[Flat]:
    """All d-flats of Z2^m in canonical form, sorted."""
    if not 0 <= d <= m:
        raise GeometryError(f"dimension d={d} outside 0..{m}")
    if m > MAX_ENUM_M:
        raise GeometryError(f"full enumeration refused above m={MAX_ENUM_M}")
    out = []
    for basis in linear_subspaces(m, d):
        for rep in coset_representatives(m, basis):
            out.append(Flat(m, basis, rep))
    out.sort()
    return out


def superflats(flat: Flat) -> list[Flat]:
    """All (d+1)-flats containing ``flat``, sorted."""
    m = flat.m
    if flat.dim >= m:
        raise GeometryError("a flat of full dimension has no superflats")
    reps = coset_representatives(m, flat.basis)
    out = [Flat.make(m, flat.base, flat.basis + (u,)) for u in reps if u]
    out = sorted(set(out))
    return out


def intersect(u: Flat, v: Flat) -> Flat | None:
    if u.m != v.m:
        raise GeometryError("flats live in different spaces")
    common = u.mask & v.mask
    if not common:
        return None
    pts = []
    while common:
        low = common & -common
        pts.append(low.bit_length() - 1)
        common ^= low
    return Flat.from_points(u.m, pts)


def intersection_size(u: Flat, v: Flat) -> int:
    return (u.mask & v.mask).bit_count()


@dataclass(frozen=True)
class Spread:
    """r-dimensional linear subspaces of Z2^m meeting pairwise in {0}."""

    m: int
    r: int
    subspaces: tuple[tuple[int, ...], ...]

    def flats(self) -> list[Flat]:
        return [Flat(self.m, tuple(s), 0) for s in self.subspaces]


def _check_spread_params(m: int, r: int) -> None:
    if not (1 <= r and 2 * r <= m):
        raise GeometryError(f"need 1 <= r <= m/2, got r={r}, m={m}")
    gf2.check_m(m)


def partial_spread(m: int, r: int) -> Spread:
    """2^(m-r) subspaces of dimension r, pairwise trivially intersecting.

    Z2^m is split as K (+) F with K the top m-r coordinates and F the low r;
    F embeds into K as its low r coordinates, and each a in GF(2^(m-r)) gives
    the graph {(a * y, y) : y in F}.
    """
    _check_spread_params(m, r)
    k = m - r
    modulus = gf2.default_modulus(k)
    subspaces = []
    for a in range(1 << k):
        rows = []
        for i in range(r):
            y = 1 << i
            rows.append((gf2.poly_mulmod(a, y, modulus) << r) | y)
        subspaces.append(tuple(gf2.echelon(rows)))
    return Spread(m, r, tuple(subspaces))


def flats_through_point(m: int, r: int, v: int) -> list[Flat]:
    """2^(m-r)-2 r-flats through v meeting pairwise exactly in {v}."""
    spread = partial_spread(m, r)
    need = (1 << (m - r)) - 2
    return [Flat.make(m, v, s) for s in spread.subspaces[:need]]


def affine_map(m: int, linear_images: Sequence[int], shift: int):
    """Callable x -> A x + shift with A given by images of the unit vectors."""
    if gf2.rank(linear_images) != m:
        raise GF2Error("linear part is not invertible")

    def apply(x: int) -> int:
        return gf2.apply_linear(linear_images, x) ^ shift

    return apply


def map_flat(flat: Flat, linear_images: Sequence[int], shift: int = 0) -> Flat:
    base = gf2.apply_linear(linear_images, flat.base) ^ shift
    return Flat.make(flat.m, base, [gf2.apply_linear(linear_images, b) for b in flat.basis])


def stabilizing_map(src: Flat, dst: Flat, v: int) -> tuple[list[int], int]:
    """Affine map fixing v and carrying ``src`` onto ``dst`` (both contain v).

    Returned as (images of unit vectors, shift).
    """
    if v not in src or v not in dst or src.dim != dst.dim:
        raise GeometryError("both flats must contain v and share a dimension")
    m = src.m
    s_full = gf2.complete_basis(list(src.basis), m)
    d_full = gf2.complete_basis(list(dst.basis), m)
    images = gf2.linear_map_from_bases(s_full, d_full, m)
    shift = v ^ gf2.apply_linear(images, v)
    return images, shift
