"""Bit-packed linear algebra over GF(2) and the GF(2^m) power ordering.

Points of Z2^m and words of Z2^(2^m) are plain Python ints: bit ``i`` of a
point is the coordinate of ``e_{i+1}``, bit ``j`` of a word is position ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_M = 16


class GF2Error(ValueError):
    pass


def check_m(m: int) -> None:
    if not 1 <= m <= MAX_M:
        raise GF2Error(f"m={m} outside supported range 1..{MAX_M}")


@dataclass(frozen=True)
class BitMatrix:
    """Row-packed binary matrix; ``rows[i]`` bit ``j`` is entry (i, j)."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for row in self.rows:
            if row < 0 or row >= limit:
                raise GF2Error(f"row {row:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim != 2:
            raise GF2Error("expected a 2-d array")
        return cls(tuple(pack_bits(row) for row in arr), arr.shape[1])

    def to_array(self) -> np.ndarray:
        return np.array([unpack_bits(row, self.ncols) for row in self.rows], dtype=np.uint8).reshape(
            self.nrows, self.ncols
        )

    def column(self, j: int) -> int:
        """Column ``j`` packed as an int over the row index."""
        col = 0
        for i, row in enumerate(self.rows):
            if row >> j & 1:
                col |= 1 << i
        return col

    def select_columns(self, cols: Sequence[int]) -> "BitMatrix":
        rows = []
        for row in self.rows:
            packed = 0
            for t, j in enumerate(cols):
                if row >> j & 1:
                    packed |= 1 << t
            rows.append(packed)
        return BitMatrix(tuple(rows), len(cols))

    def to_text(self) -> str:
        """One line per row of ``0``/``1`` characters, column 0 first."""
        return "\n".join(bits_to_str(row, self.ncols) for row in self.rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise GF2Error("empty matrix text")
        ncols = len(lines[0])
        if any(len(ln) != ncols for ln in lines):
            raise GF2Error("ragged matrix text")
        return cls(tuple(str_to_bits(ln) for ln in lines), ncols)


def pack_bits(bits: Iterable[int]) -> int:
    word = 0
    for j, b in enumerate(bits):
        if b:
            word |= 1 << j
    return word


def unpack_bits(word: int, n: int) -> list[int]:
    return [(word >> j) & 1 for j in range(n)]


def bits_to_str(word: int, n: int) -> str:
    return "".join("1" if word >> j & 1 else "0" for j in range(n))


def str_to_bits(text: str) -> int:
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise GF2Error(f"not a 0/1 string: {text!r}")
    return pack_bits(ch == "1" for ch in text)


def popcount(x: int) -> int:
    return x.bit_count()


def echelon(rows: Iterable[int]) -> list[int]:
    """Reduced row echelon basis of the span, pivots on leading bits, sorted descending."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            # clear the new pivot from existing rows
            top = 1 << (v.bit_length() - 1)
            basis = [b ^ v if b & top else b for b in basis]
            basis.append(v)
    basis.sort(reverse=True)
    return basis


def rank(rows: Iterable[int] | BitMatrix) -> int:
    if isinstance(rows, BitMatrix):
        rows = rows.rows
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def in_span(v: int, basis: Sequence[int]) -> bool:
    """Membership test; ``basis`` must come from :func:`echelon`."""
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


def reduce(v: int, basis: Sequence[int]) -> int:
    for b in basis:
        v = min(v, v ^ b)
    return v


def span(basis: Sequence[int]) -> list[int]:
    """All 2^len(basis) combinations, in Gray-code order starting at 0."""
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return out


def solve_coordinates(v: int, basis: Sequence[int]) -> int:
    """Coefficient mask c with XOR of basis[i] over set bits i equal to v.

    Raises GF2Error if the basis is dependent or v is outside its span.
    """
    n = len(basis)
    # augmented rows: value in high part, tag bits in low n bits
    aug = [(b << n) | (1 << i) for i, b in enumerate(basis)]
    pivots: list[int] = []
    for row in aug:
        for p in pivots:
            row = min(row, row ^ p)
        if row >> n == 0:
            raise GF2Error("basis is linearly dependent")
        pivots.append(row)
        pivots.sort(reverse=True)
    target = v << n
    for p in pivots:
        target = min(target, target ^ p)
    if target >> n:
        raise GF2Error("vector not in span of basis")
    return target & ((1 << n) - 1)


def weight_wrt_basis(v: int, basis: Sequence[int]) -> int:
    """Number of nonzero coefficients of ``v`` written in ``basis``."""
    return popcount(solve_coordinates(v, basis))


def complete_basis(partial: Sequence[int], m: int) -> list[int]:
    """Extend independent ``partial`` to a basis of Z2^m with unit vectors."""
    out = list(partial)
    if rank(out) != len(out):
        raise GF2Error("partial basis is dependent")
    ech = echelon(out)
    for i in range(m):
        e = 1 << i
        if not in_span(e, ech):
            out.append(e)
            ech = echelon(out)
    return out


def apply_linear(images: Sequence[int], v: int) -> int:
    """Image of v under the linear map sending e_{i+1} to images[i]."""
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= images[i]
        v >>= 1
        i += 1
    return out


def linear_map_from_bases(src: Sequence[int], dst: Sequence[int], m: int) -> list[int]:
    """Images of unit vectors for the linear map with src[i] -> dst[i].

    ``src`` and ``dst`` must both be bases of Z2^m.
    """
    if len(src) != m or len(dst) != m:
        raise GF2Error("need full bases")
    images = []
    for i in range(m):
        coeffs = solve_coordinates(1 << i, src)
        img = 0
        for t in range(m):
            if coeffs >> t & 1:
                img ^= dst[t]
        images.append(img)
    if rank(images) != m:
        raise GF2Error("destination vectors are dependent")
    return images


# GF(2^m) arithmetic, only as far as the orderings and the spread need it


def poly_mulmod(a: int, b: int, modulus: int) -> int:
    deg = modulus.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= modulus
    return out


def multiplicative_order_of_x(modulus: int) -> int:
    """Order of x in (Z2[x]/modulus)^*, 0 if x is not invertible or never returns to 1."""
    deg = modulus.bit_length() - 1
    if deg < 1 or not modulus & 1:
        return 0
    limit = (1 << deg) - 1
    cur = 1
    for k in range(1, limit + 1):
        cur = poly_mulmod(cur, 2, modulus)
        if cur == 1:
            return k
    return 0


def is_primitive(modulus: int) -> bool:
    deg = modulus.bit_length() - 1
    return deg >= 1 and multiplicative_order_of_x(modulus) == (1 << deg) - 1


def default_modulus(m: int) -> int:
    """Smallest primitive polynomial of degree m (bit i = coefficient of x^i)."""
    check_m(m)
    for poly in range((1 << m) | 1, 1 << (m + 1), 2):
        if is_primitive(poly):
            return poly
    raise GF2Error(f"no primitive polynomial of degree {m}")  # unreachable


@dataclass(frozen=True)
class Ordering:
    """Position j <-> point ``points[j]`` of Z2^m."""

    m: int
    points: tuple[int, ...]
    kind: str = "lex"
    modulus: int | None = None

    def __post_init__(self):
        check_m(self.m)
        n = 1 << self.m
        if len(self.points) != n or sorted(self.points) != list(range(n)):
            raise GF2Error("ordering must be a permutation of Z2^m")
        object.__setattr__(self, "_index", {p: j for j, p in enumerate(self.points)})

    def position(self, point: int) -> int:
        return self._index[point]

    def positions(self, points: Iterable[int]) -> list[int]:
        return sorted(self._index[p] for p in points)

    def word_of(self, points: Iterable[int]) -> int:
        """Characteristic word of a point set."""
        w = 0
        idx = self._index
        for p in points:
            w |= 1 << idx[p]
        return w

    def label(self) -> str:
        if self.kind == "power":
            return "power" if self.modulus == default_modulus(self.m) else f"power:{self.modulus:#x}"
        return self.kind


def lex_ordering(m: int) -> Ordering:
    check_m(m)
    return Ordering(m, tuple(range(1 << m)), "lex")


def power_ordering(m: int, modulus: int | None = None) -> Ordering:
    """Position j -> alpha^j for j < 2^m - 1, last position -> 0."""
    check_m(m)
    if modulus is None:
        modulus = default_modulus(m)
    if modulus.bit_length() - 1 != m:
        raise GF2Error(f"modulus {modulus:#x} does not have degree {m}")
    order = multiplicative_order_of_x(modulus)
    if order != (1 << m) - 1:
        raise GF2Error(
            f"modulus {modulus:#x} is not primitive: alpha has order {order or 'undefined'}, "
            f"expected {(1 << m) - 1}"
        )
    pts = []
    cur = 1
    for _ in range((1 << m) - 1):
        pts.append(cur)
        cur = poly_mulmod(cur, 2, modulus)
    pts.append(0)
    return Ordering(m, tuple(pts), "power", modulus)


def make_ordering(m: int, kind: str = "auto", modulus: int | None = None) -> Ordering:
    """``auto`` picks the power ordering for m=5 and lexicographic otherwise."""
    if kind == "auto":
        kind = "power" if m == 5 else "lex"
    if kind == "lex":
        return lex_ordering(m)
    if kind == "power":
        return power_ordering(m, modulus)
    raise GF2Error(f"unknown ordering kind {kind!r}")


def parse_ordering_label(m: int, label: str) -> Ordering:
    if label.startswith("power:"):
        return power_ordering(m, int(label.split(":", 1)[1], 16))
    return make_ordering(m, label)
