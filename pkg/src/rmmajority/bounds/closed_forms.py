"""Closed-form bounds on the minimal admissible family size."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import ceil, comb

from ..code import CodeSpec


@dataclass(frozen=True)
class ClosedFormBounds:
    r: int
    m: int
    lower_trivial: int
    upper_III1: int
    upper_III2: int
    upper_33a: int
    upper_33b: int

    @property
    def best_upper(self) -> int:
        return min(self.upper_III1, self.upper_III2, self.upper_33a, self.upper_33b)

    def as_record(self) -> dict:
        return asdict(self)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def full_cover_size(r: int, m: int) -> int:
    q = 1 << (m - r)
    return q * (q - 2)


def upper_33a(r: int, m: int) -> int:
    k = sum(comb(m, i) for i in range(r + 1))
    b = r.bit_length()  # ceil(log2(r+1))
    tail = sum(comb(m - 1 - s, r - s) for s in range(b))
    return k * ((1 << (m - r)) - 3) + comb(m - b, r - b) + _ceil_div(tail, r + 1)


def upper_33b(r: int, m: int) -> int:
    saved = (m // r) * sum(comb(m - r, s) for s in range(m - 2 * r))
    return full_cover_size(r, m) - saved


def bound_closed_forms(spec: CodeSpec) -> ClosedFormBounds:
    r, m, k = spec.r, spec.m, spec.k
    votes = spec.votes
    return ClosedFormBounds(
        r=r,
        m=m,
        lower_trivial=_ceil_div(k * votes, 1 << r),
        upper_III1=full_cover_size(r, m),
        upper_III2=k * votes,
        upper_33a=upper_33a(r, m),
        upper_33b=upper_33b(r, m),
    )


def rm1_exact(m: int) -> int:
    """(m+1)(2^m - m - 4)/2 for m >= 4, and 4 for m = 3."""
    if m == 3:
        return 4
    return (m + 1) * ((1 << m) - m - 4) // 2


def rm1_upper(m: int) -> int:
    return ceil((m + 1) * ((1 << m) - 5) / 2)
