"""Two-step majority-logic decoding.

Step 1 estimates, for every used r-flat, whether it carries an odd number of
errors: each of its check (r+1)-flats contributes the parity of the received
word over that superflat, and the flat is flagged when at least
2^(m-r-1) of the 2^(m-r)-2 parities are 1.  Step 2 flips a position when at
least 2^(m-r-1) of its used flats are flagged.

Words are packed ints (bit j = position j) for single decodes and 0/1 numpy
arrays of shape (batch, n) for batch decodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds.closed_forms import rm1_exact, upper_33a, upper_33b
from .code import CodeSpec, encode, extract_info
from .families import AdmissibleFamily, construct_full_cover, validate
from .gf2 import BitMatrix
from .geometry import Flat, superflats

FULL = "full"
INFO = "info"

_BATCH_CHUNK = 32768


class DecoderError(ValueError):
    pass


@dataclass(frozen=True)
class GateCount:
    step1: int
    step2: int
    inputs_per_gate: int

    @property
    def total(self) -> int:
        return self.step1 + self.step2


@dataclass(frozen=True, eq=False)
class CheckSystem:
    spec: CodeSpec
    scope: str  # FULL or INFO
    positions: tuple[int, ...]  # decoded positions, in output order
    flats: tuple[Flat, ...]
    checks: tuple[tuple[Flat, ...], ...]  # per flat, its check superflats
    usage: dict  # position -> tuple of flat indices
    avoid_zero: bool = False
    _arrays: dict = field(default_factory=dict, repr=False)

    @property
    def gates(self) -> GateCount:
        return GateCount(len(self.flats), len(self.positions), self.spec.votes)

    @property
    def punctured_position(self) -> int | None:
        return self.spec.ordering.position(0) if self.avoid_zero else None

    def check_words(self) -> list[list[int]]:
        order = self.spec.ordering
        return [[c.word(order) for c in group] for group in self.checks]

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """(check rows, position-by-flat usage) as float32 0/1 arrays, cached."""
        got = self._arrays.get("m")
        if got is None:
            n = self.spec.n
            order = self.spec.ordering
            rows = np.zeros((len(self.flats) * self.spec.votes, n), dtype=np.float32)
            r = 0
            for group in self.checks:
                for c in group:
                    rows[r, order.positions(c.points)] = 1
                    r += 1
            use = np.zeros((len(self.positions), len(self.flats)), dtype=np.float32)
            for row, j in enumerate(self.positions):
                use[row, list(self.usage[j])] = 1
            got = (rows, use)
            self._arrays["m"] = got
        return got


def select_checks(flat: Flat, count: int, avoid_zero: bool = False) -> tuple[Flat, ...]:
    """``count`` of the superflats of ``flat``: drop the largest, or the one through 0."""
    sup = superflats(flat)
    if avoid_zero:
        if 0 in flat:
            raise DecoderError(f"{flat} contains the punctured point")
        keep = [s for s in sup if 0 not in s]
    else:
        keep = sup[:-1]
    if len(keep) != count:
        raise DecoderError(f"expected {count} check flats, found {len(keep)}")
    return tuple(keep)


def _compile(spec: CodeSpec, scope: str, fam: AdmissibleFamily, positions: Sequence[int],
             avoid_zero: bool) -> CheckSystem:
    checks = tuple(select_checks(f, spec.votes, avoid_zero) for f in fam.flats)
    usage = {j: tuple(fam.usage[j]) for j in positions}
    return CheckSystem(spec, scope, tuple(positions), tuple(fam.flats), checks, usage, avoid_zero)


def compile_full(spec: CodeSpec) -> CheckSystem:
    """Chen's decoder for all 2^m positions."""
    fam = construct_full_cover(spec)
    return _compile(spec, FULL, fam, range(spec.n), False)


def compile_info(spec: CodeSpec, fam: AdmissibleFamily, avoid_zero: bool = False) -> CheckSystem:
    """Decoder for the information positions of an admissible family."""
    if fam.spec.r != spec.r or fam.spec.m != spec.m:
        raise DecoderError("family belongs to a different code")
    validate(fam)
    return _compile(spec, INFO, fam, fam.J, avoid_zero)


def compile_punctured(fam: AdmissibleFamily) -> CheckSystem:
    """Information decoder whose checks never read the position of the point 0."""
    return compile_info(fam.spec, fam, avoid_zero=True)


def chen_gates(spec: CodeSpec) -> GateCount:
    q = 1 << (spec.m - spec.r)
    return GateCount(q * (q - 2), spec.n, spec.votes)


# -- single-word decoding -----------------------------------------------------

def parity_vote(y: int, flat_checks: Sequence[int]) -> int:
    """1 iff at least half-plus-one of the check parities are odd."""
    ones = sum((y & c).bit_count() & 1 for c in flat_checks)
    threshold = (len(flat_checks) + 2) // 2
    return int(ones >= threshold)


@dataclass(frozen=True)
class DecodeResult:
    word: int  # received word with the flips applied
    flips: frozenset
    info: tuple[int, ...] | None = None  # bits at the decoded positions (INFO scope)


def _expand(y, sys: CheckSystem) -> int:
    """Accept a packed int, or a 0/1 sequence of length n (or n-1 when punctured)."""
    n = sys.spec.n
    if isinstance(y, (int, np.integer)):
        y = int(y)
        if y < 0 or y >> n:
            raise DecoderError("word does not fit the code length")
        return y
    bits = [int(b) for b in y]
    if any(b not in (0, 1) for b in bits):
        raise DecoderError("words are 0/1 sequences")
    if len(bits) == n - 1 and sys.avoid_zero:
        bits.insert(sys.punctured_position, 0)
    if len(bits) != n:
        raise DecoderError(f"expected {n} symbols, got {len(bits)}")
    word = 0
    for j, b in enumerate(bits):
        word |= b << j
    return word


def decode(y, sys: CheckSystem) -> DecodeResult:
    word = _expand(y, sys)
    words = sys._arrays.get("w")
    if words is None:
        words = sys.check_words()
        sys._arrays["w"] = words
    odd = [parity_vote(word, group) for group in words]
    threshold = sys.spec.threshold
    flips = frozenset(j for j in sys.positions if sum(odd[s] for s in sys.usage[j]) >= threshold)
    out = word
    for j in flips:
        out ^= 1 << j
    info = tuple(out >> j & 1 for j in sys.positions) if sys.scope == INFO else None
    return DecodeResult(out, flips, info)


def decode_info_checked(y, sys: CheckSystem, G_sys: BitMatrix) -> tuple[tuple[int, ...], bool]:
    """Information bits plus whether the re-encoded word lies within t of ``y``."""
    if sys.scope != INFO:
        raise DecoderError("consistency check needs an information-position system")
    res = decode(y, sys)
    word = _expand(y, sys)
    cw = encode(G_sys, extract_info(res.word, sys.positions))
    diff = cw ^ word
    p = sys.punctured_position
    if p is not None:
        diff &= ~(1 << p)
    return res.info, diff.bit_count() <= sys.spec.t


# -- batch decoding ------------------------------------------------------------

def decode_batch(Y: np.ndarray, sys: CheckSystem) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised decode of a (batch, n) 0/1 array.

    Returns (corrected words, flip indicators over ``sys.positions``).
    """
    Y = np.asarray(Y)
    n = sys.spec.n
    if Y.ndim != 2:
        raise DecoderError("expected a 2-d array of words")
    if Y.shape[1] == n - 1 and sys.avoid_zero:
        Y = np.insert(Y, sys.punctured_position, 0, axis=1)
    if Y.shape[1] != n:
        raise DecoderError(f"expected {n} columns, got {Y.shape[1]}")
    rows, use = sys.matrices()
    votes, thr = sys.spec.votes, sys.spec.threshold
    cols = np.asarray(sys.positions)
    out = Y.astype(np.uint8, copy=True)
    flips = np.zeros((len(Y), len(cols)), dtype=bool)
    for lo in range(0, len(Y), _BATCH_CHUNK):
        chunk = Y[lo:lo + _BATCH_CHUNK].astype(np.float32)
        parity = (chunk @ rows.T).astype(np.int64) & 1
        odd = parity.reshape(len(chunk), -1, votes).sum(axis=2) >= thr
        f = (odd.astype(np.float32) @ use.T) >= thr
        flips[lo:lo + len(chunk)] = f
        out[lo:lo + len(chunk), cols] ^= f.astype(np.uint8)
    return out, flips


def decode_info_checked_batch(Y: np.ndarray, sys: CheckSystem, G_sys: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Batch form of :func:`decode_info_checked`: (info bits, consistency flags)."""
    if sys.scope != INFO:
        raise DecoderError("consistency check needs an information-position system")
    Y = np.asarray(Y)
    if Y.ndim == 2 and Y.shape[1] == sys.spec.n - 1 and sys.avoid_zero:
        Y = np.insert(Y, sys.punctured_position, 0, axis=1)
    out, _ = decode_batch(Y, sys)
    info = out[:, list(sys.positions)]
    G = G_sys.to_array().astype(np.float32)
    cw = (info.astype(np.float32) @ G).astype(np.int64) & 1
    diff = cw != Y
    p = sys.punctured_position
    if p is not None:
        diff[:, p] = False
    return info, diff.sum(axis=1) <= sys.spec.t


# -- gate accounting -----------------------------------------------------------

# exact family sizes with a known admissible family: (r, m) -> size
KNOWN_SIZES = {(2, 4): 7, (2, 5): 30}


@dataclass(frozen=True)
class GateRow:
    r: int
    m: int
    chen: int
    improved: int
    exact: bool  # False: the improved entry is an upper bound from a construction
    note: str = ""


def improved_family_size(spec: CodeSpec, known: dict | None = None) -> tuple[int, bool]:
    """(size, exact) for the smallest family this package can vouch for."""
    known = KNOWN_SIZES if known is None else known
    if spec.r == 1:
        return rm1_exact(spec.m), True
    if (spec.r, spec.m) in known:
        return known[(spec.r, spec.m)], True
    return min(upper_33a(spec.r, spec.m), upper_33b(spec.r, spec.m)), False


def gate_table(rows: Sequence[tuple[int, int]], known: dict | None = None) -> list[GateRow]:
    out = []
    for r, m in rows:
        spec = CodeSpec(r, m)
        size, exact = improved_family_size(spec, known)
        out.append(GateRow(r, m, chen_gates(spec).total, size + spec.k, exact))
    return out


__all__ = [
    "FULL",
    "INFO",
    "KNOWN_SIZES",
    "CheckSystem",
    "DecodeResult",
    "DecoderError",
    "GateCount",
    "GateRow",
    "chen_gates",
    "compile_full",
    "compile_info",
    "compile_punctured",
    "decode",
    "decode_batch",
    "decode_info_checked",
    "decode_info_checked_batch",
    "gate_table",
    "improved_family_size",
    "parity_vote",
    "select_checks",
]
