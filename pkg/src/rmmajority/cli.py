"""Command-line interface: ``rmmajority <command> [options]``.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gf2
from .code import CodeError, CodeSpec, canonical_information_set, encode, is_information_set, systematic_form
from .decoder import chen_gates, compile_full, compile_info, compile_punctured, decode, decode_info_checked, decode_batch
from .families import (
    AdmissibilityError, FamilyFormatError, construct_full_cover, construct_naive, construct_rm1, construct_upper_a,
    construct_upper_b, family_from_text, family_to_text, restrict_to, search_family, validate,
)
from .fixtures import FixtureError, info_set_types, load_witnesses
from .reports import TABLES, bounds_record, render_checks, verify

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
CONSTRUCT_KINDS = ("full", "naive", "33a", "33b", "rm1")


class UsageError(Exception):
    pass


# -- argument helpers ----------------------------------------------------------

def _read_source(text: str) -> str:
    """``@path`` reads a file, ``-`` reads standard input, anything else is literal."""
    if text == "-":
        return sys.stdin.read()
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc.strerror}") from None
    return text


def _weights(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad weight range {text!r}")
    return range(a, b + 1)


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a hex polynomial, got {text!r}") from None


def _spec(args) -> CodeSpec:
    try:
        ordering = gf2.make_ordering(args.m, args.ordering, args.modulus)
        return CodeSpec(args.r, args.m, ordering)
    except (CodeError, gf2.GF2Error) as exc:
        raise UsageError(str(exc)) from None


def _info_set(spec: CodeSpec, text: str | None) -> tuple[int, ...]:
    if text is None or text == "canonical":
        return canonical_information_set(spec)
    if text.startswith("type"):
        key = text[4:]
        if (spec.r, spec.m, spec.ordering.kind) != (2, 5, "power") or key not in info_set_types():
            raise UsageError(f"{text} needs RM(2,5) under the power ordering and a type in 1..7 or 7p")
        if spec.ordering.modulus != gf2.default_modulus(5):
            raise UsageError("the type representatives are tabulated for the default modulus")
        return info_set_types()[key]
    body = _read_source(text)
    try:
        J = tuple(sorted(int(tok) for tok in body.replace(",", " ").replace("{", " ").replace("}", " ").split()))
    except ValueError:
        raise UsageError(f"cannot parse information set {text!r}") from None
    if len(set(J)) != spec.k or not all(0 <= j < spec.n for j in J) or not is_information_set(spec, J):
        raise UsageError(f"{list(J)} is not an information set of {spec}")
    return J


def _family(spec: CodeSpec, args, J: tuple[int, ...] | None):
    src = args.family
    if src is None:
        return None
    try:
        if src.startswith("witness:"):
            wit = load_witnesses()
            name = src.split(":", 1)[1]
            if name not in wit:
                raise UsageError(f"unknown witness {name!r}; known: {', '.join(sorted(wit))}")
            fam = wit[name]
        elif src.startswith("construct:"):
            kind = src.split(":", 1)[1]
            if kind == "full":
                fam = construct_full_cover(spec)
                fam = restrict_to(fam, J if J is not None else canonical_information_set(spec))
            elif kind == "naive":
                fam = construct_naive(spec, J if J is not None else canonical_information_set(spec))
            elif kind == "33a":
                fam = construct_upper_a(spec)
            elif kind == "33b":
                fam = construct_upper_b(spec)
            elif kind == "rm1":
                if spec.r != 1:
                    raise UsageError("construct:rm1 needs r = 1")
                fam = construct_rm1(spec.m, spec.ordering)
            else:
                raise UsageError(f"unknown construction {kind!r}; choose from {', '.join(CONSTRUCT_KINDS)}")
        elif src == "search":
            fam = search_family(spec, J if J is not None else canonical_information_set(spec),
                                budget=args.budget or 200, seed=args.seed)
        else:
            fam = family_from_text(_read_source(src))
    except (FamilyFormatError, FixtureError, CodeError) as exc:
        raise UsageError(str(exc)) from None
    if (fam.spec.r, fam.spec.m) != (spec.r, spec.m):
        raise UsageError(f"family is for RM({fam.spec.r},{fam.spec.m}), not {spec}")
    if fam.spec.ordering.points != spec.ordering.points:
        raise UsageError(f"family uses the {fam.spec.ordering.label()} ordering; pass a matching --ordering")
    try:
        validate(fam)
    except AdmissibilityError as exc:
        raise UsageError(f"invalid family: {exc}") from None
    return fam


def _needed_info_set(spec: CodeSpec, args) -> tuple[int, ...] | None:
    """The --info-set positions when the family source builds on them."""
    if args.family in (None, "search", "construct:full", "construct:naive"):
        return _info_set(spec, args.info_set)
    return None


def _words(args, length: Sequence[int]) -> list[str]:
    body = _read_source(args.input)
    out = []
    for ln in body.split():
        if any(ch not in "01" for ch in ln) or len(ln) not in length:
            raise UsageError(f"expected 0/1 strings of length {' or '.join(map(str, length))}, got {ln!r}")
        out.append(ln)
    return out


def _emit(args, text_lines: list[str], records: list[dict]) -> None:
    if args.format == "records":
        for rec in records:
            print(json.dumps(rec, sort_keys=True))
    else:
        for ln in text_lines:
            print(ln)


# -- commands --------------------------------------------------------------------

def cmd_encode(args) -> int:
    spec = _spec(args)
    fam = _family(spec, args, None)
    J = fam.J if fam is not None else _info_set(spec, args.info_set)
    G = systematic_form(spec, J)
    lines, recs = [], []
    for w in _words(args, (spec.k,)):
        cw = gf2.bits_to_str(encode(G, gf2.str_to_bits(w)), spec.n)
        lines.append(cw)
        recs.append({"info": w, "codeword": cw})
    _emit(args, lines, recs)
    return EXIT_OK


def cmd_decode(args) -> int:
    spec = _spec(args)
    fam = _family(spec, args, _needed_info_set(spec, args))
    if args.punctured and fam is None:
        raise UsageError("--punctured needs --family")
    if fam is None:
        system = compile_full(spec)
        G = None
    else:
        try:
            system = compile_punctured(fam) if args.punctured else compile_info(spec, fam)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        G = systematic_form(spec, fam.J)
    lengths = (spec.n - 1,) if args.punctured else (spec.n,)
    lines, recs = [], []
    for w in _words(args, lengths):
        bits = [int(ch) for ch in w]
        res = decode(bits, system)
        flips = sorted(res.flips)
        if G is None:
            out = gf2.bits_to_str(res.word, spec.n)
            rec = {"word": out, "flips": flips}
        else:
            info, consistent = decode_info_checked(bits, system, G)
            out = "".join(map(str, info))
            rec = {"info": out, "flips": flips, "consistent": consistent}
        recs.append(rec)
        lines.append(" ".join([out, "flips=" + ",".join(map(str, flips)),
                               *([f"consistent={str(rec['consistent']).lower()}"] if "consistent" in rec else [])]))
    _emit(args, lines, recs)
    return EXIT_OK


def _wilson(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def _default_family_source(spec: CodeSpec) -> str:
    if (spec.r, spec.m, spec.ordering.kind) == (2, 5, "power"):
        return "witness:rm25-type1-30"
    if (spec.r, spec.m, spec.ordering.kind) == (2, 4, "lex"):
        return "witness:rm24-7"
    return "construct:rm1" if spec.r == 1 else "construct:33b"


def cmd_simulate(args) -> int:
    spec = _spec(args)
    if args.family is None:
        args.family = _default_family_source(spec)
    fam = _family(spec, args, _needed_info_set(spec, args))
    full = compile_full(spec)
    info = compile_info(spec, fam)
    G = systematic_form(spec, fam.J).to_array().astype(np.int64)
    cols = list(fam.J)
    rng = np.random.default_rng(args.seed)
    trials = args.trials
    lines = [f"simulate {spec} family={args.family} seed={args.seed} trials={trials}",
             f"gates: chen={full.gates.total} info={info.gates.total}",
             "weight  full_rate  full_ci95            info_rate  info_ci95"]
    recs = []
    for w in args.weights:
        if w > spec.n:
            raise UsageError(f"weight {w} exceeds the length {spec.n}")
        msgs = rng.integers(0, 2, size=(trials, spec.k))
        cw = ((msgs @ G) & 1).astype(np.uint8)
        err = np.zeros_like(cw)
        for row in range(trials):
            err[row, rng.choice(spec.n, size=w, replace=False)] = 1
        Y = cw ^ err
        out_full, _ = decode_batch(Y, full)
        out_info, _ = decode_batch(Y, info)
        ok_full = int((out_full == cw).all(axis=1).sum())
        ok_info = int((out_info[:, cols] == msgs).all(axis=1).sum())
        cf, ci = _wilson(ok_full, trials), _wilson(ok_info, trials)
        rec = {"r": spec.r, "m": spec.m, "weight": w, "trials": trials, "seed": args.seed,
               "full_rate": ok_full / trials, "full_ci95": [round(cf[0], 6), round(cf[1], 6)],
               "info_rate": ok_info / trials, "info_ci95": [round(ci[0], 6), round(ci[1], 6)],
               "gates_full": full.gates.total, "gates_info": info.gates.total}
        recs.append(rec)
        lines.append(f"{w:6d}  {rec['full_rate']:9.6f}  [{cf[0]:.6f}, {cf[1]:.6f}]  "
                     f"{rec['info_rate']:9.6f}  [{ci[0]:.6f}, {ci[1]:.6f}]")
    _emit(args, lines, recs)
    return EXIT_OK


def cmd_tables(args) -> int:
    unknown = [w for w in args.which if w not in TABLES]
    if unknown:
        raise UsageError(f"unknown table {unknown[0]!r}; choose from {', '.join(TABLES)}")
    status = EXIT_OK
    for which in args.which or list(TABLES):
        rep = TABLES[which]()
        sys.stdout.write(rep.render_records() if args.format == "records" else rep.render_text())
        if not rep.ok:
            status = EXIT_MISMATCH
    return status


def cmd_verify(args) -> int:
    types = tuple(args.types.split(",")) if args.types else ("1",)
    checks = verify(long=args.long, budget=args.budget, types=types)
    sys.stdout.write(render_checks(checks, args.format))
    return EXIT_MISMATCH if any(c.ok is False for c in checks) else EXIT_OK


def cmd_bounds(args) -> int:
    if args.r is not None and args.m is not None:
        rows = [(args.r, args.m)]
    else:
        rows = [(1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (2, 4), (2, 5), (2, 6), (2, 7), (3, 6), (3, 7)]
    recs = []
    for r, m in rows:
        try:
            recs.append(bounds_record(CodeSpec(r, m)))
        except CodeError as exc:
            raise UsageError(str(exc)) from None
    keys = ["r", "m", "lower_trivial", "ilp", "upper_33a", "upper_33b", "upper_III1"]
    lines = ["  ".join(f"{k:>13}" for k in keys)]
    lines += ["  ".join(f"{rec[k]:>13}" for k in keys) for rec in recs]
    _emit(args, lines, [{k: rec[k] for k in keys} for rec in recs])
    return EXIT_OK


def cmd_family(args) -> int:
    spec = _spec(args)
    if args.action == "validate":
        if args.family is None:
            raise UsageError("family validate needs --family")
        try:
            fam = family_from_text(_read_source(args.family)) if not args.family.startswith(("witness:", "construct:")) \
                else _family(spec, args, None)
        except FamilyFormatError as exc:
            raise UsageError(str(exc)) from None
        try:
            prof = validate(fam)
        except AdmissibilityError as exc:
            _emit(args, [f"invalid: {exc}"], [{"valid": False, "error": str(exc)}])
            return EXIT_MISMATCH
        _emit(args, [f"valid: {len(fam.flats)} flats, profile (x_2^r..x_1) = {prof.descending()}"],
              [{"valid": True, "size": len(fam.flats), "profile": list(prof.descending())}])
        return EXIT_OK
    if args.action == "search":
        J = _info_set(spec, args.info_set)
        fam = search_family(spec, J, budget=args.budget or 200, seed=args.seed)
    else:  # show
        if args.family is None:
            raise UsageError("family show needs --family")
        fam = _family(spec, args, _needed_info_set(spec, args))
    if args.format == "records":
        print(json.dumps({"size": len(fam.flats), "J": list(fam.J), "meta": {k: str(v) for k, v in fam.meta.items()},
                          "profile": list(validate(fam).descending())}, sort_keys=True))
    else:
        sys.stdout.write(f"# seed={args.seed} size={len(fam.flats)}\n" + family_to_text(fam))
    return EXIT_OK


def cmd_gates(args) -> int:
    spec = _spec(args)
    g = chen_gates(spec)
    _emit(args, [f"{spec}: step1={g.step1} step2={g.step2} total={g.total} inputs={g.inputs_per_gate}"],
          [{"r": spec.r, "m": spec.m, "step1": g.step1, "step2": g.step2, "total": g.total}])
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, need_code: bool = True) -> None:
    if need_code:
        p.add_argument("--r", type=int, default=2, help="order r (default 2)")
        p.add_argument("--m", type=int, default=5, help="number of variables m (default 5)")
    else:
        p.add_argument("--r", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
    p.add_argument("--ordering", choices=("auto", "lex", "power"), default="auto",
                   help="position ordering; auto = power for m=5, lex otherwise")
    p.add_argument("--modulus", type=_hex, default=None, help="primitive polynomial for the power ordering, hex")
    p.add_argument("--info-set", default=None, help="canonical, type1..type7, type7p, a list, or @file")
    p.add_argument("--family", default=None,
                   help="witness:NAME, construct:{full,naive,33a,33b,rm1}, search, or @file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="iteration or node budget")
    p.add_argument("--weights", type=_weights, default=range(0, 4), help="error weights A..B")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.add_argument("--long", action="store_true", help="include the long-running checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmmajority", description="Reed-Muller majority-logic decoding toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="systematically encode information words")
    _common(p)
    p.add_argument("input", nargs="?", default="-", help="0/1 strings, @file, or - for stdin")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="majority-logic decode received words")
    _common(p)
    p.add_argument("--punctured", action="store_true", help="read n-1 symbols; needs --family")
    p.add_argument("input", nargs="?", default="-")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="error-injection statistics for both decoders")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", help="recompute the reference tables and diff against fixtures")
    _common(p, need_code=False)
    p.add_argument("which", nargs="*", metavar="{" + ",".join(TABLES) + "}", help="tables to rebuild (default all)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("verify", help="witnesses, ILP optima and exclusion searches")
    _common(p, need_code=False)
    p.add_argument("--types", default=None, help="comma-separated types for --long (default 1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="closed-form and ILP bounds")
    _common(p, need_code=False)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("family", help="search, show or validate admissible families")
    _common(p)
    p.add_argument("action", choices=("search", "show", "validate"))
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("gates", help="gate counts of Chen's decoder")
    _common(p)
    p.set_defaults(func=cmd_gates)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rmmajority: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FixtureError as exc:
        print(f"rmmajority: fixture error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
