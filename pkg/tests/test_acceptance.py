"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) and then asserts, so a failing criterion fails the suite.
Run directly with ``python tests/test_acceptance.py`` for the lines alone.
"""

import os
import time
from itertools import combinations
from math import ceil

import numpy as np

from rmmajority.analysis import intersection_profile
from rmmajority.bounds import bound_closed_forms, enumerate_ilp, solve_ilp
from rmmajority.bounds.exclusion import (
    EXCLUDED,
    FOUND,
    FamilySearch,
    exclude_28_report,
    exclude_29,
    search_admissible,
)
from rmmajority.code import CodeSpec, build_generator, canonical_information_set, systematic_form
from rmmajority.decoder import (
    compile_full,
    compile_info,
    compile_punctured,
    decode_batch,
    decode_info_checked_batch,
    gate_table,
)
from rmmajority.families import (
    construct_full_cover,
    construct_naive,
    construct_rm1,
    construct_upper_a,
    construct_upper_b,
    family_to_text,
    search_family,
    validate,
)
from rmmajority.fixtures import info_set, load_json, load_witnesses, table2_text
from rmmajority.geometry import enumerate_flats, flat_count
from rmmajority.reports import table_1, table_3, table_4

TYPES = "1234567"
LONG = os.environ.get("RMMAJORITY_LONG") == "1"


def _mismatches(rep):
    return [f"{c.name}: {c.detail}" for c in rep.mismatches()]


# 1 ---------------------------------------------------------------------------

def test_c01_table1(verdict):
    start = time.time()
    rep = table_1()
    cells = sum(c.ok is not None for c in rep.checks)
    bad = _mismatches(rep)
    # values as listed in the criterion text, in table order
    listed_lower = {(1, 3): 4, (1, 4): 20, (1, 5): 69, (1, 6): 203, (1, 7): 532, (2, 4): 6, (2, 5): 28,
                    (2, 6): 129, (2, 7): 464, (3, 6): 33, (3, 7): 165}
    listed_upper = {(1, 3): 5, (2, 4): 8, (2, 5): 46, (2, 6): 209, (2, 7): 849, (3, 6): 48, (3, 7): 222}
    listed_upper.update({(1, m): ceil((m + 1) * (2**m - 5) / 2) for m in range(4, 8)})
    for rm, want in listed_lower.items():
        got = solve_ilp(CodeSpec(*rm)).objective
        if got != want:
            formula = (rm[1] + 1) * (2 ** rm[1] - rm[1] - 4) // 2
            bad.append(f"listed lower {rm}: computed {got}, listed {want}, formula {formula}")
    for rm, want in listed_upper.items():
        got = bound_closed_forms(CodeSpec(*rm)).best_upper
        if got != want:
            bad.append(f"listed upper {rm}: computed {got}, listed {want}")
    elapsed = time.time() - start
    ok = not bad and elapsed < 60
    verdict("criterion 1 (Table I)", ok, f"{cells} table cells; {elapsed:.1f}s; " + ("; ".join(bad) or "all match"))
    assert ok, bad


# 2 ---------------------------------------------------------------------------

def test_c02_table2(verdict):
    start = time.time()
    got = systematic_form(CodeSpec(2, 5), info_set(1)).to_array()
    want = np.array([[int(b) for b in row] for row in table2_text().split()], dtype=np.uint8)
    elapsed = time.time() - start
    same = got.shape == want.shape == (16, 32) and int((got == want).sum()) == 512
    ok = same and elapsed < 1
    verdict("criterion 2 (Table II)", ok, f"{int((got == want).sum())}/512 bits equal; {elapsed:.2f}s")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_c03_table3(verdict):
    rep = table_3()
    cells = sum(c.ok is not None for c in rep.checks)
    bad = _mismatches(rep)
    ok = cells == 56 and not bad
    verdict("criterion 3 (Table III)", ok, f"{cells} cells checked, {len(bad)} mismatches")
    assert ok, bad


# 4 ---------------------------------------------------------------------------

def test_c04_table4(verdict):
    rep = table_4()
    cells = sum(c.ok is not None for c in rep.checks)
    bad = _mismatches(rep)
    ok = cells == 49 and not bad
    verdict("criterion 4 (Table IV)", ok, f"{cells} cells checked, {len(bad)} mismatches")
    assert ok, bad


# 5 ---------------------------------------------------------------------------

def test_c05_rm25_is_30(verdict):
    spec = CodeSpec(2, 5)
    notes, bad = [], []
    sol = solve_ilp(spec)
    at28 = [s.descending() for s in enumerate_ilp(spec, 28)]
    if not (sol.objective == 28 and at28 == [(12, 16, 0, 0)]):
        bad.append(f"(i) optimum {sol.objective}, profiles at 28 {at28}")
    at29 = enumerate_ilp(spec, 29)
    eq29 = enumerate_ilp(spec, 29, equality=True)
    x4 = [s.x[3] for s in eq29]
    if not (len(at29) == 18 and len(eq29) == 12 and min(x4) == 9 and max(x4) == 15):
        bad.append(f"(ii) {len(at29)} profiles, {len(eq29)} with equality, x4 in [{min(x4)}, {max(x4)}]")
    reports = {t: exclude_28_report(info_set(t)) for t in TYPES}
    if not all(r.excluded for r in reports.values()):
        bad.append(f"(iii) not excluded: {[t for t, r in reports.items() if not r.excluded]}")
    notes.append("cliques " + ",".join(f"{t}:{r.cliques_checked}" for t, r in reports.items()))
    w30 = load_witnesses()["rm25-type1-30"]
    prof = validate(w30).descending()
    if not (len(w30) == 30 and prof == (9, 18, 3, 0)):
        bad.append(f"(iv) witness profile {prof}")
    budget = 1_000_000 if LONG else 20_000
    res = exclude_29(info_set(1), budget=budget)
    if res.verdict == FOUND:
        bad.append("(v) a 29-flat family was found")
    notes.append(f"(v) exclude_29 type 1: {res.verdict} after {res.nodes} nodes (budget {budget})")
    ok = not bad
    verdict("criterion 5 (RM(2,5) needs 30 flats)", ok, "; ".join(bad + notes))
    assert ok, bad


# 6 ---------------------------------------------------------------------------

def test_c06_rm24_is_7(verdict):
    spec = CodeSpec(2, 4)
    J = canonical_information_set(spec)
    six = search_admissible(spec, J, 6)
    w7 = load_witnesses()["rm24-7"]
    validate(w7)
    bad = []
    if six.verdict != EXCLUDED:
        detail = f"search at 6 for canonical J {list(J)}: {six.verdict} after {six.nodes} nodes"
        if six.family is not None:
            validate(six.family)
            detail += " (validated: " + " ".join(f.to_text(spec.ordering) for f in six.family.flats) + ")"
        bad.append(detail)
    if len(w7) != 7:
        bad.append(f"witness has {len(w7)} flats")
    ok = not bad
    verdict("criterion 6 (RM(2,4) needs 7 flats)", ok, "; ".join(bad) or f"6 excluded in {six.nodes} nodes; witness valid")
    assert ok, bad


# 7 ---------------------------------------------------------------------------

def test_c07_rm1_sizes(verdict):
    listed = [4, 20, 69, 203, 532, 1330]
    sizes = []
    for m in range(3, 9):
        fam = construct_rm1(m)
        validate(fam)
        sizes.append(len(fam))
    ok = sizes == listed
    verdict("criterion 7 (RM(1,m) constructions)", ok,
            f"all validate; sizes {sizes} for m=3..8, listed {listed}")
    assert ok


# 8 ---------------------------------------------------------------------------

def _patterns(n, t, positions):
    rows = [np.zeros(n, dtype=np.uint8)]
    for w in range(1, t + 1):
        for c in combinations(positions, w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(c)] = 1
            rows.append(e)
    return np.array(rows)


def _decoder_suite(fam, ncw, seed, punct_fam=None):
    """Full, info and punctured decoders on ``ncw`` random codewords x all patterns of weight <= t."""
    spec = fam.spec
    n = spec.n
    rng = np.random.default_rng(seed)
    S = systematic_form(spec, fam.J)
    G = S.to_array().astype(np.int64)
    punct_fam = punct_fam or fam
    full, info, punct = compile_full(spec), compile_info(spec, fam), compile_punctured(punct_fam)
    S_p = systematic_form(spec, punct_fam.J)
    G_p = S_p.to_array().astype(np.int64)
    zero = spec.ordering.position(0)
    E = _patterns(n, spec.t, range(n))
    E31 = _patterns(n, spec.t, [p for p in range(n) if p != zero])
    fails = {"full": 0, "info": 0, "consistent": 0, "punctured": 0}
    for _ in range(ncw):
        msg = rng.integers(0, 2, spec.k).astype(np.uint8)
        cw = ((msg.astype(np.int64) @ G) & 1).astype(np.uint8)
        Y = E ^ cw
        out, _ = decode_batch(Y, full)
        fails["full"] += int((out != cw).any(axis=1).sum())
        bits, ok = decode_info_checked_batch(Y, info, S)
        fails["info"] += int((bits != msg).any(axis=1).sum())
        fails["consistent"] += int((~ok).sum())
        cw_p = ((msg.astype(np.int64) @ G_p) & 1).astype(np.uint8)
        Y31 = np.delete(E31 ^ cw_p, zero, axis=1)
        bits, ok = decode_info_checked_batch(Y31, punct, S_p)
        fails["punctured"] += int((bits != msg).any(axis=1).sum()) + int((~ok).sum())
    return fails, len(E), len(E31)


def test_c08_decoders(verdict):
    start = time.time()
    w = load_witnesses()
    f25, n25, n25p = _decoder_suite(w["rm25-type1-30"], 100, 2024)
    # the 7-flat witness uses flats through the point 0, so the punctured
    # RM(2,4) run takes a family that avoids it
    s24 = CodeSpec(2, 4)
    clear = [f for f in enumerate_flats(4, 2) if 0 not in f]
    avoid = FamilySearch(s24, canonical_information_set(s24), 7, flats=clear).run(None).family
    f24, n24, n24p = _decoder_suite(w["rm24-7"], 100, 2025, punct_fam=avoid)
    total = sum(f25.values()) + sum(f24.values())
    ok = total == 0 and n25 == 5489 and n25p == 4992
    verdict("criterion 8 (decoders)", ok,
            f"RM(2,5) 100x{n25} (punctured 100x{n25p}) failures {f25}; RM(2,4) 100x{n24} failures {f24}; "
            f"{time.time() - start:.1f}s")
    assert ok


# 9 ---------------------------------------------------------------------------

def test_c09_table5(verdict):
    start = time.time()
    chen_listed = [16, 64, 24, 80, 288, 1088, 122, 352, 1216, 480, 1472, 4992]
    improved_listed = {(1, 3): 8, (1, 4): 25, (2, 4): 18, (2, 5): 46, (2, 6): 231, (2, 7): 878, (3, 6): 90,
                       (4, 9): 1214, (4, 10): 4340}
    unverified = {(3, 7), (3, 8), (4, 8)}
    rows = [(row["r"], row["m"]) for row in load_json("table5.json")["rows"]]
    got = gate_table(rows)
    bad = []
    for g, want in zip(got, chen_listed):
        if g.chen != want:
            bad.append(f"chen ({g.r},{g.m}): computed {g.chen}, listed {want}")
    for g in got:
        key = (g.r, g.m)
        if key in unverified:
            continue
        if g.improved != improved_listed[key]:
            bad.append(f"improved {key}: computed {g.improved}, listed {improved_listed[key]}")
    elapsed = time.time() - start
    ok = not bad and elapsed < 60 and set(rows) - set(improved_listed) == unverified
    verdict("criterion 9 (Table V)", ok,
            f"12 chen + 9 improved cells, rows {sorted(unverified)} unverified; " + ("; ".join(bad) or "all match"))
    assert ok, bad


# 10 --------------------------------------------------------------------------

def _dual_ok(sys):
    G = build_generator(sys.spec).rows
    order = sys.spec.ordering
    words = {c.word(order) for group in sys.checks for c in group}
    return all((w & g).bit_count() % 2 == 0 for w in words for g in G)


def test_c10_structural(verdict):
    bad = []
    systems = 0
    w = load_witnesses()
    for r, m in [(1, 3), (1, 4), (2, 4), (1, 5), (2, 5), (1, 6), (2, 6), (3, 6), (1, 7), (2, 7), (3, 7)]:
        spec = CodeSpec(r, m)
        J = canonical_information_set(spec)
        fams = [construct_full_cover(spec), construct_naive(spec, J), construct_upper_b(spec)]
        if m <= 6:
            fams.append(construct_upper_a(spec))
        if r == 1:
            fams.append(construct_rm1(m))
        fams += [f for f in w.values() if (f.spec.r, f.spec.m) == (r, m)]
        for fam in fams:
            try:
                validate(fam)
            except Exception as exc:  # noqa: BLE001 - report, do not hide
                bad.append(f"validate {spec} {fam.meta.get('construction')}: {exc}")
        sysl = [compile_full(spec)] + [compile_info(spec, f) for f in fams[1:]]
        if (r, m) == (2, 5):
            sysl.append(compile_punctured(w["rm25-type1-30"]))
        for s in sysl:
            systems += 1
            if not _dual_ok(s):
                bad.append(f"dual {spec} {s.scope}")
    for m in range(1, 7):
        for d in range(m + 1):
            if len(enumerate_flats(m, d)) != flat_count(m, d):
                bad.append(f"flat count m={m} d={d}")
    for t in TYPES:
        total = sum(intersection_profile(CodeSpec(2, 5), info_set(t)))
        if total != 1240:
            bad.append(f"sum n_i for type {t} is {total}")
    spec = CodeSpec(2, 5)
    a = search_family(spec, info_set(1), budget=60, seed=11)
    b = search_family(spec, info_set(1), budget=60, seed=11)
    if family_to_text(a) != family_to_text(b):
        bad.append("search_family differs under a fixed seed")
    s24 = CodeSpec(2, 4)
    x = search_admissible(s24, canonical_information_set(s24), 7)
    y = search_admissible(s24, canonical_information_set(s24), 7)
    if x.family.flats != y.family.flats or x.nodes != y.nodes:
        bad.append("exhaustive search differs between runs")
    ok = not bad
    verdict("criterion 10 (structural invariants)", ok, f"{systems} check systems; " + ("; ".join(bad) or "all hold"))
    assert ok, bad


if __name__ == "__main__":  # pragma: no cover
    import sys

    lines = []

    def record(name, ok, detail=""):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        print(lines[-1], flush=True)

    status = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn(record)
            except AssertionError:
                status = 1
    sys.exit(status)
