"""Table reproduction, verification runs and bounds reports.

Every report carries the rendered rows, a list of cell checks against the
shipped fixtures, and machine-readable records. Cells the package does not
recompute are marked ``unverified`` and never counted as passing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .analysis import clique_census, invariants
from .bounds import bound_closed_forms, enumerate_ilp, rm1_exact, rm1_upper, solve_ilp
from .bounds.exclusion import (
    EXCLUDED, FOUND, exclude_28_report, exclude_29, refined_feasible, refined_profiles, search_admissible,
)
from .code import CodeSpec, canonical_information_set, systematic_form
from .decoder import gate_table
from .families import construct_rm1, validate
from .fixtures import FixtureError, info_set, info_set_types, load_json, load_witnesses, table2_text

UNVERIFIED = "unverified"
TYPES = tuple("1234567")


@dataclass
class Check:
    name: str
    ok: bool | None  # None: not checked (unverified or inconclusive)
    detail: str = ""

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.ok]


@dataclass
class Report:
    title: str
    header: list[str]
    rows: list[list[str]] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok is not False for c in self.checks)

    def mismatches(self) -> list[Check]:
        return [c for c in self.checks if c.ok is False]

    def cell(self, name: str, got, want) -> str:
        ok = got == want
        self.checks.append(Check(name, ok, "" if ok else f"computed {got}, reference {want}"))
        return str(got) if ok else f"{got}!={want}"

    def render_text(self) -> str:
        table = [self.header] + self.rows
        widths = [max(len(str(row[i])) for row in table if i < len(row)) for i in range(len(self.header))]
        lines = [self.title]
        for row in table:
            lines.append("  ".join(str(c).rjust(w) for c, w in zip(row, widths)).rstrip())
        bad = self.mismatches()
        lines.append(f"cells checked: {sum(c.ok is not None for c in self.checks)}, mismatches: {len(bad)}")
        for c in bad:
            lines.append(f"  mismatch {c.name}: {c.detail}")
        return "\n".join(lines) + "\n"

    def render_records(self) -> str:
        out = [json.dumps(rec, sort_keys=True) for rec in self.records]
        out += [json.dumps({"check": c.name, "status": c.status, "detail": c.detail}, sort_keys=True)
                for c in self.checks]
        return "\n".join(out) + "\n"


# -- Table I ------------------------------------------------------------------

TABLE1_ROWS = ((1, 3), (2, 4), (2, 5), (2, 6), (2, 7), (3, 6), (3, 7))
RM1_RANGE = range(4, 8)


def bounds_record(spec: CodeSpec) -> dict:
    b = bound_closed_forms(spec)
    return {
        "r": spec.r, "m": spec.m, "lower_trivial": b.lower_trivial, "ilp": solve_ilp(spec).objective,
        "upper_33a": b.upper_33a, "upper_33b": b.upper_33b, "upper_III1": b.upper_III1,
        "upper_III2": b.upper_III2, "best_upper": b.best_upper,
    }


def table_1() -> Report:
    fix = {(row["r"], str(row["m"])): row for row in load_json("table1.json")["rows"]}
    rep = Report("Table I: lower (ILP) and upper bounds on the minimal family size",
                 ["r", "m", "lower", "upper"])
    for r, m in TABLE1_ROWS[:1]:
        _table1_row(rep, r, m, fix[(r, str(m))])
    row = fix[(1, ">=4")]
    rep.rows.append(["1", ">=4", row["lower"], row["upper"]])
    for m in RM1_RANGE:
        rec = bounds_record(CodeSpec(1, m))
        rep.records.append(rec)
        lo = rep.cell(f"I(1,{m}).lower", rec["ilp"], (m + 1) * ((1 << m) - m - 4) // 2)
        hi = rep.cell(f"I(1,{m}).upper", rec["best_upper"], rm1_upper(m))
        rep.rows.append(["", str(m), lo, hi])
    for r, m in TABLE1_ROWS[1:]:
        _table1_row(rep, r, m, fix[(r, str(m))])
    return rep


def _table1_row(rep: Report, r: int, m: int, row: dict) -> None:
    rec = bounds_record(CodeSpec(r, m))
    rep.records.append(rec)
    lo = rep.cell(f"I({r},{m}).lower", rec["ilp"], row["lower"])
    hi = rep.cell(f"I({r},{m}).upper", rec["best_upper"], row["upper"])
    rep.rows.append([str(r), str(m), lo, hi])


# -- Table II -----------------------------------------------------------------

def table_2() -> Report:
    spec = CodeSpec(2, 5)
    got = systematic_form(spec, info_set(1)).to_text()
    want = table2_text()
    rep = Report("Table II: systematic generator of RM(2,5), information positions of type (1)", ["row", "bits"])
    got_rows, want_rows = got.split(), want.split()
    for i, (g, w) in enumerate(zip(got_rows, want_rows)):
        rep.rows.append([str(i + 1), rep.cell(f"II.row{i + 1}", g, w)])
    if len(got_rows) != len(want_rows):
        rep.checks.append(Check("II.shape", False, f"{len(got_rows)} rows vs {len(want_rows)}"))
    rep.records.append({"table": "II", "rows": got_rows})
    return rep


# -- Table III ----------------------------------------------------------------

def table_3() -> Report:
    fix = load_json("table3.json")
    cols = fix["columns"]
    rep = Report("Table III: invariants of the seven information-set types", ["type"] + cols)
    for t in TYPES:
        want = dict(zip(cols, fix["rows"][t]))
        inv = invariants(info_set(t))
        got = dict(zip(cols[1:], inv.row()))
        row = [f"({t})", f"{want['l']} {UNVERIFIED}"]
        rep.checks.append(Check(f"III({t}).l", None, UNVERIFIED))
        for c in cols[1:]:
            row.append(rep.cell(f"III({t}).{c}", got[c], want[c]))
        rep.rows.append(row)
        rep.records.append({"type": t, **got, "l": want["l"], "l_status": UNVERIFIED})
    return rep


# -- Table IV -----------------------------------------------------------------

def table_4(min_size: int = 9) -> Report:
    fix = load_json("table4.json")
    sizes = fix["sizes"]
    rep = Report("Table IV: numbers of cliques of inner 2-flats by size",
                 ["type"] + [str(s) for s in sizes])
    for t in TYPES:
        census = clique_census(info_set(t), min_size=min_size)
        row = [f"({t})"]
        for s, want in zip(sizes, fix["rows"][t]):
            if s < min_size:
                row.append("-")
                continue
            got = census.get(s, 0)
            row.append(rep.cell(f"IV({t}).{s}", got, want))
        rep.rows.append(row)
        rep.records.append({"type": t, **{str(s): census.get(s, 0) for s in sizes if s >= min_size}})
    return rep


# -- Table V ------------------------------------------------------------------

# improved entries listed without a construction
TABLE5_UNVERIFIED = {(3, 7), (3, 8), (4, 8)}


def table_5() -> Report:
    fix = load_json("table5.json")["rows"]
    rep = Report("Table V: majority gates, Chen versus information positions only",
                 ["r", "m", "chen", "improved"])
    computed = gate_table([(row["r"], row["m"]) for row in fix])
    for row, g in zip(fix, computed):
        key = (row["r"], row["m"])
        chen = rep.cell(f"V{key}.chen", g.chen, row["chen"])
        prefix = "" if g.exact else "<="
        if key in TABLE5_UNVERIFIED:
            improved = f"<={row['improved']} {UNVERIFIED} (construction gives <={g.improved})"
            rep.checks.append(Check(f"V{key}.improved", None, UNVERIFIED))
        else:
            improved = prefix + rep.cell(f"V{key}.improved", g.improved, row["improved"])
        rep.rows.append([str(row["r"]), str(row["m"]), chen, improved])
        rep.records.append({"r": g.r, "m": g.m, "chen": g.chen, "improved": g.improved, "exact": g.exact,
                            "status": UNVERIFIED if key in TABLE5_UNVERIFIED else "checked"})
    return rep


TABLES = {"I": table_1, "II": table_2, "III": table_3, "IV": table_4, "V": table_5}


# -- verify -------------------------------------------------------------------

def verify(long: bool = False, budget: int | None = 1_000_000, types: Sequence[str] = ("1",)) -> list[Check]:
    checks: list[Check] = []

    def add(name, ok, detail=""):
        checks.append(Check(name, ok, detail))

    try:
        wit = load_witnesses()
    except FixtureError as exc:
        add("witness fixtures", False, str(exc))
        return checks
    w30, w7 = wit["rm25-type1-30"], wit["rm24-7"]
    prof = validate(w30)
    add("RM(2,5) 30-flat witness validates with (x4,x3,x2,x1)=(9,18,3,0)", prof.descending() == (9, 18, 3, 0),
        f"profile {prof.descending()}")
    add("RM(2,4) 7-flat witness validates", len(w7.flats) == 7 and validate(w7) is not None)

    for r, m in TABLE1_ROWS + tuple((1, m) for m in RM1_RANGE):
        spec = CodeSpec(r, m)
        want = rm1_exact(m) if r == 1 and m >= 4 else {(1, 3): 4}.get((r, m))
        if want is None:
            want = next(row["lower"] for row in load_json("table1.json")["rows"] if (row["r"], row["m"]) == (r, m))
        got = solve_ilp(spec).objective
        add(f"ILP optimum RM({r},{m}) = {want}", got == want, f"computed {got}")
    s25 = CodeSpec(2, 5)
    opt = [x.descending() for x in enumerate_ilp(s25, 28)]
    add("RM(2,5) ILP optimum 28 is unique at (12,16,0,0)", opt == [(12, 16, 0, 0)], f"optima {opt}")
    e29 = enumerate_ilp(s25, 29)
    e29eq = enumerate_ilp(s25, 29, equality=True)
    x4 = sorted(x.descending()[0] for x in e29eq)
    add("RM(2,5) 18 profiles at 29, 12 with equality, 9 <= x4 <= 15",
        len(e29) == 18 and len(e29eq) == 12 and x4[0] >= 9 and x4[-1] <= 15,
        f"{len(e29)} / {len(e29eq)}, x4 in [{x4[0]}, {x4[-1]}]")
    add("RM(2,5) no profile at 27", not enumerate_ilp(s25, 27))
    survivors = refined_feasible(refined_profiles(29))
    add("refined profiles at 29 satisfy x34 <= 2 and 8 <= x33 <= 20", bool(survivors),
        f"{len(survivors)} survivors")

    for t in TYPES:
        res = exclude_28_report(info_set(t))
        add(f"exclude_28 type ({t})", res.excluded,
            f"{res.cliques_checked} cliques checked {dict(sorted(res.by_size.items()))}")

    sanity = search_admissible(s25, w30.J, 30, budget=budget, preferred=w30.flats)
    add("search at target 30 finds a family (sanity)", sanity.verdict == FOUND, f"{sanity.nodes} nodes")

    s24 = CodeSpec(2, 4)
    J24 = canonical_information_set(s24)
    six = search_admissible(s24, J24, 6)
    detail = f"{six.verdict} after {six.nodes} nodes"
    if six.family is not None:
        detail += "; family " + " ".join(f.to_text(s24.ordering) for f in six.family.flats)
    add("RM(2,4) no admissible 6-family at the canonical J", six.verdict == EXCLUDED, detail)
    seven = search_admissible(w7.spec, w7.J, 7)
    add("RM(2,4) 7-family exists", seven.verdict == FOUND, f"{seven.nodes} nodes")

    for m in range(3, 9):
        fam = construct_rm1(m)
        validate(fam)
        add(f"RM(1,{m}) construction has {rm1_exact(m)} flats", len(fam.flats) == rm1_exact(m),
            f"{len(fam.flats)} flats")

    if long:
        for t in types:
            res = exclude_29(info_set(t), budget=budget)
            ok = {EXCLUDED: True, FOUND: False}.get(res.verdict)
            add(f"exclude_29 type ({t})", ok, f"{res.verdict} after {res.nodes} nodes")
    return checks


def render_checks(checks: Sequence[Check], fmt: str = "text") -> str:
    if fmt == "records":
        return "".join(json.dumps(asdict(c) | {"status": c.status}, sort_keys=True) + "\n" for c in checks)
    lines = [f"{c.status}  {c.name}" + (f"  [{c.detail}]" if c.detail else "") for c in checks]
    failed = sum(c.ok is False for c in checks)
    lines.append(f"{len(checks)} checks, {failed} failed")
    return "\n".join(lines) + "\n"


__all__ = [
    "Check",
    "Report",
    "TABLES",
    "UNVERIFIED",
    "bounds_record",
    "info_set_types",
    "render_checks",
    "table_1",
    "table_2",
    "table_3",
    "table_4",
    "table_5",
    "verify",
]
