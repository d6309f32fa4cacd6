import io
import json
import shutil

import pytest

from rmmajority import fixtures
from rmmajority.cli import main
from rmmajority.fixtures import table2_text

ROW1 = table2_text().split()[0]


def run(capsys, monkeypatch, argv, stdin=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_encode_table2_row1(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["encode", "--info-set", "type1"], "1" + "0" * 15 + "\n")
    assert code == 0 and out.strip() == ROW1


def test_encode_literal_and_file(capsys, monkeypatch, tmp_path):
    path = tmp_path / "msgs.txt"
    path.write_text("1" + "0" * 15 + "\n" + "0" * 16 + "\n")
    code, out, _ = run(capsys, monkeypatch, ["encode", "--info-set", "type1", f"@{path}"])
    assert code == 0 and out.split() == [ROW1, "0" * 32]


def test_decode_full_corrects(capsys, monkeypatch):
    bad = list(ROW1)
    for p in (2, 9, 30):
        bad[p] = "1" if bad[p] == "0" else "0"
    code, out, _ = run(capsys, monkeypatch, ["decode", "".join(bad)])
    assert code == 0 and out.split()[0] == ROW1


def test_decode_info_with_witness(capsys, monkeypatch):
    bad = "0" + ROW1[1:]
    code, out, _ = run(capsys, monkeypatch, ["decode", "--family", "witness:rm25-type1-30", bad])
    assert code == 0
    assert out.split()[0] == "1" + "0" * 15 and "consistent=true" in out


def test_decode_punctured(capsys, monkeypatch):
    short = list(ROW1[:31])
    for p in (0, 14, 29):
        short[p] = "1" if short[p] == "0" else "0"
    code, out, _ = run(capsys, monkeypatch,
                       ["decode", "--punctured", "--family", "witness:rm25-type1-30", "".join(short)])
    assert code == 0 and out.split()[0] == "1" + "0" * 15


@pytest.mark.parametrize("argv", [
    ["decode", "0101"],
    ["encode", "--info-set", "type9", "0" * 16],
    ["encode", "--r", "3", "--m", "5", "0"],
    ["decode", "--family", "witness:nope", "0" * 32],
    ["decode", "--family", "construct:zz", "0" * 32],
    ["tables", "VI"],
    ["simulate", "--weights", "3..1"],
    ["encode", "--modulus", "zz", "0"],
    ["decode", "--punctured", "0" * 31],
    ["nonsense"],
])
def test_usage_errors_exit_2(capsys, monkeypatch, argv):
    code, _, _ = run(capsys, monkeypatch, argv)
    assert code == 2


def test_tables_records(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["tables", "II", "--format", "records"])
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert recs[0]["rows"][0] == ROW1
    assert all(r["status"] == "PASS" for r in recs[1:])


def test_tables_text_reports_cells(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["tables", "I"])
    assert code == 0 and "mismatches: 0" in out


def test_bounds_records(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["bounds", "--r", "2", "--m", "5", "--format", "records"])
    assert code == 0
    rec = json.loads(out)
    assert rec == {"r": 2, "m": 5, "lower_trivial": 24, "ilp": 28, "upper_33a": 84, "upper_33b": 46,
                   "upper_III1": 48}


def test_gates(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["gates", "--format", "records"])
    assert code == 0 and json.loads(out)["total"] == 80


def test_family_validate_and_show(capsys, monkeypatch, tmp_path):
    code, out, _ = run(capsys, monkeypatch, ["family", "show", "--family", "witness:rm25-type1-30"])
    assert code == 0
    path = tmp_path / "fam.txt"
    path.write_text(out)
    code, out, _ = run(capsys, monkeypatch, ["family", "validate", "--family", f"@{path}"])
    assert code == 0 and "valid: 30 flats" in out
    broken = path.read_text().replace("usage:\n0: ", "usage:\n0: 0 ")
    path.write_text(broken)
    code, out, _ = run(capsys, monkeypatch, ["family", "validate", "--family", f"@{path}"])
    assert code == 1 and "invalid" in out


def test_family_search_is_deterministic(capsys, monkeypatch):
    argv = ["family", "search", "--r", "2", "--m", "4", "--seed", "3", "--budget", "60"]
    first = run(capsys, monkeypatch, argv)
    second = run(capsys, monkeypatch, argv)
    assert first[0] == 0 and first == second


def test_simulate_records(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["simulate", "--trials", "50", "--weights", "0..3", "--seed", "5",
                                             "--format", "records"])
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    rates = [r for r in recs if "weight" in r]
    assert [r["weight"] for r in rates] == [0, 1, 2, 3]
    assert all(r["full_rate"] == 1.0 and r["info_rate"] == 1.0 for r in rates)


def test_corrupted_fixture_exits_nonzero(capsys, monkeypatch, tmp_path):
    dst = tmp_path / "fixtures"
    shutil.copytree(fixtures.FIXTURE_DIR, dst)
    path = dst / "table2_rm25_type1.txt"
    path.write_text(path.read_text().replace("1", "0", 1))
    monkeypatch.setattr(fixtures, "FIXTURE_DIR", dst)
    code, _, err = run(capsys, monkeypatch, ["tables", "II"])
    assert code == 1 and "checksum mismatch" in err
