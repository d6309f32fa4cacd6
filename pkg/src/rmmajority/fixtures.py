"""Shipped reference data: published tables, information-set representatives, witnesses.

Every file under ``fixtures/`` is listed in ``fixtures/SHA256SUMS``; loading
a file whose digest does not match raises :class:`FixtureError`.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .code import CodeSpec
from .families import AdmissibleFamily, family_from_text, family_from_vectors, parse_vector

FIXTURE_DIR = Path(str(resources.files("rmmajority") / "fixtures"))


class FixtureError(RuntimeError):
    pass


def _sums(directory: Path) -> dict[str, str]:
    out = {}
    for line in (directory / "SHA256SUMS").read_text().splitlines():
        if line.strip():
            digest, name = line.split()
            out[name] = digest
    return out


def read_fixture(name: str, directory: Path | None = None) -> str:
    directory = directory or FIXTURE_DIR
    data = (directory / name).read_bytes()
    expected = _sums(directory).get(name)
    if expected is None:
        raise FixtureError(f"{name} has no recorded checksum")
    actual = hashlib.sha256(data).hexdigest()
    if actual != expected:
        raise FixtureError(f"checksum mismatch for {name}: expected {expected[:12]}..., got {actual[:12]}...")
    return data.decode()


def write_checksums(directory: Path | None = None) -> None:
    """Regenerate SHA256SUMS for every fixture file (maintenance helper)."""
    directory = directory or FIXTURE_DIR
    lines = []
    for path in sorted(directory.iterdir()):
        if path.name == "SHA256SUMS" or path.is_dir():
            continue
        lines.append(f"{hashlib.sha256(path.read_bytes()).hexdigest()}  {path.name}")
    (directory / "SHA256SUMS").write_text("\n".join(lines) + "\n")


def load_json(name: str, directory: Path | None = None) -> dict:
    return json.loads(read_fixture(name, directory))


@lru_cache(maxsize=None)
def info_set_types() -> dict[str, tuple[int, ...]]:
    """Orbit representatives for RM(2,5) under the power ordering; key '7p' avoids position 31."""
    out = {}
    for line in read_fixture("info_sets_rm25.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, body = line.partition(":")
        out[key.strip()] = tuple(int(t) for t in body.split(","))
    return out


def info_set(type_: int | str) -> tuple[int, ...]:
    return info_set_types()[str(type_)]


def table2_text() -> str:
    return read_fixture("table2_rm25_type1.txt")


def _rm24_witness(text: str) -> AdmissibleFamily:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    spec = CodeSpec(int(head[1]), int(head[2]))
    excluded = {parse_vector(tok) for tok in lines[1].split(":", 1)[1].split(",")}
    J = [j for j in range(spec.n) if spec.ordering.points[j] not in excluded]
    return family_from_vectors(spec, J, lines[2:])


def load_witnesses(directory: Path | None = None) -> dict[str, AdmissibleFamily]:
    fams = {
        "rm25-type1-30": family_from_text(read_fixture("witness_rm25_type1_30.txt", directory)),
        "rm24-7": _rm24_witness(read_fixture("witness_rm24_7.txt", directory)),
    }
    for name, fam in fams.items():
        fam.meta["witness"] = name
    return fams


def load_rm24_six(directory: Path | None = None) -> AdmissibleFamily:
    """A 6-flat admissible family for RM(2,4) at the canonical information set."""
    return family_from_text(read_fixture("family_rm24_canonical_6.txt", directory))
