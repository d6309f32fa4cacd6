import dataclasses

import pytest

from rmmajority.bounds import bound_closed_forms, rm1_exact
from rmmajority.code import CodeSpec, canonical_information_set
from rmmajority.families import (
    AdmissibilityError,
    FamilyFormatError,
    construct_full_cover,
    construct_naive,
    construct_rm1,
    construct_upper_a,
    construct_upper_b,
    derive_usage,
    family_from_text,
    family_to_text,
    is_valid,
    restrict_to,
    search_family,
    validate,
)
from rmmajority.fixtures import info_set, load_rm24_six, load_witnesses

SPECS = [(1, 3), (1, 4), (2, 4), (1, 5), (2, 5), (2, 6), (3, 6)]


@pytest.fixture(scope="module")
def witnesses():
    return load_witnesses()


@pytest.mark.parametrize("r,m", SPECS)
def test_full_cover_covers_every_position(r, m):
    spec = CodeSpec(r, m)
    fam = construct_full_cover(spec)
    validate(fam)
    assert len(fam) == bound_closed_forms(spec).upper_III1
    assert fam.J == tuple(range(spec.n))


@pytest.mark.parametrize("r,m", SPECS)
def test_naive_size(r, m):
    spec = CodeSpec(r, m)
    fam = construct_naive(spec, canonical_information_set(spec))
    validate(fam)
    assert len(fam) == bound_closed_forms(spec).upper_III2


@pytest.mark.parametrize("r,m", SPECS + [(2, 7)])
def test_upper_a_within_formula(r, m):
    spec = CodeSpec(r, m)
    fam = construct_upper_a(spec)
    validate(fam)
    assert len(fam) <= bound_closed_forms(spec).upper_33a


@pytest.mark.parametrize("r,m", [(1, 4), (2, 4), (1, 5), (2, 5), (2, 6), (3, 6), (3, 7)])
def test_upper_b_within_formula(r, m):
    spec = CodeSpec(r, m)
    fam = construct_upper_b(spec)
    validate(fam)
    assert len(fam) <= bound_closed_forms(spec).upper_33b


def test_upper_b_rm13_is_one_above_formula():
    # the formula claims 5 for RM(1,3); the construction needs 6
    fam = construct_upper_b(CodeSpec(1, 3))
    validate(fam)
    assert len(fam) == 6 == bound_closed_forms(CodeSpec(1, 3)).upper_33b + 1


@pytest.mark.parametrize("m", range(3, 9))
def test_rm1_construction(m):
    fam = construct_rm1(m)
    validate(fam)
    assert len(fam) == rm1_exact(m)


def test_witnesses_validate(witnesses):
    assert validate(witnesses["rm25-type1-30"]).descending() == (9, 18, 3, 0)
    assert witnesses["rm25-type1-30"].J == info_set(1)
    assert len(witnesses["rm24-7"]) == 7
    validate(witnesses["rm24-7"])


def test_rm24_six_family():
    fam = load_rm24_six()
    prof = validate(fam)
    assert len(fam) == 6 and prof.descending() == (4, 2, 0, 0)
    assert fam.J == canonical_information_set(CodeSpec(2, 4))


def test_restrict_full_cover_to_info_set():
    spec = CodeSpec(2, 5)
    fam = restrict_to(construct_full_cover(spec), info_set(1))
    validate(fam)
    assert len(fam) <= 48


def test_text_round_trip(witnesses):
    for fam in list(witnesses.values()) + [construct_upper_b(CodeSpec(2, 6))]:
        text = family_to_text(fam)
        back = family_from_text(text)
        assert back.J == fam.J and back.flats == fam.flats and back.usage == fam.usage
        assert family_to_text(back) == text


def test_text_without_usage_derives_it(witnesses):
    fam = witnesses["rm25-type1-30"]
    text = family_to_text(fam).split("usage:")[0]
    back = family_from_text(text)
    validate(back)
    assert back.usage == derive_usage(fam.spec, fam.J, fam.flats)


@pytest.mark.parametrize("text", ["", "rm 2 5\nJ: {}", "rx 2 5 power\nJ: {0}", "rm 2 5 power\nK: {0}",
                                  "rm 2 5 power\nJ: {0}\n{0,1,8,12}\nbogus"])
def test_bad_text(text):
    with pytest.raises((FamilyFormatError, ValueError)):
        family_from_text(text)


def _copy(fam, **kw):
    return dataclasses.replace(fam, **kw)


def test_validate_rejects_broken_families(witnesses):
    fam = witnesses["rm25-type1-30"]
    j = fam.J[0]
    usage = dict(fam.usage)
    usage[j] = usage[j][:-1]
    with pytest.raises(AdmissibilityError) as err:
        validate(_copy(fam, usage=usage))
    assert err.value.position == j

    usage = dict(fam.usage)
    a = usage[j][0]
    usage[j] = (a,) * len(usage[j])
    with pytest.raises(AdmissibilityError) as err:
        validate(_copy(fam, usage=usage))
    assert err.value.pair == (a, a)

    usage = dict(fam.usage)
    other = next(i for i, f in enumerate(fam.flats) if fam.spec.ordering.points[j] not in f)
    usage[j] = (other,) + usage[j][1:]
    assert not is_valid(_copy(fam, usage=usage))

    assert not is_valid(_copy(fam, flats=fam.flats + [fam.flats[0].translate(1)]))
    assert not is_valid(_copy(fam, usage={**fam.usage, 31: fam.usage[j]}))


def test_search_family_is_deterministic():
    spec = CodeSpec(2, 4)
    J = canonical_information_set(spec)
    a = search_family(spec, J, budget=120, seed=7)
    b = search_family(spec, J, budget=120, seed=7)
    validate(a)
    assert family_to_text(a) == family_to_text(b)
    assert len(a) <= 8


def test_search_family_rm25():
    spec = CodeSpec(2, 5)
    fam = search_family(spec, info_set(1), budget=100, seed=1)
    validate(fam)
    assert 28 <= len(fam) <= 48
    assert search_family(spec, info_set(1), budget=100, seed=1).flats == fam.flats
