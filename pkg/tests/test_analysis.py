import random

import pytest

from rmmajority import gf2
from rmmajority.analysis import (
    AnalysisError,
    CliqueGraph,
    affine_independent_count,
    affine_invariance_check,
    apply_affine,
    clique_census,
    clique_counts,
    distinct_orbits,
    inner_flats,
    intersection_profile,
    invariants,
    iter_cliques,
    maximum_cliques,
)
from rmmajority.code import CodeSpec
from rmmajority.fixtures import info_set, info_set_types, load_json
from rmmajority.geometry import enumerate_flats

TYPES = "1234567"


def random_affine(rnd, m=5):
    while True:
        images = [rnd.randrange(1, 1 << m) for _ in range(m)]
        if gf2.rank(images) == m:
            return images, rnd.randrange(1 << m)


@pytest.mark.parametrize("t", TYPES)
def test_table3_row(t):
    want = load_json("table3.json")["rows"][t][1:]
    assert list(invariants(info_set(t)).row()) == want


@pytest.mark.parametrize("t", TYPES)
def test_intersection_profile_sums_to_all_two_flats(t):
    n = intersection_profile(CodeSpec(2, 5), info_set(t))
    assert sum(n) == 1240
    assert n[0] == n[4] and n[1] == n[3]


def test_type7_alternative_has_same_invariants():
    assert invariants(info_set("7p")) == invariants(info_set(7))


def test_representatives_lie_in_distinct_orbits():
    reps = [info_set(t) for t in TYPES]
    assert distinct_orbits(reps)
    assert not distinct_orbits(reps + [info_set("7p")])
    assert not distinct_orbits([tuple(range(15)) + (15, 15)])


@pytest.mark.parametrize("t", TYPES)
def test_invariants_are_affine_invariant(t):
    rnd = random.Random(int(t))
    J = info_set(t)
    base = invariants(J)
    spec = CodeSpec(2, 5)
    for _ in range(20):
        images, shift = random_affine(rnd)
        assert invariants(apply_affine(spec, J, images, shift)) == base


def test_translation_and_explicit_map():
    e1 = [1, 2, 4, 8, 16]
    assert affine_invariance_check(info_set(5), e1, shift=1)
    images, shift = random_affine(random.Random(0))
    assert affine_invariance_check(info_set(1), images, shift)
    with pytest.raises(AnalysisError):
        apply_affine(CodeSpec(2, 5), info_set(1), [1, 2, 4, 8, 8], 0)


def test_affine_independence():
    assert affine_independent_count([0, 1, 2, 4, 8, 16], 6) == 1
    assert affine_independent_count([0, 1, 2, 3, 8, 16], 6) == 0
    assert affine_independent_count(list(range(6)), 6) == 0


@pytest.mark.parametrize("t", TYPES)
def test_table4_fast_sizes(t):
    fix = load_json("table4.json")
    want = dict(zip(fix["sizes"], fix["rows"][t]))
    got = clique_census(info_set(t), min_size=12)
    for s in range(12, 16):
        assert got.get(s, 0) == want[s]


@pytest.mark.parametrize("t", TYPES)
def test_maximum_clique_matches_census(t):
    inv = invariants(info_set(t))
    census = clique_census(info_set(t), min_size=inv.c)
    assert max(census) == inv.c and census[inv.c] == inv.n_max


def _brute_cliques(adj, n):
    counts = {}
    for mask in range(1, 1 << n):
        verts = [v for v in range(n) if mask >> v & 1]
        if all(adj[a] >> b & 1 for i, a in enumerate(verts) for b in verts[i + 1:]):
            counts[len(verts)] = counts.get(len(verts), 0) + 1
    return counts


def test_clique_routines_on_random_graphs():
    rnd = random.Random(2)
    for _ in range(40):
        n = rnd.randrange(1, 13)
        adj = [0] * n
        for a in range(n):
            for b in range(a + 1, n):
                if rnd.random() < 0.55:
                    adj[a] |= 1 << b
                    adj[b] |= 1 << a
        g = CliqueGraph([None] * n, adj)
        brute = _brute_cliques(adj, n)
        assert clique_counts(g, 1) == brute
        top = max(brute)
        assert maximum_cliques(g) == (top, brute[top])
        listed = list(iter_cliques(g, 2))
        assert len(listed) == sum(v for s, v in brute.items() if s >= 2)
        assert len(set(map(frozenset, listed))) == len(listed)


def test_inner_flats_are_inside_points():
    spec = CodeSpec(2, 5)
    J = info_set(1)
    pts = {spec.ordering.points[j] for j in J}
    flats = enumerate_flats(5, 2)
    inner = inner_flats(spec, J, flats)
    assert len(inner) == 60
    assert all(set(f.points) <= pts for f in inner)


def test_analysis_is_rm25_only():
    with pytest.raises(AnalysisError):
        invariants(info_set(1), CodeSpec(2, 6))
    with pytest.raises(AnalysisError):
        invariants((0,) * 16)


def test_type_keys():
    assert sorted(info_set_types()) == ["1", "2", "3", "4", "5", "6", "7", "7p"]
