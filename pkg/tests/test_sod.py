import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from towers.complexes import (
    HomSpace,
    chain_map_basis,
    cone,
    direct_sum_complex,
    find_equivalence,
    shift,
    zero_complex,
)
from towers.sampling import a2, random_complex
from towers.sod import (
    MARGIN,
    CertificateFailure,
    block_components,
    check_exceptional_collection,
    fixed_point_checks,
    hom_shift_range,
    in_thick,
    reflection_preserves_cofiber,
    sod_to_tfamily,
    weaved_tower,
    weaved_tower_dual,
)
from towers.suites import a2_fixture_maps, a2_fixture_objects, describe
from towers.tstruct import StandardAisle, TrivialAisle, stagewise_equivalent

a2_objects = st.builds(lambda s: random_complex(np.random.default_rng(s), a2()), st.integers(0, 2**32 - 1))


def equiv(X, Y):
    return find_equivalence(X, Y) is not None


@pytest.fixture(scope="module")
def coll(A2):
    return check_exceptional_collection([A2["P2"], A2["P1"]], ["P2", "P1"])


@pytest.fixture(scope="module")
def aisle(coll):
    return sod_to_tfamily(coll).aisle(1)


def test_collection_examples(A2, coll):
    assert coll.verified
    assert all(d == 0 for d in coll.orth_dims[(1, 0)].values())
    bad = check_exceptional_collection([A2["P1"], A2["P2"]], ["P1", "P2"])
    assert not bad.verified and bad.orth_dims[(1, 0)][0] == 1
    assert check_exceptional_collection([A2["P1"]]).verified
    assert not check_exceptional_collection([zero_complex(a2())]).verified


def test_non_exceptional_block_rejected(A2):
    X = direct_sum_complex([A2["P1"], A2["P1"]])
    c = check_exceptional_collection([X], ["P1+P1"])
    assert not c.verified and "expected 1" in c.failures[0]
    with pytest.raises(CertificateFailure):
        weaved_tower(A2["S1"], c)


def test_shift_range_margin(A2):
    r = hom_shift_range(A2["S1"], shift(A2["P2"], 2))
    assert r.start == 0 - 2 - MARGIN and r.stop == 0 - 2 + 1 + MARGIN + 1


def test_weaved_tower_of_s1(A2, coll):
    t = weaved_tower(A2["S1"], coll)
    assert equiv(t.stages[0], A2["P1"])
    assert equiv(t.cofibers[-1], shift(A2["P2"], 1))
    assert t.certified


def test_weaved_tower_of_generator_and_zero(A2, coll):
    t = weaved_tower(A2["P2"], coll)
    assert len(t.nontrivial()) == 1
    z = weaved_tower(zero_complex(a2()), coll)
    assert all(S.is_acyclic() for S in z.stages)


def test_aisle_examples(A2, aisle):
    assert aisle.contains(A2["P1"]) and not aisle.contains(A2["P2"])
    assert aisle.contains_coaisle(A2["P2"])
    assert aisle.name == "thick(P1)"


@given(Y=a2_objects)
def test_towers_unique_and_semiorthogonal(Y, coll):
    a, b = weaved_tower(Y, coll), weaved_tower_dual(Y, coll)
    assert stagewise_equivalent(a, b)
    c1, c2 = block_components(a)
    assert in_thick(c1, coll.blocks[0]) and in_thick(c2, coll.blocks[1])
    for n in hom_shift_range(c2, c1):
        assert HomSpace(c2, c1, n).dim == 0


@given(Y=a2_objects)
def test_aisle_shift_invariant_and_triangle(Y, aisle):
    assert aisle.contains(Y) == aisle.contains(shift(Y, 1)) == aisle.contains(shift(Y, -1))
    part, r = aisle.reflection(Y)
    assert aisle.contains_coaisle(part)


@given(Y=a2_objects)
def test_family_reproduces_blocks(Y, coll):
    comps = block_components(weaved_tower(Y, coll))
    for j, c in enumerate(comps):
        again = block_components(weaved_tower(c, coll))
        assert all(x.is_acyclic() for i, x in enumerate(again) if i != j)
        assert equiv(again[j], c)


def test_fixed_point_checks(A2, aisle):
    objects = a2_fixture_objects()
    maps = a2_fixture_maps(objects)
    rep = fixed_point_checks(aisle, objects, maps, describe)
    assert rep.all_passed and all(c.tested for c in rep.checks)
    assert fixed_point_checks(TrivialAisle(), objects, maps, describe).all_passed
    std = fixed_point_checks(StandardAisle(0), [A2["S1"]], [], describe)
    assert not std.checks[0].passed and "[-1]" in std.checks[0].failures[0]


@given(Y=a2_objects, data=st.data())
def test_reflection_is_exact(Y, data, aisle):
    X = random_complex(np.random.default_rng(data.draw(st.integers(0, 2**32 - 1))), a2())
    for f in chain_map_basis(X, Y)[:3]:
        assert reflection_preserves_cofiber(aisle, f)


def test_family_cuts(coll):
    fam = sod_to_tfamily(coll)
    assert fam.cuts == [1]
    with pytest.raises(ValueError):
        fam.aisle(0)
