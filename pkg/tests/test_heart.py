import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from towers.complexes import (
    chain_map_basis,
    concentrated,
    direct_sum_complex,
    find_equivalence,
    identity_chain,
    rep_map_in_degree,
    shift,
    two_term,
    zero_chain,
    zero_complex,
)
from towers.heart import (
    NotInHeart,
    factor_through_kernel,
    heart_analysis,
    hom_discreteness_report,
    is_heart_object,
    reconstruct_tstructure_from_heart,
    universal_property_check,
)
from towers.quiverrep import hom_rep_basis, projective
from towers.sampling import a2, a3, random_chain_map, random_complex, random_heart_object, random_quiver
from towers.tstruct import homology_window, in_geq, in_lt


def equiv(X, Y):
    return find_equivalence(X, Y) is not None


@st.composite
def heart_maps(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    q = random_quiver(rng)
    X, Y = random_heart_object(rng, q), random_heart_object(rng, q)
    return random_chain_map(rng, X, Y)


@pytest.fixture(scope="module")
def incl(A2):
    q = A2["q"]
    return rep_map_in_degree(hom_rep_basis(projective(q, 1), projective(q, 0))[0])


def test_heart_objects(A2):
    assert is_heart_object(A2["P1"]) and is_heart_object(A2["S1"])
    assert not is_heart_object(shift(A2["S1"], 1))
    q = A2["q"]
    X = two_term(hom_rep_basis(projective(q, 1), projective(q, 0))[0])
    assert is_heart_object(X)


def test_inclusion_analysis(A2, incl):
    a = heart_analysis(incl)
    assert a.ker.is_acyclic()
    assert equiv(a.coker, A2["S1"])
    assert equiv(a.im, A2["P2"]) and equiv(a.coim, A2["P2"]) and equiv(a.Z_f, A2["P2"])
    assert a.is_abelian_witnessed() and a.matches_rep_oracle()


def test_identity_and_zero(A2):
    X = A2["P1"]
    a = heart_analysis(identity_chain(X))
    assert a.ker.is_acyclic() and a.coker.is_acyclic() and equiv(a.im, X) and equiv(a.coim, X)
    M, N = A2["S1"], A2["P2"]
    z = heart_analysis(zero_chain(M, N))
    assert equiv(z.ker, M) and equiv(z.coker, N) and z.im.is_acyclic() and z.coim.is_acyclic()


def test_rejects_non_heart(A2):
    with pytest.raises(NotInHeart):
        heart_analysis(zero_chain(shift(A2["S1"], 1), A2["S1"]))


@given(f=heart_maps())
def test_heart_is_abelian(f):
    a = heart_analysis(f)
    assert a.all_in_heart()
    assert a.witness_im_coim is not None and a.witness_zf_im is not None and a.witness_zf_coim is not None
    assert a.matches_rep_oracle()
    assert all(d == 0 for d in hom_discreteness_report(f.source, f.target, (1, 2)).values())


def test_discreteness_examples(A2):
    r = hom_discreteness_report(A2["S1"], A2["S1"])
    assert r[0] >= 1 and r[1] == 0 and r[2] == 0
    assert hom_discreteness_report(A2["P1"], A2["P2"], range(0, 4)) == {0: 0, 1: 0, 2: 0, 3: 0}
    Z = zero_complex(A2["q"])
    assert set(hom_discreteness_report(Z, A2["S1"]).values()) == {0}


def test_universal_property(A2, incl):
    a = heart_analysis(incl)
    assert factor_through_kernel(a, a.k_f).exists
    zero_probe = zero_chain(A2["S1"], A2["P2"])
    fac = factor_through_kernel(a, zero_probe)
    assert fac.exists and not any(fac.coordinates)
    assert universal_property_check(a, [zero_probe])


@given(f=heart_maps())
def test_kernel_probe_factors(f):
    a = heart_analysis(f)
    fac = factor_through_kernel(a, a.k_f)
    assert fac.exists and fac.unique


def test_reconstruction_examples(A2):
    assert tuple(reconstruct_tstructure_from_heart(A2["S1"])) == (True, False, 1)
    assert tuple(reconstruct_tstructure_from_heart(shift(A2["S1"], -2))) == (False, True, 1)
    X = direct_sum_complex([A2["S1"], shift(A2["S2"], 1)])
    assert tuple(reconstruct_tstructure_from_heart(X)) == (True, False, 2)


@given(seed=st.integers(0, 2**32 - 1))
def test_reconstruction_matches_homology(seed):
    rng = np.random.default_rng(seed)
    X = random_complex(rng, random_quiver(rng))
    r = reconstruct_tstructure_from_heart(X)
    assert r.in_geq0 == in_geq(X, 0) and r.in_lt0 == in_lt(X, 0)
    w = homology_window(X)
    assert r.window == w
    assert r.a_length == (0 if w is None else w.hi - w.lo)
