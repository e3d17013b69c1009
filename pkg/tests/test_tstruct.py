import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import chain_maps, complexes
from towers.complexes import (
    cone,
    direct_sum_complex,
    find_equivalence,
    identity_chain,
    is_quasi_iso,
    shift,
    zero_chain,
    zero_complex,
)
from towers.sampling import a2, random_chain
from towers.tstruct import (
    TChain,
    Window,
    em_factorization,
    homology_window,
    in_geq,
    in_lt,
    initial_map,
    kfold_factorization,
    postnikov_tower,
    postnikov_tower_dual,
    sator_check,
    stagewise_equivalent,
    tau_geq,
    tau_lt,
    truncate,
    truncate_map,
    window_membership,
    z_postnikov_tower,
)

chains = st.builds(lambda seed: random_chain(np.random.default_rng(seed)), st.integers(0, 2**32 - 1))


@pytest.fixture(scope="module")
def Y(A2):
    """S1 + S2[1] + S1[-1]."""
    return direct_sum_complex([A2["S1"], shift(A2["S2"], 1), shift(A2["S1"], -1)])


def equiv(X, Y):
    return find_equivalence(X, Y) is not None


def test_window_membership(A2):
    assert window_membership(A2["S1"], Window(0, 1))
    assert not window_membership(shift(A2["S1"], 1), Window(0, 1))
    assert window_membership(shift(A2["S1"], 1), Window(1, math.inf))
    assert window_membership(zero_complex(a2()), Window(3, 3))
    assert str(Window(-math.inf, 0)) == "[-inf, 0)"
    with pytest.raises(ValueError):
        Window(2, 1)


def test_truncate_example(A2, Y):
    t = truncate(Y, 0)
    assert equiv(t.tau_geq, direct_sum_complex([A2["S1"], shift(A2["S2"], 1)]))
    assert equiv(t.tau_lt, shift(A2["S1"], -1))
    assert t.certified()


def test_truncate_aisle_object(A2):
    X = shift(A2["P1"], 1)
    t = truncate(X, 0)
    assert is_quasi_iso(t.incl) and t.tau_lt.is_acyclic()


@given(X=complexes(), n=st.integers(-3, 3))
def test_truncation_splits_homology(X, n):
    t = truncate(X, n)
    assert t.certified()
    assert in_geq(t.tau_geq, n) and in_lt(t.tau_lt, n)
    merged = dict(t.tau_geq.homology_dims)
    merged.update(t.tau_lt.homology_dims)
    assert merged == X.homology_dims
    assert tau_geq(X, n) is t.tau_geq and tau_lt(X, n) is t.tau_lt


@given(X=complexes())
def test_acyclic_iff_empty_window(X):
    w = homology_window(X)
    assert (w is None) == X.is_acyclic()
    if w is not None:
        assert Window(w.lo, w.hi).contains(X)
        assert not Window(w.lo + 1, w.hi).contains(X) and not Window(w.lo, w.hi - 1).contains(X)


@given(f=chain_maps(), n=st.integers(-2, 2))
def test_truncate_map_commutes(f, n):
    g, h = truncate_map(f, n)
    tx, ty = truncate(f.source, n), truncate(f.target, n)
    assert f @ tx.incl == ty.incl @ g
    assert h @ tx.proj == ty.proj @ f


def test_em_factorization_examples(A2, Y):
    for n in (-1, 0, 1):
        fp = em_factorization(initial_map(Y), n)
        assert equiv(fp.Z, tau_geq(Y, n))
    bend = zero_chain(shift(A2["S1"], -1), shift(A2["S2"], -1))
    fp = em_factorization(bend, 0)
    assert fp.e_is_equivalence and fp.f_in_M and not fp.f_in_E
    ident = em_factorization(identity_chain(Y), 0)
    assert ident.f_in_E and ident.f_in_M


@given(f=chain_maps(), n=st.integers(-2, 2))
def test_em_factorization_laws(f, n):
    fp = em_factorization(f, n)
    assert fp.composite_is_f()
    assert in_geq(cone(fp.e), n)
    assert in_lt(cone(fp.m), n + 1)
    assert em_factorization(fp.e, n).f_in_E and em_factorization(fp.m, n).f_in_M


def test_kfold_example(A2, Y):
    t = kfold_factorization(Y, TChain.of(0, 1))
    assert [str(w) for w in t.windows] == ["[1, +inf)", "[0, 1)", "[-inf, 0)"]
    assert equiv(t.stages[0], shift(A2["S2"], 1))
    assert equiv(t.stages[1], direct_sum_complex([shift(A2["S2"], 1), A2["S1"]]))
    assert t.certified


def test_kfold_heart_object_higher_stages_vanish(A2):
    t = kfold_factorization(A2["S1"], TChain.of(0, 1, 2))
    assert all(Z.is_acyclic() for Z in t.stages[:2])


def test_kfold_length_one_is_truncation(Y):
    t = kfold_factorization(Y, TChain.of(0))
    assert equiv(t.stages[0], tau_geq(Y, 0))


@given(X=complexes(), chain=chains)
def test_kfold_constructions_agree(X, chain):
    a = kfold_factorization(X, chain)
    assert stagewise_equivalent(a, kfold_factorization(X, chain, method="induction"))
    assert stagewise_equivalent(a, postnikov_tower(initial_map(X), chain))


def test_postnikov_examples(A2, Y):
    bend = zero_chain(shift(A2["S1"], -1), shift(A2["S2"], -1))
    t = postnikov_tower(bend, TChain.of(0))
    assert t.certified and not equiv(t.stages[0], bend.source)
    ident = postnikov_tower(identity_chain(Y), TChain.of(-1, 0, 1))
    assert all(equiv(Z, Y) for Z in ident.stages)
    assert all(C.is_acyclic() for C in ident.cofibers)


@given(f=chain_maps(), chain=chains)
def test_postnikov_certified_and_unique(f, chain):
    t = postnikov_tower(f, chain)
    d = postnikov_tower_dual(f, chain)
    assert t.certified and d.certified
    assert stagewise_equivalent(t, d)


def test_z_tower_examples(A2, Y):
    t = z_postnikov_tower(initial_map(A2["S1"]))
    assert (t.n0, t.k0, t.levels) == (0, 1, [0])
    assert z_postnikov_tower(identity_chain(Y)).levels == []
    t = z_postnikov_tower(initial_map(Y))
    assert t.levels == [-1, 0, 1] and t.certified


@given(X=complexes())
def test_z_tower_levels_are_homology_degrees(X):
    t = z_postnikov_tower(initial_map(X))
    assert t.levels == sorted(X.homology_dims)
    for w, C in zip(t.windows, t.cofibers):
        assert C.is_acyclic() or w.hi - w.lo == 1


def test_sator_examples(A2):
    assert sator_check(A2["S1"], 0)
    assert sator_check(zero_complex(a2()), 0)
    assert all(sator_check(shift(A2["S2"], 1), n) for n in range(-2, 3))


@given(X=complexes(), n=st.integers(-2, 2))
def test_sator_property(X, n):
    assert sator_check(X, n)


def test_chain_validation():
    assert TChain((2, 0, 2)).indices == (0, 2)
    with pytest.raises(ValueError):
        TChain(())
