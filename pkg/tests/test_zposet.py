import pytest
from hypothesis import given
from hypothesis import strategies as st

from towers.zposet import (
    INTEGERS,
    NEG_INF,
    POS_INF,
    NotAnElement,
    ZPosetMap,
    act,
    all_partial_orders,
    chain_order,
    embed_element,
    extend_map,
    extended,
    finite_chain,
    is_fixed_point,
    only_identity_action,
    valid_successors,
)


def test_act_examples():
    assert all(act(finite_chain(3), x, 1) == x for x in range(3))
    assert act(INTEGERS, 5, 2) == 7
    assert act(extended(INTEGERS), NEG_INF, 4) == NEG_INF
    assert act(extended(INTEGERS), POS_INF, -4) == POS_INF
    assert act(extended(INTEGERS), 1, -4) == -3


def test_act_rejects_non_elements():
    with pytest.raises(NotAnElement):
        act(finite_chain(3), 3, 1)
    with pytest.raises(NotAnElement):
        act(INTEGERS, POS_INF, 1)


@given(x=st.integers(-50, 50), m=st.integers(-5, 5), n=st.integers(-5, 5))
def test_integer_action_is_additive(x, m, n):
    assert act(INTEGERS, act(INTEGERS, x, m), n) == act(INTEGERS, x, m + n)


@pytest.mark.parametrize("k", range(1, 7))
def test_chains_carry_only_the_trivial_action(k):
    els, leq = chain_order(k)
    sols = valid_successors(els, leq)
    assert len(sols) == 1 and all(sols[0][x] == x for x in els)


@pytest.mark.parametrize("k", range(1, 5))
def test_finite_posets_carry_only_the_trivial_action(k):
    counts = {1: 1, 2: 3, 3: 19, 4: 219}
    orders = list(all_partial_orders(k))
    assert len(orders) == counts[k]  # labelled posets, OEIS A001035
    for rel in orders:
        assert only_identity_action(list(range(k)), lambda a, b: a == b or (a, b) in rel)


def test_extremes_are_fixed():
    P = finite_chain(4)
    assert is_fixed_point(P, P.maximum) and is_fixed_point(P, P.minimum)
    ZE = extended(INTEGERS)
    assert is_fixed_point(ZE, ZE.maximum) and is_fixed_point(ZE, ZE.minimum)
    assert INTEGERS.maximum is None


def test_embed_element_examples():
    e = embed_element(INTEGERS, 0)
    assert e.behaviour == "injective" and e(3) == 3
    assert all(embed_element(finite_chain(4), x).behaviour == "constant" for x in range(4))
    top = embed_element(extended(INTEGERS), POS_INF)
    assert top.behaviour == "constant" and top(-7) == POS_INF


@given(x=st.integers(-20, 20))
def test_embedding_injective_iff_not_fixed(x):
    for P in (INTEGERS, extended(INTEGERS)):
        e = embed_element(P, x)
        assert e.injective == (not is_fixed_point(P, x))
        assert e.is_monotone() and e.is_equivariant()


def test_extend_identity_into_extended_integers():
    phi = extend_map(embed_element(extended(INTEGERS), 0))
    assert phi(NEG_INF) == NEG_INF and phi(POS_INF) == POS_INF and phi(5) == 5
    assert phi.is_monotone() and phi.is_equivariant()


def test_extend_constant_map():
    P = finite_chain(3)
    const = ZPosetMap(P, P, table=tuple((x, 1) for x in P.elements()))
    ext = extend_map(const)
    assert [ext(x) for x in ext.source.elements()] == [0, 1, 1, 1, 2]
    assert ext.is_monotone() and ext.is_equivariant()


def test_extend_requires_min_and_max():
    with pytest.raises(ValueError, match="minimum or a maximum"):
        extend_map(embed_element(INTEGERS, 0))


def test_invalid_kinds():
    from towers.zposet import ZPoset
    with pytest.raises(ValueError):
        ZPoset("reals")
    with pytest.raises(ValueError):
        finite_chain(0)
    with pytest.raises(ValueError):
        extended(extended(INTEGERS))
