import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from towers.exactlin import Matrix, rank
from towers.quiverrep import (
    Quiver,
    RepMap,
    direct_sum,
    hom_rep_basis,
    identity_map,
    injection,
    is_projective,
    kernel_cokernel_rep,
    projection,
    projective,
    rep_from_lists,
    reps_isomorphic,
    resolution_maps,
    simple,
    standard_resolution,
    top_dims,
    zero_rep,
)
from towers.sampling import a2, a3, random_rep

KRONECKER = Quiver(2, ((0, 1), (0, 1)))
STAR = Quiver(4, ((0, 3), (1, 3), (2, 3)))
QUIVERS = [a2(), a3(), KRONECKER, STAR]


@st.composite
def reps(draw, max_total=3, quivers=QUIVERS):
    q = draw(st.sampled_from(quivers))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    dims = [0] * q.vertex_count
    for _ in range(draw(st.integers(0, max_total))):
        dims[draw(st.integers(0, q.vertex_count - 1))] += 1
    return random_rep(rng, q, dims)


@st.composite
def rep_pairs(draw, max_total=3):
    M = draw(reps(max_total))
    N = draw(reps(max_total, quivers=[M.quiver]))
    return M, N


def enumerate_homs(M, N):
    """All vertex-wise matrix tuples M -> N that commute with the edge maps."""
    q, p = M.quiver, M.p
    shapes = [(N.dims[v], M.dims[v]) for v in range(q.vertex_count)]
    sizes = [r * c for r, c in shapes]
    count = 0
    for flat in itertools.product(range(p), repeat=sum(sizes)):
        comps, pos = [], 0
        for (r, c), n in zip(shapes, sizes):
            comps.append(Matrix(np.array(flat[pos:pos + n], dtype=np.int64).reshape(r, c), p))
            pos += n
        if all(N.maps[k] @ comps[s] == comps[t] @ M.maps[k] for k, (s, t) in enumerate(q.edges)):
            count += 1
    return count


def test_cyclic_quiver_rejected():
    with pytest.raises(ValueError, match="acyclic"):
        Quiver(2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError, match="loop"):
        Quiver(1, ((0, 0),))


def test_paths_ordered_by_length():
    q = Quiver(3, ((0, 1), (1, 2), (0, 2)))
    assert q.paths(0, 2) == ((2,), (0, 1))
    assert q.paths(0, 0) == ((),)
    assert q.path_count(2, 0) == 0


def test_projectives_of_a2():
    q = a2()
    assert projective(q, 0).dims == (1, 1)
    assert projective(q, 0).maps[0].tolist() == [[1]]
    assert projective(q, 1).dims == (0, 1)
    assert projective(KRONECKER, 0).dims == (1, 2)


def test_hom_examples_a2():
    q = a2()
    P1, P2 = projective(q, 0), projective(q, 1)
    assert len(hom_rep_basis(P2, P1)) == 1
    assert len(hom_rep_basis(P1, P2)) == 0
    assert enumerate_homs(P2, P1) == 2 and enumerate_homs(P1, P2) == 1


def test_non_commuting_map_rejected():
    q = a2()
    P1, S2 = projective(q, 0), simple(q, 1)
    with pytest.raises(ValueError):
        RepMap(P1, S2, [Matrix.zeros(0, 1), Matrix([[1]])])


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError, match="shape"):
        rep_from_lists(a2(), (1, 2), [[[1]]])


@given(pair=rep_pairs())
def test_hom_dimension_matches_enumeration(pair):
    M, N = pair
    basis = hom_rep_basis(M, N)
    assert M.p ** len(basis) == enumerate_homs(M, N)
    for f in basis:
        RepMap(f.source, f.target, f.comps)


@given(M=reps())
def test_identity_in_endomorphisms(M):
    basis = hom_rep_basis(M, M)
    if M.total_dim:
        assert len(basis) >= 1
    assert reps_isomorphic(M, M)


@given(pair=rep_pairs())
def test_kernel_cokernel(pair):
    M, N = pair
    basis = hom_rep_basis(M, N)
    if not basis:
        return
    f = basis[-1]
    K, k, C, c = kernel_cokernel_rep(f)
    assert (f @ k).is_zero() and (c @ f).is_zero()
    assert k.is_injective() and c.is_surjective()
    for v in range(M.quiver.vertex_count):
        r = rank(f.comps[v])
        assert K.dims[v] == M.dims[v] - r and C.dims[v] == N.dims[v] - r


@given(M=reps())
def test_standard_resolution_is_exact(M):
    P1, P0, d, aug = standard_resolution(M)
    assert is_projective(P0) and is_projective(P1)
    assert d.is_injective() and aug.is_surjective()
    assert (aug @ d).is_zero()
    for v in range(M.quiver.vertex_count):
        assert rank(d.comps[v]) == P0.dims[v] - M.dims[v]


@given(pair=rep_pairs(), data=st.data())
def test_resolution_is_functorial(pair, data):
    M, N = pair
    basis = hom_rep_basis(M, N)
    if not basis:
        return
    f = basis[data.draw(st.integers(0, len(basis) - 1))]
    _, _, dM, aM = standard_resolution(M)
    _, _, dN, aN = standard_resolution(N)
    f1, f0 = resolution_maps(f)
    assert aN @ f0 == f @ aM
    assert f0 @ dM == dN @ f1
    i1, i0 = resolution_maps(identity_map(M))
    assert i0 == identity_map(i0.source) and i1 == identity_map(i1.source)


@given(pair=rep_pairs(max_total=2))
def test_resolution_respects_composition(pair):
    M, N = pair
    for f in hom_rep_basis(M, N):
        for g in hom_rep_basis(N, N):
            gf1, gf0 = resolution_maps(g @ f)
            g1, g0 = resolution_maps(g)
            f1, f0 = resolution_maps(f)
            assert gf0 == g0 @ f0 and gf1 == g1 @ f1


def test_projectivity():
    q = a3()
    assert is_projective(projective(q, 1))
    assert not is_projective(simple(q, 0))
    assert is_projective(simple(q, 2))
    assert top_dims(projective(q, 0)) == (1, 0, 0)


def test_direct_sum_injections_projections():
    q = a2()
    parts = [projective(q, 0), simple(q, 0)]
    S = direct_sum(*parts)
    assert S.dims == (2, 1)
    for i in range(2):
        assert projection(parts, i) @ injection(parts, i) == identity_map(parts[i])
    assert (projection(parts, 1) @ injection(parts, 0)).is_zero()
    assert zero_rep(q).is_zero()


def test_reps_isomorphic_distinguishes():
    q = a2()
    assert not reps_isomorphic(projective(q, 0), direct_sum(simple(q, 0), simple(q, 1)))
    assert reps_isomorphic(projective(q, 1), simple(q, 1))
