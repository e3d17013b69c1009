"""Seeded random fixtures: small reps, complexes and maps over small quivers."""

from __future__ import annotations

import numpy as np

from .complexes import (
    ChainMap,
    Complex,
    chain_map_basis,
    concentrated,
    zero_chain,
)
from .exactlin import Matrix
from .quiverrep import Quiver, Rep, RepMap, hom_rep_basis, kernel_cokernel_rep
from .tstruct import TChain, tau_geq, tau_lt

DEFAULT_SEED = 20240531


def a2() -> Quiver:
    """``0 -> 1``; ``P(0)`` has dims ``(1, 1)``, ``P(1) = S(1)`` has dims ``(0, 1)``."""
    return Quiver(2, ((0, 1),))


def a3() -> Quiver:
    return Quiver(3, ((0, 1), (1, 2)))


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int = 2) -> Matrix:
    return Matrix._wrap(rng.integers(0, p, size=(rows, cols), dtype=np.int64), p)


def random_rep(rng: np.random.Generator, q: Quiver, dims, p: int = 2) -> Rep:
    dims = tuple(int(d) for d in dims)
    maps = tuple(random_matrix(rng, dims[t], dims[s], p) for s, t in q.edges)
    return Rep(q, dims, maps, p)


def _split(rng: np.random.Generator, total: int, parts: int) -> list[int]:
    cuts = sorted(rng.integers(0, total + 1, size=parts - 1).tolist())
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def random_combination(rng: np.random.Generator, basis: list, zero, p: int = 2):
    acc = zero
    for b in basis:
        c = int(rng.integers(0, p))
        if c:
            acc = acc + b.scale(c)
    return acc


def random_complex(rng: np.random.Generator, q: Quiver, max_total: int = 4,
                   degrees: tuple[int, int] = (-3, 3), p: int = 2) -> Complex:
    """Total dimension in ``[1, max_total]``, terms inside ``degrees``.

    Differentials are drawn uniformly-ish from ``Hom(X_n, ker d_{n-1})`` so
    that ``d^2 = 0`` holds by construction.
    """
    total = int(rng.integers(1, max_total + 1))
    nterms = int(rng.integers(1, min(3, total) + 1))
    start = int(rng.integers(degrees[0], degrees[1] - nterms + 2))
    sizes = _split(rng, total, nterms)
    terms = {}
    for i, size in enumerate(sizes):
        dims = _split(rng, size, q.vertex_count)
        terms[start + i] = random_rep(rng, q, dims, p)
    diffs = {}
    prev_ker_incl = None
    for n in range(start, start + nterms):
        if n - 1 in terms:
            K, Kincl = (terms[n - 1], None) if prev_ker_incl is None else prev_ker_incl
            basis = hom_rep_basis(terms[n], K)
            zero = RepMap.unchecked(terms[n], K, [Matrix.zeros(K.dims[v], terms[n].dims[v], p)
                                                 for v in range(q.vertex_count)])
            g = random_combination(rng, basis, zero, p)
            d = g if Kincl is None else Kincl @ g
            diffs[n] = d
        K, Kincl, _, _ = kernel_cokernel_rep(diffs[n]) if n in diffs else (terms[n], None, None, None)
        prev_ker_incl = (K, Kincl)
    return Complex(q, terms, diffs, p)


def random_heart_object(rng: np.random.Generator, q: Quiver, max_total: int = 4, p: int = 2) -> Complex:
    """A complex with homology only in degree 0."""
    if rng.random() < 0.5:
        total = int(rng.integers(0, max_total + 1))
        return concentrated(random_rep(rng, q, _split(rng, total, q.vertex_count), p), 0)
    X = random_complex(rng, q, max_total, (-1, 1), p)
    return tau_lt(tau_geq(X, 0), 1)


def random_chain_map(rng: np.random.Generator, X: Complex, Y: Complex) -> ChainMap:
    basis = chain_map_basis(X, Y)
    return random_combination(rng, basis, zero_chain(X, Y), X.p)


def random_chain(rng: np.random.Generator, lo: int = -2, hi: int = 2, max_len: int = 3) -> TChain:
    k = int(rng.integers(1, max_len + 1))
    return TChain(tuple(int(i) for i in rng.integers(lo, hi + 1, size=k)))


def random_quiver(rng: np.random.Generator) -> Quiver:
    return a2() if rng.random() < 0.5 else a3()


def random_map(rng: np.random.Generator, q: Quiver, max_total: int = 4, p: int = 2) -> ChainMap:
    """A chain map between two random complexes, redrawn a few times to avoid the zero map."""
    X = random_complex(rng, q, max_total, p=p)
    Y = random_complex(rng, q, max_total, p=p)
    for _ in range(4):
        f = random_chain_map(rng, X, Y)
        if not f.is_zero():
            return f
        Y = random_complex(rng, q, max_total, p=p)
    return random_chain_map(rng, X, Y)
