"""Bounded chain complexes of quiver representations.

Indexing is homological: ``d_n: X_n -> X_{n-1}``.  The shift ``X[k]`` has
``X[k]_n = X_{n-k}`` and differential ``(-1)^k d``, so ``H_n(X[k]) = H_{n-k}(X)``.
The cone of ``f: X -> Y`` has ``cone_n = X_{n-1} + Y_n`` and

    d(x, y) = (-d x, d y - f x),

which fixes every other sign in this package.  The fiber is ``cone[-1]``:
``fib_n = X_n + Y_{n+1}`` with ``d(a, c) = (d a, f a - d c)``.

Derived homs ``Hom_D(X, Y[n])`` are chain maps ``P -> Y[n]`` modulo homotopy,
where ``P -> X`` is the functorial projective replacement (the totalised
standard resolution).  Because ``P`` is termwise free, a chain map out of it
is determined by the images of its generators, which turns the whole hom
complex into plain matrices over F_p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactlin import (
    Matrix,
    column_space_complement,
    cokernel_projection,
    hstack,
    kernel_basis,
    kron,
    left_inverse,
    rank,
    right_inverse,
    rref_with_pivots,
    solve_linear,
)
from .quiverrep import (
    Quiver,
    QuiverMismatch,
    Rep,
    RepMap,
    block_map,
    direct_sum,
    free_images,
    identity_map,
    is_projective,
    map_from_free,
    resolution_maps,
    resolution_terms,
    standard_resolution,
    zero_map,
    zero_rep,
)

EQUIVALENCE_SEARCH_CAP = 2 ** 16


class Undecided(RuntimeError):
    """The equivalence search budget was exhausted before a decision."""


class Complex:
    """Bounded complex; degrees not present in ``terms`` hold the zero rep."""

    def __init__(self, quiver: Quiver, terms: Mapping[int, Rep],
                 diffs: Mapping[int, RepMap] | None = None, p: int = 2, check: bool = True):
        self.quiver = quiver
        self.p = p
        self._terms: dict[int, Rep] = {}
        for n, M in terms.items():
            if M.quiver != quiver or M.p != p:
                raise QuiverMismatch(f"term in degree {n} lives on another quiver or modulus")
            if M.total_dim:
                self._terms[int(n)] = M
        self._diffs: dict[int, RepMap] = {}
        for n, d in (diffs or {}).items():
            n = int(n)
            src, tgt = self.term(n), self.term(n - 1)
            if d.source != src or d.target != tgt:
                raise ValueError(
                    f"differential d_{n} has shape {d.source.dims}->{d.target.dims}, "
                    f"expected {src.dims}->{tgt.dims}"
                )
            if check:
                RepMap(d.source, d.target, d.comps)
            if src.total_dim and tgt.total_dim and not d.is_zero():
                self._diffs[n] = RepMap.unchecked(src, tgt, d.comps)
        if check:
            for n in self._diffs:
                if n - 1 in self._diffs and not (self._diffs[n - 1] @ self._diffs[n]).is_zero():
                    raise ValueError(f"d_{n - 1} d_{n} != 0")

    # -- access --
    def term(self, n: int) -> Rep:
        M = self._terms.get(n)
        if M is None:
            return self._zero
        return M

    @cached_property
    def _zero(self) -> Rep:
        return zero_rep(self.quiver, self.p)

    def diff(self, n: int) -> RepMap:
        d = self._diffs.get(n)
        if d is None:
            return zero_map(self.term(n), self.term(n - 1))
        return d

    @property
    def degrees(self) -> list[int]:
        return sorted(self._terms)

    @property
    def terms(self) -> dict[int, Rep]:
        return dict(self._terms)

    @property
    def diffs(self) -> dict[int, RepMap]:
        return dict(self._diffs)

    @property
    def lo(self) -> int | None:
        return min(self._terms) if self._terms else None

    @property
    def hi(self) -> int | None:
        return max(self._terms) if self._terms else None

    @property
    def total_dim(self) -> int:
        return sum(M.total_dim for M in self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    # -- structural equality --
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        if self is other:
            return True
        return (self.quiver == other.quiver and self.p == other.p
                and self._terms == other._terms
                and set(self._diffs) == set(other._diffs)
                and all(self._diffs[n].comps == other._diffs[n].comps for n in self._diffs))

    def __hash__(self) -> int:
        return hash(tuple((n, M.dims) for n, M in sorted(self._terms.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {M.dims}" for n, M in sorted(self._terms.items()))
        return f"Complex({{{body}}})"

    # -- homology --
    def homology_data(self, n: int) -> "HomologyData":
        cache = self._homology_cache
        if n not in cache:
            cache[n] = HomologyData(self, n)
        return cache[n]

    @cached_property
    def _homology_cache(self) -> dict:
        return {}

    @cached_property
    def homology_dims(self) -> dict[int, tuple[int, ...]]:
        """Nonzero homology dimension vectors, by degree."""
        out = {}
        for n in self.degrees:
            dims = []
            for v in range(self.quiver.vertex_count):
                dims.append(self.term(n).dims[v] - rank(self.diff(n).comps[v])
                            - rank(self.diff(n + 1).comps[v]))
            if any(dims):
                out[n] = tuple(dims)
        return out

    def is_acyclic(self) -> bool:
        return not self.homology_dims

    def homology_support(self) -> tuple[int, int] | None:
        """``(lo, hi)`` with homology nonzero exactly inside ``[lo, hi]`` hull, or ``None``."""
        hd = self.homology_dims
        if not hd:
            return None
        return min(hd), max(hd)

    @cached_property
    def resolution(self) -> tuple["Complex", "ChainMap"]:
        return _totalised_resolution(self)


class HomologyData:
    """Bases realising ``H_n(X) = ker d_n / im d_{n+1}`` vertex by vertex.

    ``Z[v]`` spans the cycles, ``L[v]`` is a left inverse of ``Z[v]``, ``Q[v]``
    projects cycle coordinates onto homology and ``S[v]`` is a right inverse
    of ``Q[v]``; ``section[v] = Z[v] S[v]`` picks cycle representatives.
    """

    def __init__(self, X: Complex, n: int):
        q, p = X.quiver, X.p
        self.Z, self.L, self.Q, self.S = [], [], [], []
        for v in range(q.vertex_count):
            Z = kernel_basis(X.diff(n).comps[v])
            L = left_inverse(Z)
            Bz = L @ X.diff(n + 1).comps[v]
            Q = cokernel_projection(Bz)
            self.Z.append(Z)
            self.L.append(L)
            self.Q.append(Q)
            self.S.append(right_inverse(Q))
        maps = []
        M = X.term(n)
        for k, (s, t) in enumerate(q.edges):
            maps.append(self.Q[t] @ self.L[t] @ M.maps[k] @ self.Z[s] @ self.S[s])
        self.rep = Rep(q, tuple(Q.rows for Q in self.Q), tuple(maps), p)

    def project(self, v: int, cycle: Matrix) -> Matrix:
        return self.Q[v] @ self.L[v] @ cycle

    def section(self, v: int) -> Matrix:
        return self.Z[v] @ self.S[v]


def homology_at(X: Complex, n: int) -> Rep:
    return X.homology_data(n).rep


def homology_map(f: "ChainMap", n: int) -> RepMap:
    hx, hy = f.source.homology_data(n), f.target.homology_data(n)
    comps = [hy.Q[v] @ hy.L[v] @ f.comp(n).comps[v] @ hx.Z[v] @ hx.S[v]
             for v in range(f.source.quiver.vertex_count)]
    return RepMap.unchecked(hx.rep, hy.rep, comps)


class ChainMap:
    def __init__(self, source: Complex, target: Complex, comps: Mapping[int, RepMap] | None = None,
                 check: bool = True):
        if source.quiver != target.quiver or source.p != target.p:
            raise QuiverMismatch("chain map between complexes on different quivers")
        self.source = source
        self.target = target
        self._comps: dict[int, RepMap] = {}
        for n, c in (comps or {}).items():
            n = int(n)
            if c.source != source.term(n) or c.target != target.term(n):
                raise ValueError(f"component in degree {n} has the wrong shape")
            if check:
                RepMap(c.source, c.target, c.comps)
            if not c.is_zero():
                self._comps[n] = RepMap.unchecked(source.term(n), target.term(n), c.comps)
        if check:
            for n in set(source.degrees) | set(target.degrees) | {m + 1 for m in source.degrees}:
                lhs = target.diff(n) @ self.comp(n)
                rhs = self.comp(n - 1) @ source.diff(n)
                if lhs.comps != rhs.comps:
                    raise ValueError(f"chain map law fails in degree {n}")

    def comp(self, n: int) -> RepMap:
        c = self._comps.get(n)
        if c is None:
            return zero_map(self.source.term(n), self.target.term(n))
        return c

    @property
    def comps(self) -> dict[int, RepMap]:
        return dict(self._comps)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        if other.target != self.source:
            raise ValueError("chain maps are not composable")
        comps = {n: self.comp(n) @ other.comp(n) for n in other._comps if n in self._comps}
        return ChainMap(other.source, self.target, comps, check=False)

    def _pointwise(self, other: "ChainMap", op) -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise ValueError("chain maps have different endpoints")
        comps = {n: op(self.comp(n), other.comp(n)) for n in set(self._comps) | set(other._comps)}
        return ChainMap(self.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, lambda a, b: a + b)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, lambda a, b: a - b)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -c for n, c in self._comps.items()}, check=False)

    def scale(self, c: int) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: m.scale(c) for n, m in self._comps.items()}, check=False)

    def is_zero(self) -> bool:
        return not self._comps

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and set(self._comps) == set(other._comps)
                and all(self._comps[n].comps == other._comps[n].comps for n in self._comps))

    __hash__ = None

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


class Homotopy:
    """Degree +1 maps ``h_n: X_n -> Y_{n+1}``."""

    def __init__(self, source: Complex, target: Complex, comps: Mapping[int, RepMap] | None = None):
        self.source = source
        self.target = target
        self._comps = {int(n): c for n, c in (comps or {}).items() if not c.is_zero()}

    def comp(self, n: int) -> RepMap:
        c = self._comps.get(n)
        if c is None:
            return zero_map(self.source.term(n), self.target.term(n + 1))
        return c

    def boundary(self) -> ChainMap:
        """``d h + h d`` as a chain map."""
        X, Y = self.source, self.target
        degs = set(X.degrees) | {n - 1 for n in Y.degrees}
        comps = {}
        for n in degs:
            comps[n] = Y.diff(n + 1) @ self.comp(n) + self.comp(n - 1) @ X.diff(n)
        return ChainMap(X, Y, comps, check=False)


# --- constructors -------------------------------------------------------------

def zero_complex(quiver: Quiver, p: int = 2) -> Complex:
    return Complex(quiver, {}, {}, p)


def concentrated(M: Rep, n: int = 0) -> Complex:
    return Complex(M.quiver, {n: M}, {}, M.p)


def two_term(f: RepMap, top: int = 1) -> Complex:
    """``f`` placed as the differential ``d_top: X_top -> X_{top-1}``."""
    return Complex(f.source.quiver, {top: f.source, top - 1: f.target}, {top: f}, f.source.p)


def rep_map_in_degree(f: RepMap, n: int = 0) -> ChainMap:
    return ChainMap(concentrated(f.source, n), concentrated(f.target, n), {n: f})


def identity_chain(X: Complex) -> ChainMap:
    return ChainMap(X, X, {n: identity_map(X.term(n)) for n in X.degrees}, check=False)


def zero_chain(X: Complex, Y: Complex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


def direct_sum_complex(parts: Sequence[Complex]) -> Complex:
    q, p = parts[0].quiver, parts[0].p
    degs = sorted(set().union(*[X.degrees for X in parts]))
    terms = {n: direct_sum(*[X.term(n) for X in parts]) for n in degs}
    diffs = {}
    for n in degs:
        if n - 1 in terms:
            blocks = [[X.diff(n) if i == j else None for j, X in enumerate(parts)]
                      for i in range(len(parts))]
            diffs[n] = block_map([X.term(n) for X in parts], [X.term(n - 1) for X in parts],
                                 blocks, source=terms[n], target=terms[n - 1])
    return Complex(q, terms, diffs, p, check=False)


def sum_injection(parts: Sequence[Complex], i: int, total: Complex) -> ChainMap:
    comps = {}
    for n in parts[i].degrees:
        row = [[identity_map(parts[i].term(n)) if r == i else None] for r in range(len(parts))]
        comps[n] = block_map([parts[i].term(n)], [X.term(n) for X in parts], row,
                             source=parts[i].term(n), target=total.term(n))
    return ChainMap(parts[i], total, comps, check=False)


def sum_projection(parts: Sequence[Complex], i: int, total: Complex) -> ChainMap:
    comps = {}
    for n in parts[i].degrees:
        col = [[identity_map(parts[i].term(n)) if c == i else None for c in range(len(parts))]]
        comps[n] = block_map([X.term(n) for X in parts], [parts[i].term(n)], col,
                             source=total.term(n), target=parts[i].term(n))
    return ChainMap(total, parts[i], comps, check=False)


def sum_map(maps: Sequence[ChainMap], source: Complex | None = None,
            target: Complex | None = None) -> ChainMap:
    """Block-diagonal ``f_1 + ... + f_r`` between direct sums."""
    srcs = [f.source for f in maps]
    tgts = [f.target for f in maps]
    S = source or direct_sum_complex(srcs)
    T = target or direct_sum_complex(tgts)
    comps = {}
    for n in S.degrees:
        blocks = [[maps[i].comp(n) if i == j else None for j in range(len(maps))]
                  for i in range(len(maps))]
        comps[n] = block_map([X.term(n) for X in srcs], [Y.term(n) for Y in tgts], blocks,
                             source=S.term(n), target=T.term(n))
    return ChainMap(S, T, comps, check=False)


def row_map(maps: Sequence[ChainMap], source: Complex | None = None) -> ChainMap:
    """``(f_1, ..., f_r): X_1 + ... + X_r -> Y``."""
    srcs = [f.source for f in maps]
    S = source or direct_sum_complex(srcs)
    Y = maps[0].target
    comps = {}
    for n in S.degrees:
        comps[n] = block_map([X.term(n) for X in srcs], [Y.term(n)], [[f.comp(n) for f in maps]],
                             source=S.term(n), target=Y.term(n))
    return ChainMap(S, Y, comps, check=False)


def column_map(maps: Sequence[ChainMap], target: Complex | None = None) -> ChainMap:
    """``(f_1; ...; f_r): X -> Y_1 + ... + Y_r``."""
    tgts = [f.target for f in maps]
    T = target or direct_sum_complex(tgts)
    X = maps[0].source
    comps = {}
    for n in X.degrees:
        comps[n] = block_map([X.term(n)], [Y.term(n) for Y in tgts], [[f.comp(n)] for f in maps],
                             source=X.term(n), target=T.term(n))
    return ChainMap(X, T, comps, check=False)


# --- shift, cone, fiber ---------------------------------------------------------

def shift(X: Complex, k: int) -> Complex:
    if k == 0:
        return X
    sign = -1 if k % 2 else 1
    terms = {n + k: M for n, M in X.terms.items()}
    diffs = {n + k: d.scale(sign) for n, d in X.diffs.items()}
    return Complex(X.quiver, terms, diffs, X.p, check=False)


def shift_map(f: ChainMap, k: int, source: Complex | None = None,
              target: Complex | None = None) -> ChainMap:
    if k == 0:
        return f
    S = source or shift(f.source, k)
    T = target or shift(f.target, k)
    return ChainMap(S, T, {n + k: c for n, c in f.comps.items()}, check=False)


def _cone_complex(f: ChainMap) -> Complex:
    X, Y = f.source, f.target
    degs = sorted(set(n + 1 for n in X.degrees) | set(Y.degrees))
    terms = {n: direct_sum(X.term(n - 1), Y.term(n)) for n in degs}
    diffs = {}
    for n in degs:
        if n - 1 not in terms:
            continue
        blocks = [[-X.diff(n - 1), None],
                  [-f.comp(n - 1), Y.diff(n)]]
        diffs[n] = block_map([X.term(n - 1), Y.term(n)], [X.term(n - 2), Y.term(n - 1)], blocks,
                             source=terms[n], target=terms[n - 1])
    return Complex(X.quiver, terms, diffs, X.p, check=False)


@dataclass(frozen=True, eq=False)
class TriangleWitness:
    """``X --f--> Y --incl--> cone(f) --proj--> X[1]`` with the fiber side."""

    f: ChainMap
    cone: Complex
    incl: ChainMap
    proj: ChainMap

    @cached_property
    def fiber(self) -> Complex:
        return shift(self.cone, -1)

    @cached_property
    def fiber_map(self) -> ChainMap:
        """``fib(f) -> X``, ``(a, c) -> a``."""
        return shift_map(self.proj, -1, source=self.fiber, target=self.f.source)

    @cached_property
    def fiber_incl(self) -> ChainMap:
        """``Y[-1] -> fib(f)``, ``c -> (0, c)``."""
        return shift_map(self.incl, -1, target=self.fiber)

    def long_exact_sequence_ok(self) -> bool:
        return long_exact_sequence_ok(self.f, self.incl, self.proj)


def cone_and_fiber(f: ChainMap) -> TriangleWitness:
    C = _cone_complex(f)
    X, Y = f.source, f.target
    incl, proj = {}, {}
    for n in C.degrees:
        parts = [X.term(n - 1), Y.term(n)]
        incl[n] = block_map([Y.term(n)], parts, [[None], [identity_map(Y.term(n))]],
                            source=Y.term(n), target=C.term(n))
        proj[n] = block_map(parts, [X.term(n - 1)], [[identity_map(X.term(n - 1)), None]],
                            source=C.term(n), target=X.term(n - 1))
    X1 = shift(X, 1)
    return TriangleWitness(f, C, ChainMap(Y, C, incl, check=False), ChainMap(C, X1, proj, check=False))


def cone(f: ChainMap) -> Complex:
    return cone_and_fiber(f).cone


def fiber(f: ChainMap) -> Complex:
    return cone_and_fiber(f).fiber


def long_exact_sequence_ok(f: ChainMap, g: ChainMap, h: ChainMap) -> bool:
    """Rank bookkeeping for ``... H_n X -> H_n Y -> H_n Z -> H_n X[1] = H_{n-1} X ...``.

    Exactness at each vertex and slot: ``rank(in) + rank(out) = dim``.
    """
    X, Y, Z = f.source, f.target, g.target
    degs = set()
    for C in (X, Y, Z):
        degs |= set(C.degrees)
    degs |= {n + 1 for n in X.degrees}
    q = X.quiver
    for n in sorted(degs):
        hf, hg, hh = homology_map(f, n), homology_map(g, n), homology_map(h, n)
        hh_next = homology_map(h, n + 1)
        for v in range(q.vertex_count):
            slots = [
                (hh_next.comps[v], hf.comps[v], hf.source.dims[v]),   # at H_n X
                (hf.comps[v], hg.comps[v], hf.target.dims[v]),         # at H_n Y
                (hg.comps[v], hh.comps[v], hg.target.dims[v]),         # at H_n Z
            ]
            for into, out, dim in slots:
                if into.rows != dim or out.cols != dim:
                    return False
                if rank(into) + rank(out) != dim:
                    return False
                if not (out @ into).is_zero():
                    return False
    return True


# --- maps into fibers and out of cones -------------------------------------------

def map_into_fiber(tri: TriangleWitness, h: ChainMap, s: Homotopy | None = None) -> ChainMap:
    """``W -> fib(phi)``, ``w -> (h w, s w)``; requires ``phi h = d s + s d``."""
    phi = tri.f
    F = tri.fiber
    W = h.source
    X, Y = phi.source, phi.target
    comps = {}
    for n in W.degrees:
        parts = [X.term(n), Y.term(n + 1)]
        sn = s.comp(n) if s is not None else zero_map(W.term(n), Y.term(n + 1))
        comps[n] = block_map([W.term(n)], parts, [[h.comp(n)], [sn]],
                             source=W.term(n), target=F.term(n))
    return ChainMap(W, F, comps)


def map_out_of_cone(tri: TriangleWitness, g: ChainMap, t: Homotopy | None = None) -> ChainMap:
    """``cone(phi) -> W``, ``(a, c) -> t a + g c``; requires ``d t + t d = -g phi``."""
    phi = tri.f
    C = tri.cone
    W = g.target
    X, Y = phi.source, phi.target
    comps = {}
    for n in C.degrees:
        parts = [X.term(n - 1), Y.term(n)]
        tn = t.comp(n - 1) if t is not None else zero_map(X.term(n - 1), W.term(n))
        comps[n] = block_map(parts, [W.term(n)], [[tn, g.comp(n)]],
                             source=C.term(n), target=W.term(n))
    return ChainMap(C, W, comps)


def induced_fiber_map(tri1: TriangleWitness, tri2: TriangleWitness,
                      alpha: ChainMap, gamma: ChainMap, t: Homotopy | None = None) -> ChainMap:
    """``fib(phi1) -> fib(phi2)`` from a square ``phi2 alpha ~ gamma phi1``.

    ``(a, c) -> (alpha a, gamma c + t a)`` where ``d t + t d = phi2 alpha - gamma phi1``.
    """
    F1, F2 = tri1.fiber, tri2.fiber
    X1, Y1 = tri1.f.source, tri1.f.target
    X2, Y2 = tri2.f.source, tri2.f.target
    comps = {}
    for n in F1.degrees:
        tn = t.comp(n) if t is not None else zero_map(X1.term(n), Y2.term(n + 1))
        blocks = [[alpha.comp(n), None], [tn, gamma.comp(n + 1)]]
        comps[n] = block_map([X1.term(n), Y1.term(n + 1)], [X2.term(n), Y2.term(n + 1)], blocks,
                             source=F1.term(n), target=F2.term(n))
    return ChainMap(F1, F2, comps)


def induced_cone_map(tri1: TriangleWitness, tri2: TriangleWitness,
                     alpha: ChainMap, gamma: ChainMap, t: Homotopy | None = None) -> ChainMap:
    """``cone(phi1) -> cone(phi2)``, ``(a, c) -> (alpha a, gamma c + t a)``.

    Requires ``d t + t d = phi2 alpha - gamma phi1``.
    """
    C1, C2 = tri1.cone, tri2.cone
    X1, Y1 = tri1.f.source, tri1.f.target
    X2, Y2 = tri2.f.source, tri2.f.target
    comps = {}
    for n in C1.degrees:
        tn = t.comp(n - 1) if t is not None else zero_map(X1.term(n - 1), Y2.term(n))
        blocks = [[alpha.comp(n - 1), None], [tn, gamma.comp(n)]]
        comps[n] = block_map([X1.term(n - 1), Y1.term(n)], [X2.term(n - 1), Y2.term(n)], blocks,
                             source=C1.term(n), target=C2.term(n))
    return ChainMap(C1, C2, comps)


# --- pullouts -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Pullout:
    """Homotopy pullback ``P`` of ``X --f--> C <--g-- Y``.

    ``homotopy`` witnesses ``f to_x - g to_y = d h + h d``.
    """

    P: Complex
    to_x: ChainMap
    to_y: ChainMap
    homotopy: Homotopy
    triangle: TriangleWitness
    sum: Complex

    def __iter__(self):
        return iter((self.P, self.to_x, self.to_y))


def pullout(f: ChainMap, g: ChainMap) -> Pullout:
    """Fiber of ``(f, -g): X + Y -> C``."""
    if f.target != g.target:
        raise ValueError("pullout legs must share their target")
    X, Y, C = f.source, g.source, f.target
    S = direct_sum_complex([X, Y])
    diff_map = row_map([f, -g], source=S)
    tri = cone_and_fiber(diff_map)
    F = tri.fiber
    to_sum = tri.fiber_map
    to_x = sum_projection([X, Y], 0, S) @ to_sum
    to_y = sum_projection([X, Y], 1, S) @ to_sum
    hcomps = {}
    for n in F.degrees:
        hcomps[n] = block_map([S.term(n), C.term(n + 1)], [C.term(n + 1)],
                              [[None, identity_map(C.term(n + 1))]],
                              source=F.term(n), target=C.term(n + 1))
    return Pullout(F, to_x, to_y, Homotopy(F, C, hcomps), tri, S)


@dataclass(frozen=True, eq=False)
class Pushout:
    P: Complex
    from_x: ChainMap
    from_y: ChainMap
    triangle: TriangleWitness
    sum: Complex

    def __iter__(self):
        return iter((self.P, self.from_x, self.from_y))


def pushout(u: ChainMap, v: ChainMap) -> Pushout:
    """Cone of ``(u; -v): W -> X + Y`` for a span ``X <--u-- W --v--> Y``."""
    if u.source != v.source:
        raise ValueError("pushout legs must share their source")
    X, Y = u.target, v.target
    S = direct_sum_complex([X, Y])
    col = column_map([u, -v], target=S)
    tri = cone_and_fiber(col)
    from_x = tri.incl @ sum_injection([X, Y], 0, S)
    from_y = tri.incl @ sum_injection([X, Y], 1, S)
    return Pushout(tri.cone, from_x, from_y, tri, S)


# --- quasi-isomorphisms -------------------------------------------------------------

def is_quasi_iso(f: ChainMap) -> bool:
    if f.source.homology_dims != f.target.homology_dims:
        return False
    return cone(f).is_acyclic()


def is_zero_in_derived(f: ChainMap) -> bool:
    """Whether ``f`` vanishes in the derived category."""
    return HomSpace(f.source, f.target, 0).is_null(f, resolved=False)


# --- projective replacement --------------------------------------------------------

def _totalised_resolution(X: Complex) -> tuple[Complex, ChainMap]:
    q, p = X.quiver, X.p
    res = {n: standard_resolution(X.term(n)) for n in X.degrees}
    degs = sorted(set(X.degrees) | {n + 1 for n in X.degrees})
    terms, pieces = {}, {}
    for m in degs:
        pieces[m] = _pieces(X, m)
        terms[m] = direct_sum(*pieces[m])
    fmaps = {n: resolution_maps(X.diff(n)) for n in X.degrees if n - 1 in res}
    diffs = {}
    for m in degs:
        if m - 1 not in pieces:
            continue
        P0m, P1m1 = pieces[m]
        P0m1, P1m2 = pieces[m - 1]
        p0d = fmaps[m][1] if m in fmaps else None
        delta = res[m - 1][2] if m - 1 in res else None
        p1d = -fmaps[m - 1][0] if m - 1 in fmaps else None
        diffs[m] = block_map([P0m, P1m1], [P0m1, P1m2], [[p0d, delta], [None, p1d]],
                             source=terms[m], target=terms[m - 1])
    P = Complex(q, terms, diffs, p, check=False)
    eps = {}
    for m in X.degrees:
        P0m, P1m1 = pieces[m]
        eps[m] = block_map([P0m, P1m1], [X.term(m)], [[res[m][3], None]],
                           source=terms[m], target=X.term(m))
    return P, ChainMap(P, X, eps, check=False)


def resolve(X: Complex) -> tuple[Complex, ChainMap]:
    """Functorial termwise-free replacement ``P -> X`` (always the totalised resolution)."""
    return X.resolution


def resolve_map(f: ChainMap) -> ChainMap:
    """The induced map between functorial replacements; strictly commutes with the augmentations."""
    PX, _ = resolve(f.source)
    PY, _ = resolve(f.target)
    X = f.source
    comps = {}
    cache = {n: resolution_maps(f.comp(n)) for n in X.degrees}
    for m in PX.degrees:
        P0m, P1m1 = _pieces(f.source, m)
        Q0m, Q1m1 = _pieces(f.target, m)
        a = cache[m][1] if m in cache else None
        b = cache[m - 1][0] if m - 1 in cache else None
        comps[m] = block_map([P0m, P1m1], [Q0m, Q1m1], [[a, None], [None, b]],
                             source=PX.term(m), target=PY.term(m))
    return ChainMap(PX, PY, comps, check=False)


def _pieces(X: Complex, m: int) -> tuple[Rep, Rep]:
    """``(P0(X_m), P1(X_{m-1}))``, the two summands of the replacement in degree ``m``."""
    return resolution_terms(X.term(m))[1], resolution_terms(X.term(m - 1))[0]


def projective_replacement(X: Complex) -> tuple[Complex, ChainMap]:
    if all(is_projective(M) for M in X.terms.values()):
        return X, identity_chain(X)
    return resolve(X)


# --- derived homs ----------------------------------------------------------------------

def _hom_slots(P: Complex, Y: Complex, k: int):
    """Layout of degree-``k`` generator data: ``(m, i, v, offset, size)``."""
    slots, off = [], 0
    for m in P.degrees:
        Pm = P.term(m)
        for i, v in enumerate(Pm.generators):
            size = Y.term(m + k).dims[v]
            slots.append((m, i, v, off, size))
            off += size
    return slots, off


def _hom_differential(P: Complex, Y: Complex, k: int) -> Matrix:
    """``h -> d h - (-1)^k h d`` on generator data, from degree ``k`` to ``k - 1``."""
    q, p = P.quiver, P.p
    src, ns = _hom_slots(P, Y, k)
    tgt, nt = _hom_slots(P, Y, k - 1)
    tindex = {(m, i): (off, size) for m, i, _, off, size in tgt}
    D = np.zeros((nt, ns), dtype=np.int64)
    sign = -1 if k % 2 == 0 else 1
    for m, i, v, off, size in src:
        if not size:
            continue
        toff, tsize = tindex[(m, i)]
        if tsize:
            D[toff:toff + tsize, off:off + size] += Y.diff(m + k).comps[v].array
        # contributions to generators j of P_{m+1} whose boundary involves g_i
        if (m + 1) not in P.terms:
            continue
        Pm1, Pm = P.term(m + 1), P.term(m)
        dP = P.diff(m + 1)
        Ym = Y.term(m + k)
        for j, w in enumerate(Pm1.generators):
            toff, tsize = tindex[(m + 1, j)]
            if not tsize:
                continue
            col = dP.comps[w].array[:, Pm1.generator_offsets[w][j]]
            base = Pm.generator_offsets[w][i]
            for idx, walk in enumerate(q.paths(v, w)):
                c = int(col[base + idx])
                if c:
                    D[toff:toff + tsize, off:off + size] += (
                        sign * c * Ym.path_matrix(v, walk).array)
    return Matrix._wrap(D % p, p)


class HomSpace:
    """``Hom_D(X, Y[n])``: chain maps ``resolve(X) -> Y[n]`` modulo homotopy."""

    def __init__(self, X: Complex, Y: Complex, n: int = 0):
        if X.quiver != Y.quiver or X.p != Y.p:
            raise QuiverMismatch("hom space between complexes on different quivers")
        self.X, self.Y, self.n = X, Y, n
        self.P, self.eps = resolve(X)
        self.target = shift(Y, n)
        self.D0 = _hom_differential(self.P, self.target, 0)
        self.D1 = _hom_differential(self.P, self.target, 1)
        self.slots, self.size = _hom_slots(self.P, self.target, 0)
        Z = kernel_basis(self.D0)
        keep = column_space_complement(self.D1, Z)
        self.H = Matrix._wrap(Z.array[:, keep], X.p)
        self._coord_system = hstack([self.D1, self.H], rows=self.size, p=X.p)

    @property
    def dim(self) -> int:
        return self.H.cols

    def from_vector(self, vec: Matrix) -> ChainMap:
        P, T = self.P, self.target
        comps = {}
        by_degree: dict[int, list[Matrix]] = {}
        for m, i, v, off, size in self.slots:
            by_degree.setdefault(m, []).append(Matrix._wrap(vec.array[off:off + size], vec.p))
        for m, images in by_degree.items():
            comps[m] = map_from_free(P.term(m), T.term(m), images)
        return ChainMap(P, T, comps, check=False)

    def to_vector(self, g: ChainMap) -> Matrix:
        """Generator data of ``g: resolve(X) -> Y[n]``."""
        out = np.zeros((self.size, 1), dtype=np.int64)
        images = {m: free_images(g.comp(m)) for m in self.P.degrees}
        for m, i, v, off, size in self.slots:
            if size:
                out[off:off + size] = images[m][i].array
        return Matrix._wrap(out, self.X.p)

    @cached_property
    def basis(self) -> list[ChainMap]:
        return [self.from_vector(Matrix._wrap(self.H.array[:, c:c + 1], self.X.p))
                for c in range(self.dim)]

    def element(self, coeffs: Sequence[int]) -> ChainMap:
        vec = self.H @ Matrix(np.array(coeffs, dtype=np.int64).reshape(-1, 1), self.X.p)
        return self.from_vector(vec)

    def _as_resolved(self, g: ChainMap, resolved: bool) -> ChainMap:
        if resolved:
            return g
        if g.source != self.X or g.target != self.target:
            raise ValueError("map does not belong to this hom space")
        return g @ self.eps

    def coordinates(self, g: ChainMap, resolved: bool = True) -> tuple[int, ...]:
        """Coordinates of the class of ``g`` in ``basis``.

        With ``resolved=False`` ``g`` is a chain map ``X -> Y[n]`` and is
        precomposed with the augmentation first.
        """
        g = self._as_resolved(g, resolved)
        vec = self.to_vector(g)
        x = solve_linear(self._coord_system, vec)
        if x is None:
            raise ValueError("map is not a chain map out of the resolution")
        return tuple(int(c) for c in x.array[self.D1.cols:, 0])

    def is_null(self, g: ChainMap, resolved: bool = True) -> bool:
        return not any(self.coordinates(g, resolved))

    def homotopy_for(self, g: ChainMap, resolved: bool = True) -> Homotopy | None:
        """Some ``h`` with ``g = d h + h d``, or ``None`` if ``g`` is not null."""
        g = self._as_resolved(g, resolved)
        x = solve_linear(self.D1, self.to_vector(g))
        if x is None:
            return None
        slots1, _ = _hom_slots(self.P, self.target, 1)
        by_degree: dict[int, list[Matrix]] = {}
        for m, i, v, off, size in slots1:
            by_degree.setdefault(m, []).append(Matrix._wrap(x.array[off:off + size], x.p))
        comps = {m: map_from_free(self.P.term(m), self.target.term(m + 1), imgs)
                 for m, imgs in by_degree.items()}
        return Homotopy(self.P, self.target, comps)


def hom_homotopy_basis(X: Complex, Y: Complex, n: int = 0) -> tuple[int, list[ChainMap]]:
    hs = HomSpace(X, Y, n)
    return hs.dim, hs.basis


def hom_dim(X: Complex, Y: Complex, n: int = 0) -> int:
    return HomSpace(X, Y, n).dim


def postcomposition_matrix(src: HomSpace, dst: HomSpace, g: ChainMap) -> Matrix:
    """Matrix of ``u -> g u`` from ``src = Hom_D(X, A)`` to ``dst = Hom_D(X, B)`` for ``g: A -> B``."""
    shifted = shift_map(g, src.n, source=src.target, target=dst.target)
    cols = [Matrix(list(dst.coordinates(shifted @ b)), src.X.p, shape=(dst.dim, 1)) for b in src.basis]
    return hstack(cols, rows=dst.dim, p=src.X.p)


def precomposition_matrix(src: HomSpace, dst: HomSpace, f: ChainMap) -> Matrix:
    """Matrix of ``u -> u f`` from ``src = Hom_D(Y, E)`` to ``dst = Hom_D(X, E)`` for ``f: X -> Y``."""
    lifted = resolve_map(f)
    cols = [Matrix(list(dst.coordinates(b @ lifted)), src.X.p, shape=(dst.dim, 1)) for b in src.basis]
    return hstack(cols, rows=dst.dim, p=src.X.p)


# --- equivalences ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Equivalence:
    """A roof ``X <--resolution-- P --map--> Y`` of quasi-isomorphisms."""

    resolution: ChainMap
    map: ChainMap

    @property
    def source(self) -> Complex:
        return self.resolution.target

    @property
    def target(self) -> Complex:
        return self.map.target


def _homology_blocks(g: ChainMap, degrees: list[int]) -> list[np.ndarray]:
    """Flattened homology maps of ``g``, one vector per degree."""
    out = []
    for n in degrees:
        h = homology_map(g, n)
        out.append(np.concatenate([c.array.ravel() for c in h.comps] + [np.zeros(0, np.int64)]))
    return out


def _is_iso_vector(vec: np.ndarray, dims: tuple[int, ...], p: int) -> bool:
    off = 0
    for d in dims:
        if d:
            block = Matrix._wrap(vec[off:off + d * d].reshape(d, d) % p, p)
            if rank(block) != d:
                return False
        off += d * d
    return True


def find_equivalence(X: Complex, Y: Complex, cap: int = EQUIVALENCE_SEARCH_CAP) -> Equivalence | None:
    """Search ``Hom_D(X, Y)`` for an isomorphism.

    The homology functor ``Hom_D(X, Y) -> prod_n Hom(H_n X, H_n Y)`` is
    onto for complexes over a path algebra, so the search runs one degree at
    a time over the image of that map and the per-degree choices are then
    glued by a linear solve.  Returns ``None`` when no isomorphism exists,
    raises :class:`Undecided` when a single degree has more than ``cap``
    candidates.
    """
    if X.quiver != Y.quiver or X.p != Y.p:
        raise QuiverMismatch("complexes live on different quivers")
    if X.homology_dims != Y.homology_dims:
        return None
    P, eps = resolve(X)
    if X == Y:
        return Equivalence(eps, eps)
    hs = HomSpace(X, Y, 0)
    p = X.p
    degrees = sorted(X.homology_dims)
    if not degrees:
        return Equivalence(eps, ChainMap(P, Y, {}, check=False))
    cols = [_homology_blocks(b, degrees) for b in hs.basis]
    chosen = []
    for k, n in enumerate(degrees):
        size = sum(d * d for d in X.homology_dims[n])
        Phi = np.array([c[k] for c in cols], dtype=np.int64).T.reshape(size, len(cols)) % p
        _, r, piv = rref_with_pivots(Matrix._wrap(Phi, p))
        if p ** r > cap:
            raise Undecided(f"{p}^{r} candidate homology maps in degree {n} exceed the search cap {cap}")
        image = Phi[:, piv]
        found = None
        for coeffs in itertools.product(range(p), repeat=r):
            vec = image @ np.array(coeffs, dtype=np.int64) if r else np.zeros(size, np.int64)
            if _is_iso_vector(vec % p, X.homology_dims[n], p):
                found = vec % p
                break
        if found is None:
            return None
        chosen.append(found)
    Phi_all = np.array([np.concatenate(c) for c in cols], dtype=np.int64).T
    Phi_all = Phi_all.reshape(-1, len(cols)) % p
    target = np.concatenate(chosen).reshape(-1, 1)
    sol = solve_linear(Matrix._wrap(Phi_all, p), Matrix._wrap(target, p))
    if sol is None:
        raise Undecided("homology maps could not be realised simultaneously")
    g = hs.element(tuple(int(c) for c in sol.array[:, 0]))
    return Equivalence(eps, ChainMap(P, Y, g.comps, check=False))


def are_equivalent(X: Complex, Y: Complex, cap: int = EQUIVALENCE_SEARCH_CAP) -> bool:
    return find_equivalence(X, Y, cap) is not None


# --- strict chain maps ---------------------------------------------------------------------

def chain_map_basis(X: Complex, Y: Complex) -> list[ChainMap]:
    """Basis of the space of (strict) chain maps ``X -> Y``."""
    q, p = X.quiver, X.p
    degs = [n for n in X.degrees if n in Y.terms]
    layout, off = {}, 0
    for n in degs:
        for v in range(q.vertex_count):
            size = Y.term(n).dims[v] * X.term(n).dims[v]
            layout[(n, v)] = (off, size)
            off += size
    rows = []

    def block(n, v, mat):
        row = np.zeros((mat.shape[0], off), dtype=np.int64)
        o, s = layout[(n, v)]
        row[:, o:o + s] = mat
        return row

    for n in degs:
        Xn, Yn = X.term(n), Y.term(n)
        for k, (s, t) in enumerate(q.edges):
            if Yn.dims[t] * Xn.dims[s] == 0:
                continue
            a = kron(Matrix.identity(Yn.dims[t], p), Xn.maps[k].T).array
            b = kron(Yn.maps[k], Matrix.identity(Xn.dims[s], p)).array
            rows.append(block(n, t, a) - block(n, s, b))
    for n in set(degs) | {m + 1 for m in degs}:
        # d^Y_n f_n - f_{n-1} d^X_n = 0, vectorised row-major
        for v in range(q.vertex_count):
            r, c = Y.term(n - 1).dims[v], X.term(n).dims[v]
            if r * c == 0:
                continue
            eq = np.zeros((r * c, off), dtype=np.int64)
            if (n, v) in layout:
                o, s = layout[(n, v)]
                eq[:, o:o + s] += kron(Y.diff(n).comps[v], Matrix.identity(c, p)).array
            if (n - 1, v) in layout:
                o, s = layout[(n - 1, v)]
                eq[:, o:o + s] -= kron(Matrix.identity(r, p), X.diff(n).comps[v].T).array
            rows.append(eq)
    system = Matrix._wrap(np.vstack(rows) % p, p) if rows else Matrix.zeros(0, off, p)
    K = kernel_basis(system)
    out = []
    for c in range(K.cols):
        col = K.array[:, c]
        comps = {}
        for n in degs:
            mats = []
            for v in range(q.vertex_count):
                o, s = layout[(n, v)]
                mats.append(Matrix._wrap(col[o:o + s].reshape(Y.term(n).dims[v], X.term(n).dims[v]), p))
            comps[n] = RepMap.unchecked(X.term(n), Y.term(n), mats)
        out.append(ChainMap(X, Y, comps, check=False))
    return out


def shifted_homology_sum(X: Complex) -> Complex:
    """``sum_n H_n(X)[n]``: the split form every complex is equivalent to."""
    parts = [concentrated(homology_at(X, n), n) for n in sorted(X.homology_dims)]
    if not parts:
        return zero_complex(X.quiver, X.p)
    return direct_sum_complex(parts)
