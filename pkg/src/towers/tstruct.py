"""The standard t-structure on complexes and the towers it produces.

``C_{>=n}`` holds complexes with homology in degrees ``>= n`` and ``C_{<n}``
those with homology in degrees ``< n``.  Truncations are the smart ones:
``tau_{>=n} X`` replaces ``X_n`` by ``ker d_n`` and ``tau_{<n} X`` replaces
``X_{n-1}`` by ``X_{n-1} / im d_n``.

Membership of a general map in ``E_n`` / ``M_n`` is read off its
reflective factorization

    X --e--> Z = Y x_{tau_{<n} Y} tau_{<n} X --m--> Y

with ``f`` in ``E_n`` iff ``m`` is an equivalence and in ``M_n`` iff ``e`` is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Protocol, Sequence

from .complexes import (
    ChainMap,
    Complex,
    HomSpace,
    Homotopy,
    TriangleWitness,
    column_map,
    cone,
    cone_and_fiber,
    find_equivalence,
    identity_chain,
    induced_cone_map,
    induced_fiber_map,
    is_quasi_iso,
    map_into_fiber,
    map_out_of_cone,
    pullout,
    pushout,
    row_map,
    sum_map,
    zero_chain,
    zero_complex,
)
from .exactlin import left_inverse, right_inverse
from .quiverrep import RepMap, block_map, identity_map, kernel_cokernel_rep

Bound = int | float


@dataclass(frozen=True)
class Window:
    """Half-open range ``[lo, hi)`` of degrees; ends may be infinite."""

    lo: Bound = -math.inf
    hi: Bound = math.inf

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"window [{self.lo}, {self.hi}) has lo > hi")

    def admits(self, n: int) -> bool:
        return self.lo <= n < self.hi

    def contains(self, X: Complex) -> bool:
        return all(self.admits(n) for n in X.homology_dims)

    def __str__(self) -> str:
        lo = "-inf" if self.lo == -math.inf else str(self.lo)
        hi = "+inf" if self.hi == math.inf else str(self.hi)
        return f"[{lo}, {hi})"


def window_membership(X: Complex, w: Window) -> bool:
    return w.contains(X)


def in_geq(X: Complex, n: int) -> bool:
    return Window(n, math.inf).contains(X)


def in_lt(X: Complex, n: int) -> bool:
    return Window(-math.inf, n).contains(X)


def homology_window(X: Complex) -> Window | None:
    """Tightest ``[k_min, k_max)`` containing the homology, ``None`` for acyclic ``X``."""
    sup = X.homology_support()
    if sup is None:
        return None
    return Window(sup[0], sup[1] + 1)


@dataclass(frozen=True)
class TChain:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if not idx:
            raise ValueError("a chain needs at least one index")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, *indices: int) -> "TChain":
        return cls(tuple(indices))

    def shifted(self, k: int) -> "TChain":
        return TChain(tuple(i + k for i in self.indices))

    def windows(self) -> list[Window]:
        """Cofiber windows of ``f_{k+1}, ..., f_1``: ``[i_k, inf), ..., [-inf, i_1)``."""
        ext = (-math.inf,) + self.indices + (math.inf,)
        return [Window(ext[j - 1], ext[j]) for j in range(len(ext) - 1, 0, -1)]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


# --- truncations ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Truncation:
    source: Complex
    n: int
    tau_geq: Complex
    incl: ChainMap
    tau_lt: Complex
    proj: ChainMap

    def __iter__(self):
        return iter((self.tau_geq, self.incl, self.tau_lt, self.proj))

    @cached_property
    def comparison(self) -> ChainMap:
        """``cone(incl) -> tau_lt``, ``(x, y) -> proj y``."""
        tri = cone_and_fiber(self.incl)
        return map_out_of_cone(tri, self.proj)

    def certified(self) -> bool:
        """The triangle ``tau_geq -> X -> tau_lt`` is distinguished and supports split."""
        X, n = self.source, self.n
        hx = X.homology_dims
        if self.tau_geq.homology_dims != {k: d for k, d in hx.items() if k >= n}:
            return False
        if self.tau_lt.homology_dims != {k: d for k, d in hx.items() if k < n}:
            return False
        if not (self.proj @ self.incl).is_zero():
            return False
        return is_quasi_iso(self.comparison)


def _truncation_cache(X: Complex) -> dict:
    return X.__dict__.setdefault("_truncations", {})


def truncate(X: Complex, n: int) -> Truncation:
    cache = _truncation_cache(X)
    if n in cache:
        return cache[n]
    q, p = X.quiver, X.p
    # tau_{>=n}
    K, Kincl, _, _ = kernel_cokernel_rep(X.diff(n))
    ge_terms = {m: X.term(m) for m in X.degrees if m > n}
    ge_terms[n] = K
    ge_diffs = {m: X.diff(m) for m in X.degrees if m > n + 1}
    Kl = [left_inverse(c) for c in Kincl.comps]
    d = X.diff(n + 1)
    ge_diffs[n + 1] = RepMap.unchecked(X.term(n + 1), K, [Kl[v] @ d.comps[v] for v in range(q.vertex_count)])
    tau_geq = Complex(q, ge_terms, ge_diffs, p, check=False)
    incl_comps = {m: identity_map(X.term(m)) for m in X.degrees if m > n}
    incl_comps[n] = Kincl
    incl = ChainMap(tau_geq, X, incl_comps, check=False)
    # tau_{<n}
    _, _, C, Cproj = kernel_cokernel_rep(X.diff(n))
    lt_terms = {m: X.term(m) for m in X.degrees if m < n - 1}
    lt_terms[n - 1] = C
    lt_diffs = {m: X.diff(m) for m in X.degrees if m < n - 1}
    Sr = [right_inverse(c) for c in Cproj.comps]
    d = X.diff(n - 1)
    lt_diffs[n - 1] = RepMap.unchecked(C, X.term(n - 2), [d.comps[v] @ Sr[v] for v in range(q.vertex_count)])
    tau_lt = Complex(q, lt_terms, lt_diffs, p, check=False)
    proj_comps = {m: identity_map(X.term(m)) for m in X.degrees if m < n - 1}
    proj_comps[n - 1] = Cproj
    proj = ChainMap(X, tau_lt, proj_comps, check=False)
    out = Truncation(X, n, tau_geq, incl, tau_lt, proj)
    cache[n] = out
    return out


def tau_geq(X: Complex, n: int) -> Complex:
    return truncate(X, n).tau_geq


def tau_lt(X: Complex, n: int) -> Complex:
    return truncate(X, n).tau_lt


def truncate_map(f: ChainMap, n: int) -> tuple[ChainMap, ChainMap]:
    """``(tau_{>=n} f, tau_{<n} f)``; both commute strictly with ``incl`` and ``proj``."""
    tx, ty = truncate(f.source, n), truncate(f.target, n)
    q = f.source.quiver
    ge = {m: f.comp(m) for m in tx.tau_geq.degrees if m > n}
    L = [left_inverse(c) for c in ty.incl.comp(n).comps]
    Kx = tx.incl.comp(n).comps
    ge[n] = RepMap.unchecked(tx.tau_geq.term(n), ty.tau_geq.term(n),
                             [L[v] @ f.comp(n).comps[v] @ Kx[v] for v in range(q.vertex_count)])
    lt = {m: f.comp(m) for m in tx.tau_lt.degrees if m < n - 1}
    Qy = ty.proj.comp(n - 1).comps
    S = [right_inverse(c) for c in tx.proj.comp(n - 1).comps]
    lt[n - 1] = RepMap.unchecked(tx.tau_lt.term(n - 1), ty.tau_lt.term(n - 1),
                                 [Qy[v] @ f.comp(n - 1).comps[v] @ S[v] for v in range(q.vertex_count)])
    return (ChainMap(tx.tau_geq, ty.tau_geq, ge, check=False),
            ChainMap(tx.tau_lt, ty.tau_lt, lt, check=False))


def geq_inclusion(X: Complex, a: int, b: int) -> ChainMap:
    """``tau_{>=a} X -> tau_{>=b} X`` for ``a >= b`` (a subcomplex inclusion)."""
    if a < b:
        raise ValueError("inclusion needs a >= b")
    A, B = tau_geq(X, a), tau_geq(X, b)
    if a == b:
        return identity_chain(A)
    comps = {m: identity_map(A.term(m)) for m in A.degrees if m > a}
    comps[a] = truncate(X, a).incl.comp(a)
    return ChainMap(A, B, comps, check=False)


def lt_projection(X: Complex, a: int, b: int) -> ChainMap:
    """``tau_{<a} X -> tau_{<b} X`` for ``a >= b`` (a quotient map)."""
    if a < b:
        raise ValueError("projection needs a >= b")
    A, B = tau_lt(X, a), tau_lt(X, b)
    if a == b:
        return identity_chain(A)
    comps = {m: identity_map(A.term(m)) for m in B.degrees if m < b - 1}
    comps[b - 1] = truncate(X, b).proj.comp(b - 1)
    return ChainMap(A, B, comps, check=False)


# --- factorizations -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FactorizationPair:
    f: ChainMap
    level: int
    Z: Complex
    e: ChainMap
    m: ChainMap

    @cached_property
    def e_is_equivalence(self) -> bool:
        return is_quasi_iso(self.e)

    @cached_property
    def m_is_equivalence(self) -> bool:
        return is_quasi_iso(self.m)

    @property
    def f_in_E(self) -> bool:
        return self.m_is_equivalence

    @property
    def f_in_M(self) -> bool:
        return self.e_is_equivalence

    def composite_is_f(self) -> bool:
        return self.m @ self.e == self.f


def em_factorization(f: ChainMap, n: int) -> FactorizationPair:
    X, Y = f.source, f.target
    tx, ty = truncate(X, n), truncate(Y, n)
    _, lt_f = truncate_map(f, n)
    po = pullout(ty.proj, lt_f)
    e = map_into_fiber(po.triangle, column_map([f, tx.proj], target=po.sum))
    return FactorizationPair(f, n, po.P, e, po.to_x)


def in_E(f: ChainMap, n: int) -> bool:
    return em_factorization(f, n).f_in_E


def in_M(f: ChainMap, n: int) -> bool:
    return em_factorization(f, n).f_in_M


def initial_map(X: Complex) -> ChainMap:
    return zero_chain(zero_complex(X.quiver, X.p), X)


def terminal_map(X: Complex) -> ChainMap:
    return zero_chain(X, zero_complex(X.quiver, X.p))


@dataclass(frozen=True)
class SatorReport:
    initial_E: bool
    terminal_E: bool
    initial_M: bool
    terminal_M: bool

    @property
    def holds(self) -> bool:
        return self.initial_E == self.terminal_E and self.initial_M == self.terminal_M


def sator_report(X: Complex, n: int) -> SatorReport:
    a = em_factorization(initial_map(X), n)
    b = em_factorization(terminal_map(X), n)
    return SatorReport(a.f_in_E, b.f_in_E, a.f_in_M, b.f_in_M)


def sator_check(X: Complex, n: int) -> bool:
    return sator_report(X, n).holds


# --- towers ----------------------------------------------------------------------------

class Membership(Protocol):
    def contains(self, X: Complex) -> bool: ...


@dataclass(eq=False)
class Tower:
    """Factorization ``X --f_{k+1}--> Z_{i_k} --> ... --> Z_{i_1} --f_1--> Y`` of ``base``.

    ``stages``, ``maps`` and ``windows`` run from the source towards the
    target; ``windows[j]`` is where ``cofib(maps[j])`` must live.
    """

    base: ChainMap
    stages: list[Complex]
    maps: list[ChainMap]
    windows: list
    labels: list[str] = field(default_factory=list)
    chain: TChain | None = None
    n0: int | None = None
    k0: int | None = None
    levels: list[int] = field(default_factory=list)
    kind: str = ""

    @property
    def objects(self) -> list[Complex]:
        return [self.base.source] + list(self.stages) + [self.base.target]

    @cached_property
    def cofibers(self) -> list[Complex]:
        return [cone(g) for g in self.maps]

    @cached_property
    def window_checks(self) -> list[bool]:
        return [w.contains(c) for w, c in zip(self.windows, self.cofibers)]

    def composite(self) -> ChainMap:
        g = self.maps[0]
        for h in self.maps[1:]:
            g = h @ g
        return g

    @cached_property
    def composite_ok(self) -> bool:
        diff = self.composite() - self.base
        if diff.is_zero():
            return True
        return HomSpace(diff.source, diff.target, 0).is_null(diff, resolved=False)

    @property
    def certified(self) -> bool:
        return all(self.window_checks) and self.composite_ok

    def nontrivial(self) -> list[int]:
        """Positions of maps with non-acyclic cofiber."""
        return [j for j, c in enumerate(self.cofibers) if not c.is_acyclic()]


def _kfold_truncate(Y: Complex, chain: TChain) -> Tower:
    idx = list(reversed(chain.indices))     # i_k, ..., i_1
    stages = [tau_geq(Y, i) for i in idx]
    maps = [initial_map(stages[0])]
    for a, b in zip(idx, idx[1:]):
        maps.append(geq_inclusion(Y, a, b))
    maps.append(truncate(Y, idx[-1]).incl)
    labels = [f"tau_{{>={i}}}" for i in idx]
    return Tower(initial_map(Y), stages, maps, chain.windows(), labels, chain, kind="kfold")


def _kfold_induction(Y: Complex, chain: TChain) -> Tower:
    """Iterate the reflective factorization: factor ``0 -> Y`` at ``i_1``, its source leg at ``i_2``, ..."""
    stages_rev, maps_rev = [], []
    target = Y
    for i in chain.indices:
        fp = em_factorization(initial_map(target), i)
        stages_rev.append(fp.Z)
        maps_rev.append(fp.m)
        target = fp.Z
    stages = list(reversed(stages_rev))
    maps = [initial_map(stages[0])] + list(reversed(maps_rev))
    labels = [f"Z_{i}" for i in reversed(chain.indices)]
    return Tower(initial_map(Y), stages, maps, chain.windows(), labels, chain, kind="kfold-induction")


def kfold_factorization(Y: Complex, chain: TChain, method: str = "truncate") -> Tower:
    if method == "truncate":
        return _kfold_truncate(Y, chain)
    if method == "induction":
        return _kfold_induction(Y, chain)
    raise ValueError(f"unknown method {method!r}")


def postnikov_tower(f: ChainMap, chain: TChain) -> Tower:
    """Pull the k-fold factorization of ``0 -> cofib(f)`` back along ``Y -> cofib(f)``."""
    X, Y = f.source, f.target
    tri = cone_and_fiber(f)
    C, q = tri.cone, tri.incl
    kf = _kfold_truncate(C, chain)
    psis = []
    for i in reversed(chain.indices):
        psis.append(truncate(C, i).incl)
    pulls = [pullout(q, psi) for psi in psis]
    stages = [po.P for po in pulls]
    # head map x -> (f x, 0; (-x, 0))
    first = pulls[0]
    h = column_map([f, zero_chain(X, psis[0].source)], target=first.sum)
    s_comps = {n: _negated_source_inclusion(tri, n) for n in X.degrees}
    head = map_into_fiber(first.triangle, h, Homotopy(X, C, s_comps))
    maps = [head]
    for j in range(1, len(pulls)):
        a, b = pulls[j - 1], pulls[j]
        alpha = sum_map([identity_chain(Y), kf.maps[j]], source=a.sum, target=b.sum)
        maps.append(induced_fiber_map(a.triangle, b.triangle, alpha, identity_chain(C)))
    maps.append(pulls[-1].to_x)
    labels = [f"Z_{i}" for i in reversed(chain.indices)]
    return Tower(f, stages, maps, chain.windows(), labels, chain, kind="postnikov")


def _negated_source_inclusion(tri: TriangleWitness, n: int) -> RepMap:
    """``X_n -> cone_{n+1} = X_n + Y_{n+1}``, ``x -> (-x, 0)``."""
    X, Y = tri.f.source, tri.f.target
    return block_map([X.term(n)], [X.term(n), Y.term(n + 1)],
                     [[-identity_map(X.term(n))], [None]],
                     source=X.term(n), target=tri.cone.term(n + 1))


def postnikov_tower_dual(f: ChainMap, chain: TChain) -> Tower:
    """The same tower built by pushouts along ``fib(f) -> X``.

    ``Z'_i = X +_{fib f} tau_{<i-1} fib(f)``; used to cross-check uniqueness.
    """
    X, Y = f.source, f.target
    tri = cone_and_fiber(f)
    F, k = tri.fiber, tri.fiber_map
    idx = list(reversed(chain.indices))
    truncs = [truncate(F, i - 1) for i in idx]
    pushes = [pushout(k, t.proj) for t in truncs]
    stages = [po.P for po in pushes]
    maps = [pushes[0].from_x]
    for j in range(1, len(pushes)):
        a, b = pushes[j - 1], pushes[j]
        gamma = sum_map([identity_chain(X), lt_projection(F, idx[j - 1] - 1, idx[j] - 1)],
                        source=a.sum, target=b.sum)
        maps.append(induced_cone_map(a.triangle, b.triangle, identity_chain(F), gamma))
    last = pushes[-1]
    g = row_map([f, zero_chain(truncs[-1].tau_lt, Y)], source=last.sum)
    t_comps = {}
    for n in F.degrees:
        # fib_n = X_n + Y_{n+1} -> Y_{n+1}, (a, c) -> -c
        t_comps[n] = block_map([X.term(n), Y.term(n + 1)], [Y.term(n + 1)],
                               [[None, -identity_map(Y.term(n + 1))]],
                               source=F.term(n), target=Y.term(n + 1))
    maps.append(map_out_of_cone(last.triangle, g, Homotopy(F, Y, t_comps)))
    labels = [f"Z'_{i}" for i in idx]
    return Tower(f, stages, maps, chain.windows(), labels, chain, kind="postnikov-dual")


def stagewise_equivalent(a: Tower, b: Tower) -> bool:
    """Every pair of corresponding stages is quasi-isomorphic (may raise ``Undecided``)."""
    if len(a.stages) != len(b.stages):
        return False
    return all(find_equivalence(x, y) is not None for x, y in zip(a.stages, b.stages))


def z_postnikov_tower(f: ChainMap) -> Tower:
    """Tower over consecutive integer levels covering the homology of ``cofib(f)``.

    The chain runs one level past the support on each side so that the
    head and tail maps are visibly equivalences.  ``n0`` is the lowest
    nontrivial level and ``k0`` the number of levels in the span.
    """
    C = cone(f)
    sup = C.homology_support()
    if sup is None:
        tower = postnikov_tower(f, TChain.of(0))
        tower.n0, tower.k0, tower.levels = 0, 0, []
        tower.kind = "z-postnikov"
        return tower
    lo, hi = sup
    chain = TChain(tuple(range(lo - 1, hi + 3)))
    tower = postnikov_tower(f, chain)
    levels = []
    for w, c in zip(tower.windows, tower.cofibers):
        if not c.is_acyclic():
            levels.append(int(w.lo))
    tower.levels = sorted(levels)
    tower.n0 = lo
    tower.k0 = hi - lo + 1
    tower.kind = "z-postnikov"
    return tower


# --- aisles as predicates ---------------------------------------------------------------

class Aisle(Protocol):
    """An aisle together with the two classes of its factorization system."""

    name: str

    def contains(self, X: Complex) -> bool: ...

    def is_E(self, f: ChainMap) -> bool: ...

    def is_M(self, f: ChainMap) -> bool: ...


@dataclass(frozen=True)
class StandardAisle:
    n: int = 0

    @property
    def name(self) -> str:
        return f"C_{{>={self.n}}}"

    def contains(self, X: Complex) -> bool:
        return in_geq(X, self.n)

    def is_E(self, f: ChainMap) -> bool:
        return in_E(f, self.n)

    def is_M(self, f: ChainMap) -> bool:
        return in_M(f, self.n)


@dataclass(frozen=True)
class TrivialAisle:
    """The whole category as aisle: every map is in ``E``, only equivalences in ``M``."""

    name: str = "everything"

    def contains(self, X: Complex) -> bool:
        return True

    def is_E(self, f: ChainMap) -> bool:
        return True

    def is_M(self, f: ChainMap) -> bool:
        return is_quasi_iso(f)
