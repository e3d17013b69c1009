"""The heart ``C_{[0,1)}`` of the standard t-structure as an abelian category.

Kernels and cokernels are computed inside the ambient stable category:
``ker f = tau_{>=0} fib(f)`` and ``coker f = tau_{<1} cofib(f)``.  Image and
coimage are ``ker(c_f)`` and ``coker(k_f)``; both are compared with the
object ``Z_f``, the pushout of ``X <- fib(f) -> coker(f)[-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .complexes import (
    ChainMap,
    Complex,
    Equivalence,
    HomSpace,
    concentrated,
    cone_and_fiber,
    find_equivalence,
    homology_map,
    postcomposition_matrix,
    pushout,
    shift_map,
)
from .exactlin import Matrix, rank, solve_linear
from .quiverrep import kernel_cokernel_rep
from .tstruct import Tower, Window, homology_window, initial_map, truncate, z_postnikov_tower

HEART = Window(0, 1)


class NotInHeart(ValueError):
    pass


def is_heart_object(X: Complex) -> bool:
    return HEART.contains(X)


def heart_kernel(f: ChainMap) -> tuple[Complex, ChainMap]:
    tri = cone_and_fiber(f)
    t = truncate(tri.fiber, 0)
    return t.tau_geq, tri.fiber_map @ t.incl


def heart_cokernel(f: ChainMap) -> tuple[Complex, ChainMap]:
    tri = cone_and_fiber(f)
    t = truncate(tri.cone, 1)
    return t.tau_lt, t.proj @ tri.incl


@dataclass(eq=False)
class HeartAnalysis:
    f: ChainMap
    ker: Complex
    k_f: ChainMap
    coker: Complex
    c_f: ChainMap
    im: Complex
    coim: Complex
    Z_f: Complex

    @cached_property
    def witness_im_coim(self) -> Equivalence | None:
        return find_equivalence(self.coim, self.im)

    @cached_property
    def witness_zf_im(self) -> Equivalence | None:
        return find_equivalence(self.Z_f, self.im)

    @cached_property
    def witness_zf_coim(self) -> Equivalence | None:
        return find_equivalence(self.Z_f, self.coim)

    def objects(self) -> dict[str, Complex]:
        return {"ker": self.ker, "coker": self.coker, "im": self.im,
                "coim": self.coim, "Z_f": self.Z_f}

    def all_in_heart(self) -> bool:
        return all(is_heart_object(X) for X in self.objects().values())

    def matches_rep_oracle(self) -> bool:
        """``ker``/``coker`` agree with the kernel and cokernel of ``H_0(f)``."""
        h0 = homology_map(self.f, 0)
        K, _, C, _ = kernel_cokernel_rep(h0)
        return (find_equivalence(self.ker, concentrated(K, 0)) is not None
                and find_equivalence(self.coker, concentrated(C, 0)) is not None)

    def is_abelian_witnessed(self) -> bool:
        return (self.all_in_heart() and self.witness_im_coim is not None
                and self.witness_zf_im is not None)


def heart_analysis(f: ChainMap) -> HeartAnalysis:
    X, Y = f.source, f.target
    if not is_heart_object(X):
        raise NotInHeart(f"source has homology in degrees {sorted(X.homology_dims)}")
    if not is_heart_object(Y):
        raise NotInHeart(f"target has homology in degrees {sorted(Y.homology_dims)}")
    tri = cone_and_fiber(f)
    K, k_f = heart_kernel(f)
    C, c_f = heart_cokernel(f)
    im, _ = heart_kernel(c_f)
    coim, _ = heart_cokernel(k_f)
    # Z_f: pushout of X <- fib(f) -> coker(f)[-1]
    to_coker_shifted = shift_map(truncate(tri.cone, 1).proj, -1, source=tri.fiber)
    Z_f = pushout(tri.fiber_map, to_coker_shifted).P
    return HeartAnalysis(f, K, k_f, C, c_f, im, coim, Z_f)


def hom_discreteness_report(X: Complex, Y: Complex, ns: Sequence[int] = (0, 1, 2)) -> dict[int, int]:
    """``n -> dim Hom_D(X, Y[-n])``."""
    return {n: HomSpace(X, Y, -n).dim for n in ns}


def is_hom_discrete(X: Complex, Y: Complex, ns: Sequence[int] = (1, 2)) -> bool:
    return all(d == 0 for d in hom_discreteness_report(X, Y, ns).values())


@dataclass(frozen=True)
class Factorization:
    probe: ChainMap
    coordinates: tuple[int, ...] | None
    unique: bool

    @property
    def exists(self) -> bool:
        return self.coordinates is not None


def factor_through_kernel(analysis: HeartAnalysis, probe: ChainMap) -> Factorization:
    """Solve ``k_f u = probe`` in ``Hom_D(K, ker f)``."""
    K = probe.source
    if probe.target != analysis.f.source:
        raise ValueError("probe must land in the source of f")
    if not is_heart_object(K):
        raise NotInHeart("probe source is not a heart object")
    comp = analysis.f @ probe
    if not HomSpace(K, comp.target, 0).is_null(comp, resolved=False):
        raise ValueError("probe does not compose to zero with f")
    src = HomSpace(K, analysis.ker, 0)
    dst = HomSpace(K, analysis.f.source, 0)
    M = postcomposition_matrix(src, dst, analysis.k_f)
    target = Matrix(list(dst.coordinates(probe, resolved=False)), K.p, shape=(dst.dim, 1))
    sol = solve_linear(M, target)
    unique = rank(M) == M.cols
    if sol is None:
        return Factorization(probe, None, unique)
    return Factorization(probe, tuple(int(c) for c in sol.array[:, 0]), unique)


def universal_property_check(analysis: HeartAnalysis, probes: Sequence[ChainMap]) -> bool:
    """Every probe ``K -> X`` killed by ``f`` factors uniquely through ``k_f``."""
    for g in probes:
        fac = factor_through_kernel(analysis, g)
        if not (fac.exists and fac.unique):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Reconstruction:
    in_geq0: bool
    in_lt0: bool
    a_length: int
    window: Window | None
    levels: tuple[int, ...]
    tower: Tower

    def __iter__(self):
        return iter((self.in_geq0, self.in_lt0, self.a_length))


def reconstruct_tstructure_from_heart(X: Complex) -> Reconstruction:
    """Read membership in ``C_{>=0}``/``C_{<0}`` off the heart-weaved tower of ``0 -> X``.

    Every nonzero cofiber of the Z-indexed tower sits in a single shifted
    copy of the heart; the object is in the aisle iff no such cofiber lives
    at a negative level, in the co-aisle iff none lives at a level ``>= 0``.
    """
    tower = z_postnikov_tower(initial_map(X))
    levels = tuple(tower.levels)
    for w, c in zip(tower.windows, tower.cofibers):
        if not c.is_acyclic() and not (w.hi - w.lo == 1 and w.contains(c)):
            raise AssertionError(f"cofiber in window {w} is not a shifted heart object")
    in_geq0 = all(j >= 0 for j in levels)
    in_lt0 = all(j < 0 for j in levels)
    a_length = (max(levels) - min(levels) + 1) if levels else 0
    return Reconstruction(in_geq0, in_lt0, a_length, homology_window(X), levels, tower)
