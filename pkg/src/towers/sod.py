"""Semiorthogonal decompositions generated by exceptional collections.

A collection ``(E_1, ..., E_{k+1})`` is exceptional when each ``E_i`` has
one-dimensional endomorphisms and no self-extensions in other shifts, and
``Hom_D(E_j, E_i[n]) = 0`` for ``i < j``.  Every object ``Y`` then admits a
tower ``0 = Y_0 -> Y_1 -> ... -> Y_{k+1} = Y`` whose successive cofibers lie
in ``thick(E_{k+1}), ..., thick(E_1)``.  Cutting the collection after block
``j`` gives an aisle ``thick(E_{j+1}, ..., E_{k+1})`` with co-aisle
``thick(E_1, ..., E_j)``; these t-structures are fixed by the shift.

All "for every shift" statements are checked on the finite range of shifts
where a hereditary hom can be nonzero, widened by a margin of one degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .complexes import (
    ChainMap,
    Complex,
    HomSpace,
    column_map,
    cone,
    cone_and_fiber,
    direct_sum_complex,
    find_equivalence,
    identity_chain,
    induced_fiber_map,
    is_quasi_iso,
    postcomposition_matrix,
    precomposition_matrix,
    pullout,
    pushout,
    resolve,
    row_map,
    shift,
    shift_map,
    zero_chain,
    zero_complex,
)
from .exactlin import Matrix, rank, solve_linear
from .tstruct import Tower, initial_map

MARGIN = 1


class CertificateFailure(RuntimeError):
    """A post-hoc certificate of a weaved tower did not hold."""


def hom_shift_range(A: Complex, B: Complex, margin: int = MARGIN) -> range:
    """Shifts ``n`` for which ``Hom_D(A, B[n])`` can be nonzero, plus ``margin`` on each side.

    Over a hereditary algebra ``Hom_D(H_a[a], H_b[b][n]) = Ext^{b+n-a}``
    vanishes unless ``b + n - a`` is 0 or 1.
    """
    sa, sb = A.homology_support(), B.homology_support()
    if sa is None or sb is None:
        return range(0)
    return range(sa[0] - sb[1] - margin, sa[1] - sb[0] + 1 + margin + 1)


# --- exceptional collections -----------------------------------------------------------

@dataclass(eq=False)
class ExceptionalCollection:
    blocks: list[Complex]
    names: list[str]
    end_dims: dict[int, dict[int, int]] = field(default_factory=dict)
    orth_dims: dict[tuple[int, int], dict[int, int]] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    margin: int = MARGIN

    @property
    def verified(self) -> bool:
        return not self.failures

    def report_lines(self) -> list[str]:
        out = [f"shift margin: {self.margin}"]
        for i, dims in self.end_dims.items():
            nz = {n: d for n, d in dims.items() if d}
            out.append(f"End {self.names[i]}: nonzero Hom_D({self.names[i]}, {self.names[i]}[n]) = {nz}")
        for (j, i), dims in self.orth_dims.items():
            nz = {n: d for n, d in dims.items() if d}
            out.append(f"Hom_D({self.names[j]}, {self.names[i]}[n]) nonzero at {nz or 'none'}")
        out.extend(f"FAIL {msg}" for msg in self.failures)
        return out


def check_exceptional_collection(blocks: Sequence[Complex],
                                 names: Sequence[str] | None = None) -> ExceptionalCollection:
    names = list(names) if names is not None else [f"E{i + 1}" for i in range(len(blocks))]
    coll = ExceptionalCollection(list(blocks), names)
    for i, E in enumerate(blocks):
        dims = {n: HomSpace(E, E, n).dim for n in hom_shift_range(E, E)}
        coll.end_dims[i] = dims
        if E.is_acyclic():
            coll.failures.append(f"{names[i]} is the zero object")
            continue
        if dims.get(0) != 1:
            coll.failures.append(f"dim Hom_D({names[i]}, {names[i]}) = {dims.get(0)}, expected 1")
        for n, d in dims.items():
            if n != 0 and d:
                coll.failures.append(f"dim Hom_D({names[i]}, {names[i]}[{n}]) = {d}, expected 0")
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            Ej, Ei = blocks[j], blocks[i]
            dims = {n: HomSpace(Ej, Ei, n).dim for n in hom_shift_range(Ej, Ei)}
            coll.orth_dims[(j, i)] = dims
            for n, d in dims.items():
                if d:
                    coll.failures.append(
                        f"dim Hom_D({names[j]}, {names[i]}[{n}]) = {d}, expected 0")
    return coll


# --- thick subcategories of one exceptional object ----------------------------------------

@dataclass(frozen=True, eq=False)
class Evaluation:
    """``sum_n Hom_D(E[n], W) (x) E[n] -> W`` realised on the resolution of ``E``."""

    source: Complex
    map: ChainMap
    dims: dict[int, int]


def evaluation_map(E: Complex, W: Complex) -> Evaluation:
    parts, maps, dims = [], [], {}
    for m in hom_shift_range(E, W):
        n = -m                       # Hom_D(E[n], W) = Hom_D(E, W[-n])
        hs = HomSpace(E, W, m)
        dims[n] = hs.dim
        for b in hs.basis:
            Pn = shift(hs.P, n)
            parts.append(Pn)
            maps.append(shift_map(b, n, source=Pn, target=W))
    if not parts:
        Z = zero_complex(W.quiver, W.p)
        return Evaluation(Z, zero_chain(Z, W), dims)
    S = direct_sum_complex(parts)
    return Evaluation(S, row_map(maps, source=S), dims)


@dataclass(frozen=True, eq=False)
class Coevaluation:
    """``P(W) -> sum_n Hom_D(W, E[n])^* (x) E[n]`` out of the resolution of ``W``."""

    target: Complex
    map: ChainMap
    resolution: ChainMap
    dims: dict[int, int]


def coevaluation_map(W: Complex, E: Complex) -> Coevaluation:
    P, eps = resolve(W)
    parts, maps, dims = [], [], {}
    for n in hom_shift_range(W, E):
        hs = HomSpace(W, E, n)
        dims[n] = hs.dim
        for b in hs.basis:
            parts.append(hs.target)
            maps.append(b)
    if not parts:
        Z = zero_complex(W.quiver, W.p)
        return Coevaluation(Z, zero_chain(P, Z), eps, dims)
    T = direct_sum_complex(parts)
    return Coevaluation(T, column_map(maps, target=T), eps, dims)


def in_thick(W: Complex, E: Complex) -> bool:
    """``W`` lies in ``thick(E)`` iff the evaluation map onto it is a quasi-isomorphism."""
    if W.is_acyclic():
        return True
    return is_quasi_iso(evaluation_map(E, W).map)


@dataclass(frozen=True, eq=False)
class ThickMembership:
    E: Complex
    name: str

    def contains(self, X: Complex) -> bool:
        return in_thick(X, self.E)

    def __str__(self) -> str:
        return f"thick({self.name})"


# --- weaved towers ---------------------------------------------------------------------------

def _require_verified(coll: ExceptionalCollection) -> None:
    if not coll.verified:
        raise CertificateFailure("collection is not exceptional: " + "; ".join(coll.failures))


def weaved_tower(Y: Complex, coll: ExceptionalCollection, check: bool = True) -> Tower:
    """Peel off the blocks from last to first by evaluation cones.

    ``B_{k+1} = Y`` and ``B_{j-1} = cone(ev_j: E_j-part of B_j -> B_j)``;
    the stages are ``fib(Y -> B_j)``.  ``B_0`` must vanish.
    """
    _require_verified(coll)
    blocks = coll.blocks
    k1 = len(blocks)
    B = Y
    tris = []                # triangle of r_j: Y -> B_{j-1}, for j = k+1 .. 1
    qs = []                  # q_j: B_j -> B_{j-1}
    r = identity_chain(Y)
    for j in range(k1 - 1, -1, -1):
        ev = evaluation_map(blocks[j], B)
        tri = cone_and_fiber(ev.map)
        q = tri.incl
        r = q @ r
        qs.append(q)
        tris.append(cone_and_fiber(r))
        B = tri.cone
    if check and not B.is_acyclic():
        raise CertificateFailure("evaluation cones do not exhaust the object; the collection "
                                 "is not full or a block is not generated by one exceptional object")
    stages = [t.fiber for t in tris[:-1]]
    maps = [initial_map(stages[0])] if stages else []
    for a in range(1, len(stages)):
        maps.append(induced_fiber_map(tris[a - 1], tris[a], identity_chain(Y), qs[a]))
    if stages:
        maps.append(tris[-2].fiber_map)
    else:
        maps = [initial_map(Y)]
    windows = [ThickMembership(blocks[j], coll.names[j]) for j in range(k1 - 1, -1, -1)]
    labels = [f"Y_{m}" for m in range(1, k1)]
    tower = Tower(initial_map(Y), stages, maps, windows, labels, kind="weaved")
    if check and not all(tower.window_checks):
        bad = [str(w) for w, ok in zip(windows, tower.window_checks) if not ok]
        raise CertificateFailure(f"cofibers outside their blocks: {bad}")
    return tower


def weaved_tower_dual(Y: Complex, coll: ExceptionalCollection, check: bool = True) -> Tower:
    """Peel off the blocks from first to last by coevaluation fibers.

    ``C_0 = Y`` and ``C_j = fib(P(C_{j-1}) -> E_j-part)``; the stages are
    ``C_k, ..., C_1``.  ``C_{k+1}`` must vanish.
    """
    _require_verified(coll)
    blocks = coll.blocks
    k1 = len(blocks)
    C = Y
    chain_objs, down_maps = [], []       # C_j and C_j -> C_{j-1}
    for j in range(k1):
        co = coevaluation_map(C, blocks[j])
        tri = cone_and_fiber(co.map)
        down_maps.append(co.resolution @ tri.fiber_map)
        C = tri.fiber
        chain_objs.append(C)
    if check and not C.is_acyclic():
        raise CertificateFailure("coevaluation fibers do not exhaust the object")
    stages = list(reversed(chain_objs[:-1]))          # C_k, ..., C_1
    downs = list(reversed(down_maps[:-1]))            # C_k -> C_{k-1}, ..., C_1 -> Y
    if stages:
        maps = [initial_map(stages[0])] + downs
    else:
        maps = [initial_map(Y)]
    windows = [ThickMembership(blocks[j], coll.names[j]) for j in range(k1 - 1, -1, -1)]
    labels = [f"C_{m}" for m in range(k1 - 1, 0, -1)]
    tower = Tower(initial_map(Y), stages, maps, windows, labels, kind="weaved-dual")
    if check and not all(tower.window_checks):
        bad = [str(w) for w, ok in zip(windows, tower.window_checks) if not ok]
        raise CertificateFailure(f"cofibers outside their blocks: {bad}")
    return tower


def block_components(tower: Tower) -> list[Complex]:
    """Cofibers of a weaved tower indexed by block: ``out[j]`` lies in ``thick(E_{j+1})``."""
    return list(reversed(tower.cofibers))


# --- the associated family of aisles -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SodAisle:
    """Aisle ``thick(E_{cut+1}, ..., E_{k+1})`` with co-aisle ``thick(E_1, ..., E_cut)``."""

    coll: ExceptionalCollection
    cut: int

    @property
    def name(self) -> str:
        return "thick(" + ", ".join(self.coll.names[self.cut:]) + ")"

    @property
    def aisle_blocks(self) -> list[Complex]:
        return self.coll.blocks[self.cut:]

    @property
    def coaisle_blocks(self) -> list[Complex]:
        return self.coll.blocks[:self.cut]

    def contains(self, X: Complex) -> bool:
        comps = block_components(weaved_tower(X, self.coll))
        return all(c.is_acyclic() for c in comps[:self.cut])

    def contains_coaisle(self, X: Complex) -> bool:
        comps = block_components(weaved_tower(X, self.coll))
        return all(c.is_acyclic() for c in comps[self.cut:])

    def is_E(self, f: ChainMap) -> bool:
        """The co-aisle reflection inverts ``f``: ``Hom_D(-, E_i[n])`` sees it as an iso."""
        X, Y = f.source, f.target
        for E in self.coaisle_blocks:
            for n in sorted(set(hom_shift_range(X, E)) | set(hom_shift_range(Y, E))):
                src, dst = HomSpace(Y, E, n), HomSpace(X, E, n)
                if src.dim != dst.dim:
                    return False
                if src.dim and rank(precomposition_matrix(src, dst, f)) != src.dim:
                    return False
        return True

    def is_M(self, f: ChainMap) -> bool:
        """The aisle coreflection inverts ``f``: ``Hom_D(E_i[n], -)`` sees it as an iso."""
        X, Y = f.source, f.target
        for E in self.aisle_blocks:
            for m in sorted(set(hom_shift_range(E, X)) | set(hom_shift_range(E, Y))):
                src, dst = HomSpace(E, X, m), HomSpace(E, Y, m)
                if src.dim != dst.dim:
                    return False
                if src.dim and rank(postcomposition_matrix(src, dst, f)) != src.dim:
                    return False
        return True

    def reflection(self, X: Complex) -> tuple[Complex, ChainMap]:
        """``X -> B``, the co-aisle part of ``X`` (cone of its aisle part)."""
        B, r = X, identity_chain(X)
        for E in reversed(self.aisle_blocks):
            ev = evaluation_map(E, B)
            tri = cone_and_fiber(ev.map)
            r = tri.incl @ r
            B = tri.cone
        return B, r

    def reflect_map(self, f: ChainMap) -> ChainMap:
        """The class ``L(f): P(B_X) -> B_Y`` with ``L(f) r_X = r_Y f`` in the derived category."""
        BX, rX = self.reflection(f.source)
        BY, rY = self.reflection(f.target)
        src = HomSpace(BX, BY, 0)
        dst = HomSpace(f.source, BY, 0)
        M = precomposition_matrix(src, dst, rX)
        target = Matrix(list(dst.coordinates(rY @ f, resolved=False)), f.source.p, shape=(dst.dim, 1))
        sol = solve_linear(M, target)
        if sol is None:
            raise CertificateFailure("reflection is not functorial on this map")
        g = src.element([int(c) for c in sol.array[:, 0]]) if src.dim else zero_chain(src.P, BY)
        return ChainMap(src.P, BY, g.comps, check=False)


@dataclass(frozen=True, eq=False)
class AisleFamily:
    """The ``Chain(k)``-indexed family of aisles of a collection with ``k+1`` blocks."""

    coll: ExceptionalCollection

    @property
    def cuts(self) -> list[int]:
        return list(range(1, len(self.coll.blocks)))

    def aisle(self, cut: int) -> SodAisle:
        if cut not in self.cuts:
            raise ValueError(f"cut must be in {self.cuts}")
        return SodAisle(self.coll, cut)


def sod_to_tfamily(coll: ExceptionalCollection) -> AisleFamily:
    _require_verified(coll)
    return AisleFamily(coll)


def reflection_preserves_cofiber(aisle: SodAisle, f: ChainMap) -> bool:
    """``L(cofib f)`` is equivalent to ``cofib L(f)``: the reflection is exact on this square."""
    Lf = aisle.reflect_map(f)
    lhs, _ = aisle.reflection(cone(f))
    return find_equivalence(cone(Lf), lhs) is not None


# --- fixed-point checks ------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    tested: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class FixedPointReport:
    aisle: str
    checks: list[CheckResult]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            out.append(f"{status}  {c.name} ({c.tested} cases)")
            out.extend(f"      counterexample: {msg}" for msg in c.failures[:3])
        return out


def fixed_point_checks(aisle, objects: Sequence[Complex], maps: Sequence[ChainMap],
                       describe: Callable[[Complex], str] = repr,
                       max_failures: int = 5) -> FixedPointReport:
    """The four equivalent conditions for an aisle to be fixed by the shift.

    1. the aisle is closed under ``[1]`` and ``[-1]``;
    2. the aisle is closed under pushouts of spans inside it;
    3. ``E`` is closed under pullback along arbitrary maps;
    4. ``M`` is closed under pushout along arbitrary maps.
    """
    shifts = CheckResult("aisle closed under [1] and [-1]")
    pushes = CheckResult("aisle closed under pushouts")
    e_pull = CheckResult("E closed under pullback")
    m_push = CheckResult("M closed under pushout")
    inside = [X for X in objects if aisle.contains(X)]
    for X in inside:
        for k in (1, -1):
            shifts.tested += 1
            if not aisle.contains(shift(X, k)) and len(shifts.failures) < max_failures:
                shifts.failures.append(f"{describe(X)} in aisle but its [{k}] shift is not")
    in_maps = [g for g in maps if aisle.contains(g.source) and aisle.contains(g.target)]
    for u in in_maps:
        for v in in_maps:
            if v.source != u.source:
                continue
            pushes.tested += 1
            P = pushout(u, v).P
            if not aisle.contains(P) and len(pushes.failures) < max_failures:
                pushes.failures.append(f"pushout of {describe(u.target)} <- {describe(u.source)} "
                                       f"-> {describe(v.target)} leaves the aisle")
    e_maps = [f for f in maps if aisle.is_E(f)]
    m_maps = [f for f in maps if aisle.is_M(f)]
    for f in e_maps:
        for g in maps:
            if g.target != f.target:
                continue
            e_pull.tested += 1
            pb = pullout(f, g)
            if not aisle.is_E(pb.to_y) and len(e_pull.failures) < max_failures:
                e_pull.failures.append(f"pullback of E-map {describe(f.source)} -> {describe(f.target)} "
                                       f"along a map from {describe(g.source)} is not in E")
    for f in m_maps:
        for g in maps:
            if g.source != f.source:
                continue
            m_push.tested += 1
            po = pushout(f, g)
            if not aisle.is_M(po.from_y) and len(m_push.failures) < max_failures:
                m_push.failures.append(f"pushout of M-map {describe(f.source)} -> {describe(f.target)} "
                                       f"along a map to {describe(g.target)} is not in M")
    return FixedPointReport(aisle.name, [shifts, pushes, e_pull, m_push])
