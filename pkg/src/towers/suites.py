"""Property suites over seeded random fixtures.

Each check returns an :class:`Outcome`; the CLI ``verify`` command and the
acceptance tests both run these.  Sizes follow the desk-scale regime: quivers
A2 and A3, F_2, total dimension at most 4, degrees in ``[-3, 3]``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import sampling
from .complexes import (
    ChainMap,
    Complex,
    HomSpace,
    Undecided,
    chain_map_basis,
    concentrated,
    cone,
    direct_sum_complex,
    find_equivalence,
    is_quasi_iso,
    pullout,
    pushout,
    shift,
    shift_map,
    zero_chain,
)
from .heart import heart_analysis, is_heart_object, hom_discreteness_report, reconstruct_tstructure_from_heart
from .quiverrep import hom_rep_basis, projective, simple
from .sod import (
    CertificateFailure,
    check_exceptional_collection,
    fixed_point_checks,
    hom_shift_range,
    reflection_preserves_cofiber,
    sod_to_tfamily,
    weaved_tower,
    weaved_tower_dual,
)
from .tstruct import (
    StandardAisle,
    TChain,
    TrivialAisle,
    Window,
    em_factorization,
    homology_window,
    in_geq,
    in_lt,
    initial_map,
    kfold_factorization,
    postnikov_tower,
    postnikov_tower_dual,
    sator_report,
    stagewise_equivalent,
    truncate,
)
from .zposet import (
    INTEGERS,
    NEG_INF,
    POS_INF,
    ZPosetMap,
    act,
    all_partial_orders,
    chain_order,
    embed_element,
    extend_map,
    extended,
    finite_chain,
    only_identity_action,
)

CASES = 100
KFOLD_PAIRS = 50


@dataclass
class Outcome:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    undecided: int = 0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and not self.undecided

    def fail(self, msg: str) -> None:
        if len(self.failures) < 20:
            self.failures.append(msg)
        else:
            self.failures[-1] = f"... and more (last: {msg})"

    def check(self, ok: bool, msg: str) -> None:
        self.cases += 1
        if not ok:
            self.fail(msg)


def describe(X: Complex) -> str:
    terms = " ".join(f"{n}:{X.term(n).dims}" for n in X.degrees) or "0"
    hom = " ".join(f"{n}:{d}" for n, d in sorted(X.homology_dims.items())) or "acyclic"
    return f"<terms {terms} | H {hom}>"


def describe_map(f: ChainMap) -> str:
    return f"{describe(f.source)} -> {describe(f.target)}"


class Context:
    """Lazily drawn fixtures shared by the checks of one run."""

    def __init__(self, seed: int = sampling.DEFAULT_SEED, workspace=None):
        self.seed = seed
        self.workspace = workspace
        self.extra_objects = [] if workspace is None else list(workspace.objects().values())
        self.extra_maps = [] if workspace is None else list(workspace.morphisms.values())

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    @cached_property
    def complexes(self) -> list[Complex]:
        rng = self.rng(1)
        out = list(self.extra_objects)
        while len(out) < CASES + len(self.extra_objects):
            out.append(sampling.random_complex(rng, sampling.random_quiver(rng)))
        return out

    @cached_property
    def maps(self) -> list[ChainMap]:
        rng = self.rng(2)
        out = list(self.extra_maps)
        while len(out) < CASES + len(self.extra_maps):
            out.append(sampling.random_map(rng, sampling.random_quiver(rng)))
        return out

    @cached_property
    def chains(self) -> list[TChain]:
        rng = self.rng(3)
        return [sampling.random_chain(rng) for _ in range(CASES)]

    @cached_property
    def heart_maps(self) -> list[ChainMap]:
        rng = self.rng(4)
        out = [f for f in self.extra_maps if is_heart_object(f.source) and is_heart_object(f.target)]
        while len(out) < CASES + len(self.extra_maps):
            q = sampling.random_quiver(rng)
            X = sampling.random_heart_object(rng, q)
            Y = sampling.random_heart_object(rng, q)
            out.append(sampling.random_chain_map(rng, X, Y))
        return out

    @cached_property
    def a2_objects(self) -> list[Complex]:
        rng = self.rng(5)
        q = sampling.a2()
        out = []
        while len(out) < CASES:
            out.append(sampling.random_complex(rng, q))
        return out


def _timed(fn: Callable[[Context], Outcome]) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        t0 = time.perf_counter()
        out = fn(ctx)
        out.seconds = time.perf_counter() - t0
        return out

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# --- t-structure ----------------------------------------------------------------------

@_timed
def truncation_triangles(ctx: Context) -> Outcome:
    """tau_{>=n} X -> X -> tau_{<n} X certified for every sample and n in [-2, 2]."""
    out = Outcome("truncation triangles")
    for X in ctx.complexes:
        for n in range(-2, 3):
            t = truncate(X, n)
            ok = t.certified()
            if ok:
                # re-validate every constructed value against its invariants
                ChainMap(t.incl.source, t.incl.target, t.incl.comps)
                ChainMap(t.proj.source, t.proj.target, t.proj.comps)
            out.check(ok, f"n={n}: {describe(X)}")
    return out


@_timed
def kfold_uniqueness(ctx: Context) -> Outcome:
    """Iterated truncation and pullback towers of 0 -> Y agree stage by stage."""
    out = Outcome("k-fold factorization uniqueness")
    for Y, chain in list(zip(ctx.complexes, ctx.chains))[:KFOLD_PAIRS]:
        a = kfold_factorization(Y, chain)
        b = postnikov_tower(initial_map(Y), chain)
        c = kfold_factorization(Y, chain, method="induction")
        try:
            ok = stagewise_equivalent(a, b) and stagewise_equivalent(a, c)
        except Undecided:
            out.cases += 1
            out.undecided += 1
            continue
        ok = ok and all(a.window_checks) and all(b.window_checks)
        out.check(ok, f"chain {chain.indices}: {describe(Y)}")
    return out


@_timed
def postnikov_certificates(ctx: Context) -> Outcome:
    """Window certificates, composite ~ f, and agreement with the pushout-built tower."""
    out = Outcome("Postnikov tower certificates")
    for f, chain in zip(ctx.maps, ctx.chains):
        t = postnikov_tower(f, chain)
        d = postnikov_tower_dual(f, chain)
        try:
            same = stagewise_equivalent(t, d)
        except Undecided:
            out.cases += 1
            out.undecided += 1
            continue
        for g in t.maps + d.maps:
            ChainMap(g.source, g.target, g.comps)
        ok = all(t.window_checks) and t.composite_ok and all(d.window_checks) and d.composite_ok
        out.check(ok and same, f"chain {chain.indices}: {describe_map(f)}")
    return out


def zero_map_in_m0():
    q = sampling.a2()
    S1, S2 = concentrated(simple(q, 0)), concentrated(simple(q, 1))
    f = zero_chain(shift(S1, -1), shift(S2, -1))
    return f


@_timed
def m0_map_tower(ctx: Context) -> Outcome:
    """f = 0: S1[-1] -> S2[-1] lies in M_0, yet its tower over (0) is nontrivial."""
    out = Outcome("M_0 map with nontrivial tower")
    f = zero_map_in_m0()
    fp = em_factorization(f, 0)
    out.check(fp.e_is_equivalence, "e is not a quasi-isomorphism, so f is not in M_0")
    out.check(not fp.m_is_equivalence, "m is a quasi-isomorphism, so f would be in E_0")
    t = postnikov_tower(f, TChain.of(0))
    out.check(all(t.window_checks) and t.composite_ok, "tower certificates fail")
    middle = t.stages[0]
    out.check(find_equivalence(middle, f.source) is None,
              f"middle stage {describe(middle)} is equivalent to the source")
    C = cone(f)
    out.check(not C.is_acyclic() and not in_lt(C, 0), "cofib(f) has no part in C_{>=0}")
    return out


@_timed
def sator(ctx: Context) -> Outcome:
    """0 -> X and X -> 0 lie in the same classes E_n and M_n."""
    out = Outcome("initial and terminal arrows agree")
    for X in ctx.complexes:
        for n in range(-2, 3):
            r = sator_report(X, n)
            out.check(r.holds, f"n={n}: {r} for {describe(X)}")
            # and the classes match the aisle / co-aisle memberships
            out.check(r.initial_E == in_geq(X, n) and r.initial_M == in_lt(X, n),
                      f"n={n}: membership flags disagree with homology for {describe(X)}")
    return out


@_timed
def factorization_laws(ctx: Context) -> Outcome:
    """m e = f, E_n/M_n flags, closure of E_n under pushout and M_n under pullback, 3-for-2."""
    out = Outcome("factorization laws")
    rng = ctx.rng(11)
    for f in ctx.maps[:40]:
        n = int(rng.integers(-2, 3))
        fp = em_factorization(f, n)
        out.check(fp.composite_is_f(), f"m e != f at n={n}: {describe_map(f)}")
        # the factorization itself: e in E_n, m in M_n
        out.check(em_factorization(fp.e, n).f_in_E, f"e not in E_{n}: {describe_map(f)}")
        out.check(em_factorization(fp.m, n).f_in_M, f"m not in M_{n}: {describe_map(f)}")
        both = fp.f_in_E and fp.f_in_M
        out.check(not both or is_quasi_iso(f), f"f in E and M but not invertible: {describe_map(f)}")
        g = sampling.random_chain_map(rng, f.source, sampling.random_complex(rng, f.source.quiver))
        if fp.f_in_E:
            po = pushout(f, g)
            out.check(em_factorization(po.from_y, n).f_in_E,
                      f"pushout of an E_{n}-map left E_{n}: {describe_map(f)}")
        h = sampling.random_chain_map(rng, sampling.random_complex(rng, f.source.quiver), f.target)
        if fp.f_in_M:
            pb = pullout(f, h)
            out.check(em_factorization(pb.to_y, n).f_in_M,
                      f"pullback of an M_{n}-map left M_{n}: {describe_map(f)}")
        # 3-for-2 for M_n on the composable pair (e, m)
        me, mm, mf = (em_factorization(x, n).f_in_M for x in (fp.e, fp.m, f))
        out.check(not (me and mm) or mf, "M not closed under composition")
        out.check(not (mm and mf) or me, "M fails right cancellation")
    return out


@_timed
def shift_equivariance(ctx: Context) -> Outcome:
    """postnikov_tower(f[1], chain+1) is the shift of postnikov_tower(f, chain)."""
    out = Outcome("tower shift equivariance")
    for f, chain in list(zip(ctx.maps, ctx.chains))[:30]:
        t = postnikov_tower(f, chain)
        s = postnikov_tower(shift_map(f, 1), chain.shifted(1))
        try:
            ok = all(find_equivalence(shift(a, 1), b) is not None for a, b in zip(t.stages, s.stages))
        except Undecided:
            out.cases += 1
            out.undecided += 1
            continue
        out.check(ok, f"chain {chain.indices}: {describe_map(f)}")
    return out


@_timed
def window_orthogonality(ctx: Context) -> Outcome:
    """Hom_D(X, Y[n]) = 0 for X in C_{>=h}, Y in C_{<j}, j <= h and n <= 0."""
    out = Outcome("window semiorthogonality")
    xs = ctx.complexes[:60]
    pairs = [(X, Y) for i, X in enumerate(xs) for Y in xs[i + 1:i + 4] if X.quiver == Y.quiver]
    for X, Y in pairs[:50]:
        for h in range(-2, 3):
            A = truncate(X, h).tau_geq
            B = truncate(Y, h).tau_lt
            if A.is_acyclic() or B.is_acyclic():
                continue
            for n in range(-3, 1):
                out.check(HomSpace(A, B, n).dim == 0,
                          f"Hom_D(tau_>={h} X, tau_<{h} Y[{n}]) != 0 for {describe(X)}, {describe(Y)}")
    return out


@_timed
def derived_hom_invariance(ctx: Context) -> Outcome:
    """Hom dims survive projective replacement and obey the shift adjunction."""
    out = Outcome("derived hom invariance")
    xs = ctx.complexes[:30]
    for i, X in enumerate(xs):
        Y = xs[(i * 5 + 1) % len(xs)]
        if X.quiver != Y.quiver:
            continue
        P = X.resolution[0]
        for n in (-1, 0, 1):
            d = HomSpace(X, Y, n).dim
            out.check(HomSpace(P, Y, n).dim == d, f"replacement changed Hom_D dim: {describe(X)}")
            out.check(HomSpace(shift(X, -n), Y, 0).dim == d, f"shift adjunction fails n={n}")
    return out


# --- heart -------------------------------------------------------------------------------

@_timed
def heart_abelianity(ctx: Context) -> Outcome:
    """ker/coker/im/coim in the heart, im ~ coim ~ Z_f, rep oracle on H_0, discreteness."""
    out = Outcome("heart abelianity")
    for f in ctx.heart_maps:
        a = heart_analysis(f)
        label = describe_map(f)
        out.check(a.all_in_heart(), f"derived object outside the heart: {label}")
        try:
            out.check(a.witness_im_coim is not None, f"no im ~ coim witness: {label}")
            out.check(a.witness_zf_im is not None, f"no Z_f ~ im witness: {label}")
            out.check(a.matches_rep_oracle(), f"ker/coker disagree with H_0 oracle: {label}")
        except Undecided:
            out.undecided += 1
            continue
        dims = hom_discreteness_report(f.source, f.target, (1, 2))
        out.check(all(d == 0 for d in dims.values()), f"Hom_D(X, Y[-n]) = {dims}: {label}")
    return out


@_timed
def heart_reconstruction(ctx: Context) -> Outcome:
    """The heart-weaved tower recovers C_{>=0}, C_{<0} and the homology window."""
    out = Outcome("heart reconstruction")
    for X in ctx.complexes:
        r = reconstruct_tstructure_from_heart(X)
        hw = homology_window(X)
        ok = (r.in_geq0 == in_geq(X, 0) and r.in_lt0 == in_lt(X, 0) and r.window == hw
              and r.a_length == (0 if hw is None else int(hw.hi - hw.lo)))
        if hw is not None:
            ok = ok and Window(hw.lo, hw.hi).contains(X)
        out.check(ok, f"{tuple(r)} window {r.window}: {describe(X)}")
    return out


# --- semiorthogonal decompositions -------------------------------------------------------

def a2_collection():
    q = sampling.a2()
    P1, P2 = concentrated(projective(q, 0)), concentrated(projective(q, 1))
    return check_exceptional_collection([P2, P1], ["P2", "P1"])


def a2_fixture_objects() -> list[Complex]:
    q = sampling.a2()
    P1, P2, S1 = (concentrated(projective(q, 0)), concentrated(projective(q, 1)),
                  concentrated(simple(q, 0)))
    out = [shift(X, k) for X in (P1, P2, S1) for k in (-1, 0, 1)]
    return out + [direct_sum_complex([P1, P1]), direct_sum_complex([P1, shift(P1, 1)]),
                  direct_sum_complex([P1, P2])]


def a2_fixture_maps(objects: list[Complex]) -> list[ChainMap]:
    maps = []
    for X in objects:
        for Y in objects:
            maps.extend(chain_map_basis(X, Y))
    return maps


@_timed
def sod_collection(ctx: Context) -> Outcome:
    """(P2, P1) is exceptional; (P1, P2) is rejected by dim Hom_D(P2, P1) = 1."""
    out = Outcome("SOD collection")
    good = a2_collection()
    out.check(good.verified, f"(P2, P1) rejected: {good.failures}")
    q = sampling.a2()
    P1, P2 = concentrated(projective(q, 0)), concentrated(projective(q, 1))
    bad = check_exceptional_collection([P1, P2], ["P1", "P2"])
    out.check(not bad.verified, "(P1, P2) accepted")
    out.check(bad.orth_dims.get((1, 0), {}).get(0) == 1, f"witness dims {bad.orth_dims}")
    return out


@_timed
def sod_towers(ctx: Context) -> Outcome:
    """Weaved towers exist for every sampled A2 object and agree across construction orders."""
    out = Outcome("SOD weaved towers")
    coll = a2_collection()
    fam = sod_to_tfamily(coll)
    aisle = fam.aisle(1)
    for Y in ctx.a2_objects:
        try:
            a = weaved_tower(Y, coll)
            b = weaved_tower_dual(Y, coll)
        except CertificateFailure as exc:
            out.check(False, f"{exc}: {describe(Y)}")
            continue
        try:
            same = stagewise_equivalent(a, b)
        except Undecided:
            out.cases += 1
            out.undecided += 1
            continue
        out.check(same and a.composite_ok and b.composite_ok, f"towers differ: {describe(Y)}")
        # block semiorthogonality of the cofibers and trivial shift action on the aisle
        comps = list(reversed(a.cofibers))
        orth = all(HomSpace(comps[j], comps[i], n).dim == 0
                   for i in range(len(comps)) for j in range(i + 1, len(comps))
                   for n in hom_shift_range(comps[j], comps[i]))
        out.check(orth, f"tower cofibers not semiorthogonal: {describe(Y)}")
        out.check(aisle.contains(Y) == aisle.contains(shift(Y, 1)), f"aisle not shift-stable: {describe(Y)}")
        # feeding the aisle part back reproduces its block decomposition
        part = a.stages[0]
        rew = list(reversed(weaved_tower(part, coll).cofibers))
        ok = rew[0].is_acyclic() and find_equivalence(rew[1], comps[1]) is not None
        out.check(ok, f"aisle part does not re-weave to its block: {describe(Y)}")
    return out


@_timed
def sod_fixed_points(ctx: Context) -> Outcome:
    """The SOD aisle and the trivial aisle pass the four fixed-point checks; C_{>=0} does not."""
    out = Outcome("SOD fixed-point checks")
    coll = a2_collection()
    aisle = sod_to_tfamily(coll).aisle(1)
    objects = a2_fixture_objects()
    maps = a2_fixture_maps(objects)
    rep = fixed_point_checks(aisle, objects, maps, describe)
    for c in rep.checks:
        out.check(c.passed and c.tested > 0, f"{aisle.name}: {c.name}: {c.failures[:1]}")
    triv = fixed_point_checks(TrivialAisle(), objects, maps, describe)
    out.check(triv.all_passed, f"trivial aisle: {triv.lines()}")
    std = fixed_point_checks(StandardAisle(0), objects, maps, describe)
    out.check(not std.checks[0].passed, "standard aisle reported closed under [-1]")
    for f in maps[:20]:
        out.check(reflection_preserves_cofiber(aisle, f), f"reflection not exact on {describe_map(f)}")
    return out


@_timed
def workspace_collections(ctx: Context) -> Outcome:
    """Every collection of the workspace verifies and weaves every workspace object."""
    out = Outcome("workspace collections")
    ws = ctx.workspace
    if ws is None:
        return out
    objects = ws.objects()
    for name in ws.collections:
        blocks, names = ws.collection(name)
        coll = check_exceptional_collection(blocks, names)
        out.check(coll.verified, f"{name}: {'; '.join(coll.failures)}")
        if not coll.verified:
            continue
        for oname, Y in objects.items():
            try:
                a = weaved_tower(Y, coll)
                b = weaved_tower_dual(Y, coll)
                out.check(stagewise_equivalent(a, b), f"{name}: towers of {oname} differ")
            except CertificateFailure as exc:
                out.check(False, f"{name}: {oname}: {exc}")
            except Undecided:
                out.cases += 1
                out.undecided += 1
    return out


# --- Z-posets ------------------------------------------------------------------------------

@_timed
def zposet_laws(ctx: Context) -> Outcome:
    """Trivial actions on finite posets, extension and embedding behaviour."""
    out = Outcome("Z-poset laws")
    for k in range(1, 7):
        els, leq = chain_order(k)
        out.check(only_identity_action(els, leq), f"chain of size {k} admits a nontrivial action")
    for k in range(1, 5):
        for rel in all_partial_orders(k):
            leq = (lambda r: lambda a, b: a == b or (a, b) in r)(rel)
            out.check(only_identity_action(list(range(k)), leq), f"poset {sorted(rel)}")
    for k in range(1, 7):
        P = finite_chain(k)
        for x in P.elements():
            out.check(act(P, x, 1) == x and act(P, x, -3) == x, f"chain action moves {x}")
            e = embed_element(P, x)
            out.check(e.behaviour == "constant", f"embedding of {x} in Chain({k}) not constant")
        ext = extend_map(ZPosetMap(P, P, table=tuple((x, x) for x in P.elements())))
        out.check(ext(NEG_INF) == 0 and ext(POS_INF) == k - 1 and ext.is_monotone() and ext.is_equivariant(),
                  f"extension of id on Chain({k})")
    out.check(act(INTEGERS, 5, 2) == 7, "5 + 2 != 7")
    out.check(embed_element(INTEGERS, 0).behaviour == "injective", "Z -> Z not injective")
    ZE = extended(INTEGERS)
    out.check(embed_element(ZE, POS_INF).behaviour == "constant", "+inf embedding not constant")
    out.check(embed_element(ZE, 3).behaviour == "injective", "3 in Extended(Z) not injective")
    for n in (-3, 0, 4):
        out.check(act(ZE, NEG_INF, n) == NEG_INF and act(ZE, POS_INF, n) == POS_INF, "ends move")
    idz = extend_map(embed_element(ZE, 0))
    out.check(idz(NEG_INF) == NEG_INF and idz(POS_INF) == POS_INF and idz(4) == 4
              and idz.is_monotone() and idz.is_equivariant(), "extension of Z -> Extended(Z)")
    try:
        extend_map(embed_element(INTEGERS, 0))
        out.check(False, "extension into Z (no min/max) accepted")
    except ValueError:
        out.check(True, "")
    return out


SUITES: dict[str, list[Callable[[Context], Outcome]]] = {
    "tstruct": [truncation_triangles, kfold_uniqueness, postnikov_certificates, m0_map_tower,
                sator, factorization_laws, shift_equivariance, window_orthogonality,
                derived_hom_invariance],
    "heart": [heart_abelianity, heart_reconstruction],
    "sod": [sod_collection, sod_towers, sod_fixed_points, workspace_collections],
    "zposet": [zposet_laws],
}


def run_suite(name: str, seed: int = sampling.DEFAULT_SEED, workspace=None) -> list[Outcome]:
    """Run one suite (or ``"all"``) and return the outcomes in a fixed order."""
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    ctx = Context(seed, workspace)
    names = list(SUITES) if name == "all" else [name]
    return [check(ctx) for n in names for check in SUITES[n]]
