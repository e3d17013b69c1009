"""Representations of a finite acyclic quiver over F_p.

Conventions
-----------
* Vertices are ``0 .. vertex_count-1``; edge ``a = (s, t)`` points from
  ``s`` to ``t``.
* A representation stores one matrix per edge, acting on column vectors
  from the source space to the target space, so ``maps[a]`` has shape
  ``dims[t] x dims[s]``.
* A path is a pair ``(start, edges)``; ``edges`` lists edge indices in the
  order they are traversed.  The trivial path at ``v`` is ``(v, ())``.
* ``P(v)`` is the projective at ``v``: its space at ``w`` has the paths
  ``v -> w`` as basis, ordered by length and then lexicographically.

A rep may remember that it is *free*, i.e. literally ``P(g_1) + ... + P(g_r)``
with the canonical path basis (``generators = (g_1, ..., g_r)``).  The
resolution machinery produces such reps, and homs out of them reduce to
choosing images of generators.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .exactlin import (
    Matrix,
    block_diag,
    cokernel_projection,
    hstack,
    kernel_basis,
    kron,
    left_inverse,
    rank,
    right_inverse,
)

Path = tuple[int, tuple[int, ...]]


class QuiverMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(s), int(t)) for s, t in self.edges))
        if self.vertex_count <= 0:
            raise ValueError("a quiver needs at least one vertex")
        for k, (s, t) in enumerate(self.edges):
            if not (0 <= s < self.vertex_count and 0 <= t < self.vertex_count):
                raise ValueError(f"edge {k} = ({s}, {t}) references a missing vertex")
        # raises graphlib.CycleError on oriented cycles (loops included)
        self.topological_order  # noqa: B018

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        ts = graphlib.TopologicalSorter({v: set() for v in range(self.vertex_count)})
        for s, t in self.edges:
            if s == t:
                raise ValueError(f"quiver is not acyclic: loop at vertex {s}")
            ts.add(t, s)
        try:
            return tuple(ts.static_order())
        except graphlib.CycleError as exc:
            raise ValueError(f"quiver is not acyclic: cycle through {exc.args[1]}") from exc

    def outgoing(self, v: int) -> list[int]:
        return [k for k, (s, _) in enumerate(self.edges) if s == v]

    def incoming(self, w: int) -> list[int]:
        return [k for k, (_, t) in enumerate(self.edges) if t == w]

    @cached_property
    def _paths(self) -> dict[tuple[int, int], tuple[tuple[int, ...], ...]]:
        table: dict[tuple[int, int], list[tuple[int, ...]]] = {}
        for v in range(self.vertex_count):
            stack: list[tuple[int, tuple[int, ...]]] = [(v, ())]
            while stack:
                here, walk = stack.pop()
                table.setdefault((v, here), []).append(walk)
                for k in self.outgoing(here):
                    stack.append((self.edges[k][1], walk + (k,)))
        return {key: tuple(sorted(ws, key=lambda w: (len(w), w))) for key, ws in table.items()}

    def paths(self, v: int, w: int) -> tuple[tuple[int, ...], ...]:
        return self._paths.get((v, w), ())

    def path_count(self, v: int, w: int) -> int:
        return len(self.paths(v, w))


@dataclass(frozen=True)
class Rep:
    quiver: Quiver
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]
    p: int = 2
    generators: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        q = self.quiver
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.dims) != q.vertex_count:
            raise ValueError(f"expected {q.vertex_count} dimensions, got {len(self.dims)}")
        if any(d < 0 for d in self.dims):
            raise ValueError(f"negative dimension in {self.dims}")
        if len(self.maps) != len(q.edges):
            raise ValueError(f"expected {len(q.edges)} edge maps, got {len(self.maps)}")
        for k, ((s, t), m) in enumerate(zip(q.edges, self.maps)):
            if m.p != self.p:
                raise ValueError(f"edge {k}: modulus {m.p} differs from {self.p}")
            if m.shape != (self.dims[t], self.dims[s]):
                raise ValueError(
                    f"edge {k} ({s}->{t}): matrix shape {m.shape}, "
                    f"expected {(self.dims[t], self.dims[s])}"
                )

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def path_matrix(self, start: int, walk: tuple[int, ...]) -> Matrix:
        key = (start, walk)
        cache = self._path_cache
        if key not in cache:
            m = Matrix.identity(self.dims[start], self.p)
            for k in walk:
                m = self.maps[k] @ m
            cache[key] = m
        return cache[key]

    @cached_property
    def _path_cache(self) -> dict:
        return {}

    @cached_property
    def generator_offsets(self) -> tuple[tuple[int, ...], ...]:
        """``offsets[w][i]``: first basis index at ``w`` belonging to generator ``i``."""
        if self.generators is None:
            raise ValueError("not a free representation")
        q = self.quiver
        out = []
        for w in range(q.vertex_count):
            offs, pos = [], 0
            for g in self.generators:
                offs.append(pos)
                pos += q.path_count(g, w)
            out.append(tuple(offs))
        return tuple(out)

    def __repr__(self) -> str:
        tag = f", free{list(self.generators)}" if self.generators is not None else ""
        return f"Rep(dims={self.dims}{tag})"


def _check_same(a: Rep, b: Rep) -> None:
    if a.quiver != b.quiver:
        raise QuiverMismatch("representations live on different quivers")
    if a.p != b.p:
        raise QuiverMismatch(f"modulus mismatch: {a.p} vs {b.p}")


@dataclass(frozen=True)
class RepMap:
    source: Rep
    target: Rep
    comps: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(self.comps))
        _check_same(self.source, self.target)
        src, tgt = self.source, self.target
        if len(self.comps) != src.quiver.vertex_count:
            raise ValueError("one component per vertex required")
        for v, c in enumerate(self.comps):
            if c.shape != (tgt.dims[v], src.dims[v]):
                raise ValueError(
                    f"component at vertex {v} has shape {c.shape}, "
                    f"expected {(tgt.dims[v], src.dims[v])}"
                )
        for k, (s, t) in enumerate(src.quiver.edges):
            if self.comps[t] @ src.maps[k] != tgt.maps[k] @ self.comps[s]:
                raise ValueError(f"square at edge {k} ({s}->{t}) does not commute")

    @classmethod
    def unchecked(cls, source: Rep, target: Rep, comps) -> "RepMap":
        m = object.__new__(cls)
        object.__setattr__(m, "source", source)
        object.__setattr__(m, "target", target)
        object.__setattr__(m, "comps", tuple(comps))
        return m

    def __matmul__(self, other: "RepMap") -> "RepMap":
        if other.target != self.source:
            raise ValueError("composition of non-composable representation maps")
        return RepMap.unchecked(other.source, self.target,
                                [a @ b for a, b in zip(self.comps, other.comps)])

    def __add__(self, other: "RepMap") -> "RepMap":
        return RepMap.unchecked(self.source, self.target,
                                [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "RepMap") -> "RepMap":
        return RepMap.unchecked(self.source, self.target,
                                [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "RepMap":
        return RepMap.unchecked(self.source, self.target, [-a for a in self.comps])

    def scale(self, c: int) -> "RepMap":
        return RepMap.unchecked(self.source, self.target, [a.scale(c) for a in self.comps])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def is_injective(self) -> bool:
        return all(rank(c) == c.cols for c in self.comps)

    def is_surjective(self) -> bool:
        return all(rank(c) == c.rows for c in self.comps)

    def is_iso(self) -> bool:
        return all(c.rows == c.cols and rank(c) == c.cols for c in self.comps)


# --- constructors ---------------------------------------------------------

def rep_from_lists(quiver: Quiver, dims: Sequence[int], maps: Sequence, p: int = 2) -> Rep:
    mats = []
    for k, (s, t) in enumerate(quiver.edges):
        mats.append(Matrix(maps[k], p, shape=(dims[t], dims[s])))
    return Rep(quiver, tuple(dims), tuple(mats), p)


def zero_rep(quiver: Quiver, p: int = 2) -> Rep:
    return Rep(quiver, (0,) * quiver.vertex_count,
               tuple(Matrix.zeros(0, 0, p) for _ in quiver.edges), p, generators=())


def simple(quiver: Quiver, v: int, p: int = 2) -> Rep:
    dims = tuple(1 if w == v else 0 for w in range(quiver.vertex_count))
    return Rep(quiver, dims,
               tuple(Matrix.zeros(dims[t], dims[s], p) for s, t in quiver.edges), p)


def free_rep(quiver: Quiver, generators: Sequence[int], p: int = 2) -> Rep:
    """Direct sum ``P(g_1) + ... + P(g_r)`` with its path basis."""
    gens = tuple(generators)
    dims = tuple(sum(quiver.path_count(g, w) for g in gens) for w in range(quiver.vertex_count))
    maps = []
    for k, (s, t) in enumerate(quiver.edges):
        m = np.zeros((dims[t], dims[s]), dtype=np.int64)
        ro = co = 0
        for g in gens:
            src_paths = quiver.paths(g, s)
            tgt_paths = quiver.paths(g, t)
            index = {walk: i for i, walk in enumerate(tgt_paths)}
            for j, walk in enumerate(src_paths):
                m[ro + index[walk + (k,)], co + j] = 1
            ro += len(tgt_paths)
            co += len(src_paths)
        maps.append(Matrix._wrap(m, p))
    return Rep(quiver, dims, tuple(maps), p, generators=gens)


def projective(quiver: Quiver, v: int, p: int = 2) -> Rep:
    return free_rep(quiver, (v,), p)


def identity_map(M: Rep) -> RepMap:
    return RepMap.unchecked(M, M, [Matrix.identity(d, M.p) for d in M.dims])


def zero_map(M: Rep, N: Rep) -> RepMap:
    return RepMap.unchecked(M, N, [Matrix.zeros(b, a, M.p) for a, b in zip(M.dims, N.dims)])


def direct_sum(*reps: Rep) -> Rep:
    if not reps:
        raise ValueError("direct_sum needs at least one summand")
    for r in reps[1:]:
        _check_same(reps[0], r)
    q, p = reps[0].quiver, reps[0].p
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(q.vertex_count))
    maps = tuple(block_diag([r.maps[k] for r in reps], p) for k in range(len(q.edges)))
    gens = None
    if all(r.generators is not None for r in reps):
        gens = tuple(g for r in reps for g in r.generators)
    return Rep(q, dims, maps, p, generators=gens)


def block_map(source_parts: Sequence[Rep], target_parts: Sequence[Rep],
              blocks: Sequence[Sequence[RepMap | None]],
              source: Rep | None = None, target: Rep | None = None) -> RepMap:
    """Map between direct sums from a block matrix of maps (``None`` = zero).

    ``blocks[i][j]`` maps ``source_parts[j]`` to ``target_parts[i]``.
    """
    src = source or direct_sum(*source_parts)
    tgt = target or direct_sum(*target_parts)
    q, p = src.quiver, src.p
    comps = []
    for v in range(q.vertex_count):
        out = np.zeros((tgt.dims[v], src.dims[v]), dtype=np.int64)
        ro = 0
        for i, T in enumerate(target_parts):
            co = 0
            for j, S in enumerate(source_parts):
                b = blocks[i][j]
                if b is not None and S.dims[v] and T.dims[v]:
                    out[ro:ro + T.dims[v], co:co + S.dims[v]] = b.comps[v].array
                co += S.dims[v]
            ro += T.dims[v]
        comps.append(Matrix._wrap(out, p))
    return RepMap.unchecked(src, tgt, comps)


def injection(parts: Sequence[Rep], i: int, total: Rep | None = None) -> RepMap:
    row = [[identity_map(parts[i]) if r == i else None] for r in range(len(parts))]
    return block_map([parts[i]], parts, row, source=parts[i], target=total)


def projection(parts: Sequence[Rep], i: int, total: Rep | None = None) -> RepMap:
    col = [[identity_map(parts[i]) if c == i else None for c in range(len(parts))]]
    return block_map(parts, [parts[i]], col, source=total, target=parts[i])


# --- free modules -----------------------------------------------------------

def map_from_free(P: Rep, N: Rep, images: Sequence[Matrix]) -> RepMap:
    """The map ``P -> N`` sending generator ``i`` of the free rep ``P`` to ``images[i]``.

    ``images[i]`` is a column vector in ``N`` at vertex ``P.generators[i]``.
    """
    _check_same(P, N)
    q, p = P.quiver, P.p
    comps = []
    for w in range(q.vertex_count):
        cols = []
        for g, img in zip(P.generators, images):
            for walk in q.paths(g, w):
                cols.append(N.path_matrix(g, walk) @ img)
        comps.append(hstack(cols, rows=N.dims[w], p=p) if cols else Matrix.zeros(N.dims[w], 0, p))
    return RepMap.unchecked(P, N, comps)


def free_images(f: RepMap) -> list[Matrix]:
    """Images of the generators of the free source of ``f``."""
    P = f.source
    out = []
    for i, g in enumerate(P.generators):
        col = P.generator_offsets[g][i]
        out.append(Matrix._wrap(f.comps[g].array[:, col:col + 1], P.p))
    return out


# --- hom spaces, kernels, cokernels ----------------------------------------

def hom_rep_basis(M: Rep, N: Rep) -> list[RepMap]:
    """Basis of ``Hom(M, N)``: the solutions of the commuting-square system."""
    _check_same(M, N)
    q, p = M.quiver, M.p
    sizes = [N.dims[v] * M.dims[v] for v in range(q.vertex_count)]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    nvars = int(offsets[-1])
    rows = []
    for k, (s, t) in enumerate(q.edges):
        # vec(phi_t M_a) - vec(N_a phi_s), row-major vectorisation
        eq = np.zeros((N.dims[t] * M.dims[s], nvars), dtype=np.int64)
        if eq.shape[0]:
            a = kron(Matrix.identity(N.dims[t], p), M.maps[k].T).array
            b = kron(N.maps[k], Matrix.identity(M.dims[s], p)).array
            eq[:, offsets[t]:offsets[t + 1]] += a
            eq[:, offsets[s]:offsets[s + 1]] -= b
            rows.append(eq % p)
    system = Matrix._wrap(np.vstack(rows), p) if rows else Matrix.zeros(0, nvars, p)
    K = kernel_basis(system)
    basis = []
    for c in range(K.cols):
        col = K.array[:, c]
        comps = [Matrix._wrap(col[offsets[v]:offsets[v + 1]].reshape(N.dims[v], M.dims[v]), p)
                 for v in range(q.vertex_count)]
        basis.append(RepMap.unchecked(M, N, comps))
    return basis


def kernel_cokernel_rep(f: RepMap) -> tuple[Rep, RepMap, Rep, RepMap]:
    """Vertex-wise kernel and cokernel of ``f`` with induced edge maps."""
    M, N = f.source, f.target
    q, p = M.quiver, M.p
    K = [kernel_basis(c) for c in f.comps]
    Q = [cokernel_projection(c) for c in f.comps]
    kmaps, cmaps = [], []
    for k, (s, t) in enumerate(q.edges):
        kmaps.append(left_inverse(K[t]) @ M.maps[k] @ K[s])
        cmaps.append(Q[t] @ N.maps[k] @ right_inverse(Q[s]))
    ker = Rep(q, tuple(k.cols for k in K), tuple(kmaps), p)
    coker = Rep(q, tuple(c.rows for c in Q), tuple(cmaps), p)
    return ker, RepMap.unchecked(ker, M, K), coker, RepMap.unchecked(N, coker, Q)


def top_dims(M: Rep) -> tuple[int, ...]:
    q = M.quiver
    out = []
    for w in range(q.vertex_count):
        inc = [M.maps[k] for k in q.incoming(w)]
        r = rank(hstack(inc)) if inc else 0
        out.append(M.dims[w] - r)
    return tuple(out)


def is_projective(M: Rep) -> bool:
    """``M`` is projective iff its projective cover ``P(top M) -> M`` is an isomorphism."""
    if M.generators is not None:
        return True
    q = M.quiver
    top = top_dims(M)
    cover = sum(top[v] * q.path_count(v, w) for v in range(q.vertex_count)
                for w in range(q.vertex_count))
    return cover == M.total_dim


# --- the standard (Ringel) resolution ---------------------------------------

def _p0_generators(M: Rep) -> tuple[tuple[int, int], ...]:
    return tuple((v, i) for v in range(M.quiver.vertex_count) for i in range(M.dims[v]))


def _p1_generators(M: Rep) -> tuple[tuple[int, int], ...]:
    return tuple((k, i) for k, (s, _) in enumerate(M.quiver.edges) for i in range(M.dims[s]))


def resolution_terms(M: Rep) -> tuple[Rep, Rep]:
    q = M.quiver
    P0 = free_rep(q, [v for v, _ in _p0_generators(M)], M.p)
    P1 = free_rep(q, [q.edges[k][1] for k, _ in _p1_generators(M)], M.p)
    return P1, P0


def _generator_column(P: Rep, index: dict, key, vertex: int, walk: tuple[int, ...] = ()) -> int:
    i = index[key]
    return P.generator_offsets[vertex][i] + P.quiver.paths(P.generators[i], vertex).index(walk)


def standard_resolution(M: Rep) -> tuple[Rep, Rep, RepMap, RepMap]:
    """``0 -> P1 --d--> P0 --aug--> M -> 0``.

    ``P0 = sum_v P(v) (x) M_v`` and ``P1 = sum_{a: s->t} P(t) (x) M_s``; the
    differential sends the generator ``(a, m)`` to ``a.(s, m) - (t, M_a m)``.
    """
    q, p = M.quiver, M.p
    P1, P0 = resolution_terms(M)
    g0 = {key: i for i, key in enumerate(_p0_generators(M))}
    d_images = []
    for k, i in _p1_generators(M):
        s, t = q.edges[k]
        col = np.zeros(P0.dims[t], dtype=np.int64)
        col[_generator_column(P0, g0, (s, i), t, (k,))] += 1
        image = M.maps[k].array[:, i]
        for j in range(M.dims[t]):
            col[_generator_column(P0, g0, (t, j), t)] -= image[j]
        d_images.append(Matrix._wrap((col % p).reshape(-1, 1), p))
    d = map_from_free(P1, P0, d_images)
    aug_images = []
    for v, i in _p0_generators(M):
        e = np.zeros((M.dims[v], 1), dtype=np.int64)
        e[i, 0] = 1
        aug_images.append(Matrix._wrap(e, p))
    aug = map_from_free(P0, M, aug_images)
    return P1, P0, d, aug


def resolution_maps(f: RepMap) -> tuple[RepMap, RepMap]:
    """``(P1(f), P0(f))``: the resolution is a functor, these commute strictly."""
    M, N = f.source, f.target
    q, p = M.quiver, M.p
    P1M, P0M = resolution_terms(M)
    P1N, P0N = resolution_terms(N)
    g0 = {key: i for i, key in enumerate(_p0_generators(N))}
    g1 = {key: i for i, key in enumerate(_p1_generators(N))}
    im0 = []
    for v, i in _p0_generators(M):
        col = np.zeros(P0N.dims[v], dtype=np.int64)
        for j in range(N.dims[v]):
            col[_generator_column(P0N, g0, (v, j), v)] = f.comps[v].array[j, i]
        im0.append(Matrix._wrap(col.reshape(-1, 1), p))
    im1 = []
    for k, i in _p1_generators(M):
        s, t = q.edges[k]
        col = np.zeros(P1N.dims[t], dtype=np.int64)
        for j in range(N.dims[s]):
            col[_generator_column(P1N, g1, (k, j), t)] = f.comps[s].array[j, i]
        im1.append(Matrix._wrap(col.reshape(-1, 1), p))
    return map_from_free(P1M, P1N, im1), map_from_free(P0M, P0N, im0)


def reps_isomorphic(M: Rep, N: Rep) -> bool:
    """Exact isomorphism test for small reps by searching ``Hom(M, N)``.

    Exhaustive over F_p-combinations of a hom basis; intended for the tiny
    fixtures used as oracles.
    """
    import itertools

    if M.dims != N.dims:
        return False
    basis = hom_rep_basis(M, N)
    for coeffs in itertools.product(range(M.p), repeat=len(basis)):
        if not any(coeffs):
            continue
        comps = [sum((b.comps[v].scale(c) for b, c in zip(basis, coeffs)),
                     Matrix.zeros(N.dims[v], M.dims[v], M.p))
                 for v in range(M.quiver.vertex_count)]
        if all(rank(c) == c.rows for c in comps):
            return True
    return not basis and M.total_dim == 0


__all__ = [
    "Quiver", "Rep", "RepMap", "QuiverMismatch",
    "rep_from_lists", "zero_rep", "simple", "free_rep", "projective",
    "identity_map", "zero_map", "direct_sum", "block_map", "injection", "projection",
    "map_from_free", "free_images", "hom_rep_basis", "kernel_cokernel_rep",
    "top_dims", "is_projective", "standard_resolution", "resolution_maps",
    "resolution_terms", "reps_isomorphic",
]
