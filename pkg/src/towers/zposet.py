"""Posets with a Z-action, used to index families of t-structures.

A Z-poset carries a successor map ``rho`` that is an order automorphism with
``x <= rho(x)``.  Three kinds are instantiable: the integers (``rho = +1``),
finite chains ``0 < 1 < ... < k-1`` (on which the only such action is the
identity) and the extension of either by fixed points ``-inf`` and ``+inf``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

NEG_INF = -math.inf
POS_INF = math.inf


class NotAnElement(ValueError):
    pass


@dataclass(frozen=True)
class ZPoset:
    kind: str                      # "integers", "chain" or "extended"
    size: int = 0                  # number of elements of a finite chain
    inner: "ZPoset | None" = None  # wrapped poset of an extended kind

    def __post_init__(self):
        if self.kind not in ("integers", "chain", "extended"):
            raise ValueError(f"unknown Z-poset kind {self.kind!r}")
        if self.kind == "chain" and self.size <= 0:
            raise ValueError("a finite chain needs at least one element")
        if self.kind == "extended" and (self.inner is None or self.inner.kind == "extended"):
            raise ValueError("extended posets wrap an integer or chain poset")

    def contains(self, x) -> bool:
        if self.kind == "integers":
            return isinstance(x, int) and not isinstance(x, bool)
        if self.kind == "chain":
            return isinstance(x, int) and 0 <= x < self.size
        return x in (NEG_INF, POS_INF) or self.inner.contains(x)

    def _require(self, x) -> None:
        if not self.contains(x):
            raise NotAnElement(f"{x!r} is not an element of {self}")

    def leq(self, x, y) -> bool:
        self._require(x)
        self._require(y)
        return x <= y

    def rho(self, x):
        return act(self, x, 1)

    @property
    def is_finite(self) -> bool:
        return self.kind == "chain" or (self.kind == "extended" and self.inner.is_finite)

    def elements(self) -> list:
        if self.kind == "chain":
            return list(range(self.size))
        if self.kind == "extended" and self.inner.is_finite:
            return [NEG_INF] + self.inner.elements() + [POS_INF]
        raise ValueError("infinite poset has no finite element list")

    @property
    def minimum(self):
        if self.kind == "chain":
            return 0
        if self.kind == "extended":
            return NEG_INF
        return None

    @property
    def maximum(self):
        if self.kind == "chain":
            return self.size - 1
        if self.kind == "extended":
            return POS_INF
        return None

    def __str__(self) -> str:
        if self.kind == "integers":
            return "Z"
        if self.kind == "chain":
            return f"Chain({self.size})"
        return f"Extended({self.inner})"


INTEGERS = ZPoset("integers")


def finite_chain(k: int) -> ZPoset:
    return ZPoset("chain", k)


def extended(P: ZPoset) -> ZPoset:
    return ZPoset("extended", inner=P)


def act(P: ZPoset, x, n: int):
    """``x + n``: the ``n``-fold successor (or inverse successor)."""
    P._require(x)
    if P.kind == "integers":
        return x + n
    if P.kind == "chain":
        return x
    if x in (NEG_INF, POS_INF):
        return x
    return act(P.inner, x, n)


def is_fixed_point(P: ZPoset, x) -> bool:
    return act(P, x, 1) == x


@dataclass(frozen=True)
class ZPosetMap:
    """Z-equivariant monotone map.

    Maps out of the integers are stored by their base point ``phi(0)``;
    maps out of finite posets by an explicit table; maps out of an extended
    poset by the inner map plus the images of ``-inf`` and ``+inf``.
    """

    source: ZPoset
    target: ZPoset
    base: object = None
    table: tuple = ()
    inner: "ZPosetMap | None" = None
    ends: tuple = ()

    def __call__(self, x):
        self.source._require(x)
        if self.source.kind == "integers":
            return act(self.target, self.base, x)
        if self.source.kind == "chain":
            return dict(self.table)[x]
        if x == NEG_INF:
            return self.ends[0]
        if x == POS_INF:
            return self.ends[1]
        return self.inner(x)

    @property
    def injective(self) -> bool:
        if self.source.kind == "integers":
            return not is_fixed_point(self.target, self.base)
        els = self.source.elements()
        return len({self(x) for x in els}) == len(els)

    @property
    def behaviour(self) -> str:
        return "injective" if self.injective else "constant"

    def sample(self, radius: int = 5) -> list:
        if self.source.kind == "integers":
            return list(range(-radius, radius + 1))
        if self.source.is_finite:
            return self.source.elements()
        return [NEG_INF] + list(range(-radius, radius + 1)) + [POS_INF]

    def is_monotone(self, radius: int = 5) -> bool:
        pts = self.sample(radius)
        return all(self.target.leq(self(x), self(y)) for x in pts for y in pts if x <= y)

    def is_equivariant(self, radius: int = 5) -> bool:
        pts = self.sample(radius)
        return all(self(act(self.source, x, n)) == act(self.target, self(x), n)
                   for x in pts for n in (-2, -1, 1, 2)
                   if self.source.contains(act(self.source, x, n)))


def embed_element(P: ZPoset, x) -> ZPosetMap:
    """The equivariant map ``Z -> P``, ``n -> x + n``."""
    P._require(x)
    return ZPosetMap(INTEGERS, P, base=x)


def extend_map(phi: ZPosetMap, target: ZPoset | None = None) -> ZPosetMap:
    """Extend ``phi: P -> Q`` to ``P + {-inf, +inf} -> Q`` sending the ends to ``min Q`` and ``max Q``."""
    Q = target or phi.target
    lo, hi = Q.minimum, Q.maximum
    if lo is None or hi is None:
        raise ValueError(f"target {Q} lacks a minimum or a maximum")
    if phi.source.kind == "extended":
        raise ValueError("map is already defined on an extended poset")
    inner = phi if Q == phi.target else ZPosetMap(phi.source, Q, phi.base, phi.table)
    return ZPosetMap(extended(phi.source), Q, inner=inner, ends=(lo, hi))


# --- exhaustive checks on finite posets -----------------------------------------------

def valid_successors(elements: Sequence[Hashable], leq: Callable) -> list[dict]:
    """All order automorphisms ``rho`` with ``x <= rho(x)`` for every ``x``."""
    out = []
    for perm in itertools.permutations(elements):
        rho = dict(zip(elements, perm))
        if not all(leq(x, rho[x]) for x in elements):
            continue
        if all(leq(x, y) == leq(rho[x], rho[y]) for x in elements for y in elements):
            out.append(rho)
    return out


def chain_order(k: int) -> tuple[list[int], Callable]:
    return list(range(k)), lambda a, b: a <= b


def all_partial_orders(k: int) -> Iterable[frozenset]:
    """Every partial order on ``range(k)`` as a set of strict pairs ``(a, b)``, ``a < b``."""
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
    seen = set()
    for mask in range(1 << len(pairs)):
        rel = frozenset(pr for i, pr in enumerate(pairs) if mask >> i & 1)
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        if rel not in seen:
            seen.add(rel)
            yield rel


def only_identity_action(elements: Sequence[Hashable], leq: Callable) -> bool:
    sols = valid_successors(elements, leq)
    return len(sols) == 1 and all(r == x for x, r in sols[0].items())
