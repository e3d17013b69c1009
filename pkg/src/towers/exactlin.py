"""Dense linear algebra over a prime field F_p.

Every matrix carries its modulus.  Entries are stored as a read-only
``int64`` numpy array with values in ``[0, p)``; arithmetic reduces mod p
after every operation, so products never overflow for the small primes this
package is meant for (p**2 * n well below 2**63).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Matrix:
    """Immutable dense matrix over F_p.

    Empty shapes (zero rows or zero columns) are legal and every operation
    below is total on them.
    """

    __slots__ = ("_a", "p")

    def __init__(self, entries, p: int = 2, shape: tuple[int, int] | None = None):
        if not is_prime(p):
            raise ValueError(f"modulus must be prime, got {p}")
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        elif a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError(f"matrix entries must be two-dimensional, got ndim={a.ndim}")
        a = np.mod(a, p)
        a.setflags(write=False)
        self._a = a
        self.p = p

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> "Matrix":
        # trusted constructor: a is already reduced mod p and two-dimensional
        m = object.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.setflags(write=False)
        m._a = a
        m.p = p
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = 2) -> "Matrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int = 2) -> "Matrix":
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def modulus(self) -> int:
        return self.p

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a.ravel())

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self._a.T, self.p)

    def is_zero(self) -> bool:
        return not self._a.any()

    def _check(self, other: "Matrix") -> None:
        if self.p != other.p:
            raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch for product: {self.shape} @ {other.shape}")
        return Matrix._wrap((self._a @ other._a) % self.p, self.p)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for sum: {self.shape} + {other.shape}")
        return Matrix._wrap((self._a + other._a) % self.p, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch for difference: {self.shape} - {other.shape}")
        return Matrix._wrap((self._a - other._a) % self.p, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap((-self._a) % self.p, self.p)

    def scale(self, c: int) -> "Matrix":
        return Matrix._wrap((self._a * (c % self.p)) % self.p, self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and np.array_equal(self._a, other._a)

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self._a.tolist()}, p={self.p}, shape={self.shape})"


def hstack(blocks: Sequence[Matrix], rows: int | None = None, p: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(rows or 0, 0, p or 2)
    return Matrix._wrap(np.hstack([b.array for b in blocks]), blocks[0].p)


def vstack(blocks: Sequence[Matrix], cols: int | None = None, p: int | None = None) -> Matrix:
    if not blocks:
        return Matrix.zeros(0, cols or 0, p or 2)
    return Matrix._wrap(np.vstack([b.array for b in blocks]), blocks[0].p)


def block_diag(blocks: Sequence[Matrix], p: int = 2) -> Matrix:
    if blocks:
        p = blocks[0].p
    r = sum(b.rows for b in blocks)
    c = sum(b.cols for b in blocks)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i:i + b.rows, j:j + b.cols] = b.array
        i += b.rows
        j += b.cols
    return Matrix._wrap(out, p)


def kron(a: Matrix, b: Matrix) -> Matrix:
    a._check(b)
    return Matrix._wrap(np.kron(a.array, b.array) % a.p, a.p)


# --- elimination kernel ---------------------------------------------------

def _rref(a: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a copy of ``a``; pivots are searched only in the first ``ncols`` columns."""
    r = np.array(a, dtype=np.int64, copy=True)
    nrows, total = r.shape
    ncols = total if ncols is None else ncols
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.flatnonzero(r[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        lead = int(r[row, col])
        if lead != 1:
            r[row] = (r[row] * pow(lead, -1, p)) % p
        factors = r[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            r[hit] = (r[hit] - np.outer(factors[hit], r[row])) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rref_with_pivots(A: Matrix) -> tuple[Matrix, int, list[int]]:
    """Reduced row-echelon form, rank and pivot columns of ``A``."""
    r, piv = _rref(A.array, A.p)
    return Matrix._wrap(r, A.p), len(piv), piv


def rank(A: Matrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return len(_rref(A.array, A.p)[1])


def kernel_basis(A: Matrix) -> Matrix:
    """Columns form a basis of ``{x : A x = 0}``, one per free variable."""
    n = A.cols
    r, piv = _rref(A.array, A.p)
    free = [j for j in range(n) if j not in set(piv)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for k, j in enumerate(free):
        K[j, k] = 1
        for i, pc in enumerate(piv):
            K[pc, k] = (-r[i, j]) % A.p
    return Matrix._wrap(K, A.p)


def solve_linear(A: Matrix, b: Matrix) -> Matrix | None:
    """Some ``x`` with ``A x = b`` or ``None``.

    ``b`` may carry several columns; the answer then solves all of them at
    once (``None`` if any column is inconsistent).  Free variables are set
    to zero, so the answer is a deterministic function of ``(A, b)``.
    """
    A._check(b)
    if b.rows != A.rows:
        raise ValueError(f"shape mismatch: A is {A.shape}, b has {b.rows} rows")
    aug = np.hstack([A.array, b.array])
    r, piv = _rref(aug, A.p, ncols=A.cols)
    rk = len(piv)
    if r[rk:, A.cols:].any():
        return None
    x = np.zeros((A.cols, b.cols), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, A.cols:]
    return Matrix._wrap(x, A.p)


def cokernel_projection(A: Matrix) -> Matrix:
    """Surjection ``Q`` (rows independent) with ``ker Q = im A``."""
    return kernel_basis(A.T).T


def right_inverse(A: Matrix) -> Matrix:
    """``S`` with ``A S = I`` for ``A`` of full row rank."""
    S = solve_linear(A, Matrix.identity(A.rows, A.p))
    if S is None:
        raise ValueError("matrix is not surjective; no right inverse")
    return S


def left_inverse(A: Matrix) -> Matrix:
    """``L`` with ``L A = I`` for ``A`` of full column rank."""
    return right_inverse(A.T).T


def inverse(A: Matrix) -> Matrix:
    if A.rows != A.cols:
        raise ValueError("only square matrices are invertible")
    return right_inverse(A)


def column_space_complement(B: Matrix, K: Matrix) -> list[int]:
    """Indices of columns of ``K`` extending a basis of ``span(B)`` to ``span(B, K)``."""
    joint = hstack([B, K]) if B.cols else K
    _, piv = _rref(joint.array, joint.p)
    return [c - B.cols for c in piv if c >= B.cols]


def vector(values: Iterable[int], p: int) -> Matrix:
    vals = list(values)
    return Matrix(np.array(vals, dtype=np.int64).reshape(len(vals), 1), p)
