"""Exact linear algebra over prime fields F_p.

Matrices are numpy int64 arrays whose entries are least non-negative
residues mod p.  Subspaces are row spaces kept in reduced row echelon
form, so two subspaces are equal as sets exactly when their stored
bases are equal entry-for-entry.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np


class Prime(int):
    """A positive integer verified prime (trial division) at construction."""

    def __new__(cls, p):
        p = int(p)
        if p < 2:
            raise ValueError("p must be a prime >= 2, got %d" % p)
        d = 2
        while d * d <= p:
            if p % d == 0:
                raise ValueError("p = %d is not prime (divisible by %d)" % (p, d))
            d += 1
        return super().__new__(cls, p)


def mod_p(a, p: int) -> np.ndarray:
    """Reduce an array-like to least non-negative residues mod p."""
    return np.asarray(a, dtype=np.int64) % p


def inv_mod(a: int, p: int) -> int:
    """Multiplicative inverse of a mod p (p prime, a not divisible by p)."""
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % p)
    return pow(a, p - 2, p)


def rref_mod(mat, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form of `mat` over F_p.

    Returns (R, pivot_columns).  R contains no zero rows; its row space
    equals that of `mat`.  Elimination is deterministic (leftmost pivot,
    topmost candidate row), so R is a canonical form of the row space.
    """
    a = mod_p(mat, p)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    a = a.copy()
    nrows, ncols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        rows = np.nonzero(a[r:, c])[0]
        if rows.size == 0:
            continue
        i = r + int(rows[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * inv_mod(a[r, c], p)) % p
        other = np.nonzero(a[:, c])[0]
        for j in other:
            if j != r:
                a[j] = (a[j] - a[j, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def nullspace_mod(mat, p: int) -> np.ndarray:
    """Basis rows of {v : mat @ v = 0} over F_p (the right kernel)."""
    a = mod_p(mat, p)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    ncols = a.shape[1]
    red, pivots = rref_mod(a, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-red[i, c]) % p
    return basis


def solve_mod(mat, rhs, p: int) -> Optional[np.ndarray]:
    """A particular solution x of mat @ x = rhs over F_p, or None."""
    a = mod_p(mat, p)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    b = mod_p(rhs, p).reshape(-1)
    if b.shape[0] != a.shape[0]:
        raise ValueError("rhs length %d != row count %d" % (b.shape[0], a.shape[0]))
    ncols = a.shape[1]
    aug = np.hstack([a, b.reshape(-1, 1)])
    red, pivots = rref_mod(aug, p)
    if ncols in pivots:
        return None  # a row reduced to 0 = 1: inconsistent
    x = np.zeros(ncols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = red[i, ncols]
    return x


class FpMatrix:
    """An exact matrix over F_p; entries stored reduced in [0, p)."""

    __slots__ = ("p", "a")

    def __init__(self, p, entries, shape=None):
        self.p = p if isinstance(p, Prime) else Prime(p)
        a = np.asarray(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError("FpMatrix needs a 2-d array, got ndim=%d" % a.ndim)
        a = a % self.p
        a.setflags(write=False)
        self.a = a

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return "FpMatrix(p=%d, %r)" % (self.p, self.a.tolist())


class Subspace:
    """Row space of a matrix over F_p, stored as an RREF basis.

    The stored basis has no zero rows and pivot columns that are 1 in
    their own row and 0 elsewhere; two Subspaces are equal as sets iff
    their bases compare equal.
    """

    __slots__ = ("p", "ambient_dim", "basis", "pivots")

    def __init__(self, p, ambient_dim: int, rows=None):
        self.p = p if isinstance(p, Prime) else Prime(p)
        self.ambient_dim = int(ambient_dim)
        if rows is None:
            rows = np.zeros((0, self.ambient_dim), dtype=np.int64)
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size == 0:
            rows = rows.reshape(rows.shape[0] if rows.ndim == 2 else 0,
                                self.ambient_dim)
        else:
            rows = rows.reshape(-1, self.ambient_dim)
        basis, pivots = rref_mod(rows, self.p)
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def zero(cls, p, ambient_dim: int) -> "Subspace":
        return cls(p, ambient_dim)

    @classmethod
    def full(cls, p, ambient_dim: int) -> "Subspace":
        return cls(p, ambient_dim, np.eye(ambient_dim, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, v) -> bool:
        """Membership test by reduction against the RREF basis."""
        r = mod_p(v, self.p).reshape(-1)
        if r.shape[0] != self.ambient_dim:
            raise ValueError("vector length %d != ambient %d" % (r.shape[0], self.ambient_dim))
        r = r.copy()
        for i, c in enumerate(self.pivots):
            if r[c]:
                r = (r - r[c] * self.basis[i]) % self.p
        return not r.any()

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def reduce(self, v) -> np.ndarray:
        """Canonical coset representative of v modulo this subspace."""
        r = mod_p(v, self.p).reshape(-1).copy()
        for i, c in enumerate(self.pivots):
            if r[c]:
                r = (r - r[c] * self.basis[i]) % self.p
        return r

    def annihilator(self) -> "Subspace":
        """{w : v . w = 0 for all v here} under the plain dot product."""
        return Subspace(self.p, self.ambient_dim, nullspace_mod(self.basis, self.p))

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and self.basis.shape == other.basis.shape
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self):
        return "Subspace(p=%d, n=%d, rows=%r)" % (self.p, self.ambient_dim, self.basis.tolist())


def rref(m: FpMatrix) -> Tuple[FpMatrix, List[int]]:
    """RREF of an FpMatrix; returns (reduced matrix, pivot columns)."""
    red, piv = rref_mod(m.a, m.p)
    return FpMatrix(m.p, red.reshape(-1, m.cols)), piv


def kernel(m: FpMatrix) -> Subspace:
    """{v : m v^T = 0} as a Subspace of F_p^cols."""
    return Subspace(m.p, m.cols, nullspace_mod(m.a, m.p))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection of two subspaces of the same ambient space."""
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise ValueError("subspace mismatch: F_%d^%d vs F_%d^%d"
                         % (a.p, a.ambient_dim, b.p, b.ambient_dim))
    # v in both spaces  <=>  v is killed by both annihilators.
    constraints = np.vstack([a.annihilator().basis, b.annihilator().basis])
    return Subspace(a.p, a.ambient_dim, nullspace_mod(constraints, a.p))


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    """Span of the union of two subspaces."""
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise ValueError("subspace mismatch: F_%d^%d vs F_%d^%d"
                         % (a.p, a.ambient_dim, b.p, b.ambient_dim))
    return Subspace(a.p, a.ambient_dim, np.vstack([a.basis, b.basis]))


def solve_affine(m: FpMatrix, rhs) -> Optional[np.ndarray]:
    """Particular solution of m x = rhs, or None when the system is empty."""
    return solve_mod(m.a, rhs, m.p)
