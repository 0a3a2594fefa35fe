"""Affine relations over F_p, composed relationally.

A relation n -> m is a possibly-empty affine subspace of F_p^n (+) F_p^m.
It is stored homogenized: as the linear subspace of F_p^(n+m+1) spanned
by (x, y, 1) over the relation's points, with the homogenizing
coordinate h last.  The pairs of the relation are exactly the vectors of
the subspace with h = 1.  The empty relation is stored canonically as
the zero subspace (no vector has h = 1).  Keeping the stored basis in
RREF makes equality of relations a bitwise comparison.

Coordinates are ordered: input wires left-to-right, then output wires
left-to-right, then h.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .linalg import Prime, Subspace, mod_p, nullspace_mod


class ShiftedRelationError(ValueError):
    """Raised when an operation defined for linear relations gets a shifted one."""


class AffineRelation:
    __slots__ = ("p", "dom", "cod", "rep")

    def __init__(self, p, dom: int, cod: int, rep: Subspace):
        self.p = p if isinstance(p, Prime) else Prime(p)
        self.dom = int(dom)
        self.cod = int(cod)
        if rep.ambient_dim != self.dom + self.cod + 1:
            raise ValueError("rep ambient %d != dom+cod+1 = %d"
                             % (rep.ambient_dim, self.dom + self.cod + 1))
        if rep.dim and not rep.basis[:, -1].any():
            # no vector with h != 0: the relation holds of no point
            rep = Subspace.zero(self.p, rep.ambient_dim)
        self.rep = rep

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, p, dom, cod, rows) -> "AffineRelation":
        """Relation whose homogenized representation is spanned by `rows`."""
        return cls(p, dom, cod, Subspace(p, dom + cod + 1, rows))

    @classmethod
    def from_constraints(cls, p, dom, cod, coeffs, consts) -> "AffineRelation":
        """The relation {v : coeffs . v = consts} on dom+cod coordinates."""
        p = p if isinstance(p, Prime) else Prime(p)
        width = dom + cod
        b = mod_p(consts, p).reshape(-1)
        a = mod_p(coeffs, p)
        if a.size == 0:
            a = np.zeros((b.shape[0], width), dtype=np.int64)
        else:
            a = a.reshape(-1, width)
        if b.shape[0] != a.shape[0]:
            raise ValueError("constraint count mismatch")
        # points (v, 1) satisfy coeffs.v - consts*h = 0
        sys = np.hstack([a, (-b.reshape(-1, 1)) % p])
        return cls(p, dom, cod, Subspace(p, width + 1, nullspace_mod(sys, p)))

    # -- inspection ---------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.rep.dim == 0

    @property
    def is_linear(self) -> bool:
        """True when the relation holds of the zero point (and is nonempty)."""
        if self.is_empty:
            return False
        z = np.zeros(self.rep.ambient_dim, dtype=np.int64)
        z[-1] = 1
        return self.rep.contains(z)

    def constraint_rows(self) -> np.ndarray:
        """Rows (c | d) such that the relation is {v : c . v + d = 0}."""
        if self.rep.dim == 0:
            return np.eye(self.dom + self.cod + 1, dtype=np.int64)
        return nullspace_mod(self.rep.basis, self.p)

    def point(self) -> Optional[np.ndarray]:
        """A particular (x, y) point of the relation, or None when empty."""
        if self.is_empty:
            return None
        from .linalg import inv_mod
        for row in self.rep.basis:
            if row[-1]:
                return (row[:-1] * inv_mod(row[-1], self.p)) % self.p
        raise AssertionError("non-empty relation without an h != 0 row")

    def shift_and_linear(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Decompose into (particular point, linear-part basis rows)."""
        pt = self.point()
        if pt is None:
            return None
        hom_pt = np.append(pt, 1)
        rows = (self.rep.basis - np.outer(self.rep.basis[:, -1], hom_pt)) % self.p
        lin = Subspace(self.p, self.dom + self.cod, rows[:, :-1])
        return pt, lin.basis

    def __eq__(self, other):
        return (
            isinstance(other, AffineRelation)
            and self.p == other.p
            and self.dom == other.dom
            and self.cod == other.cod
            and self.rep == other.rep
        )

    def __hash__(self):
        return hash((self.p, self.dom, self.cod, self.rep))

    def __repr__(self):
        return "AffineRelation(p=%d, %d->%d, rep=%r)" % (
            self.p, self.dom, self.cod, self.rep.basis.tolist())


# ---------------------------------------------------------------------------
# prop structure


def identity(p, n: int) -> AffineRelation:
    """{(x, x)} on n wires."""
    coeffs = np.hstack([np.eye(n, dtype=np.int64), -np.eye(n, dtype=np.int64)])
    return AffineRelation.from_constraints(p, n, n, coeffs, np.zeros(n, dtype=np.int64))


def empty(p, dom: int, cod: int) -> AffineRelation:
    return AffineRelation(p, dom, cod, Subspace.zero(p, dom + cod + 1))


def total(p, dom: int, cod: int) -> AffineRelation:
    return AffineRelation(p, dom, cod, Subspace.full(p, dom + cod + 1))


def compose(r: AffineRelation, s: AffineRelation) -> AffineRelation:
    """Relational composite: r then s.

    {(x, z) : exists y with (x, y) in r and (y, z) in s}.  Formed by
    stacking both relations' defining equations over the joint
    coordinates (x, y, z, h), solving exactly, and projecting y away.
    """
    if r.p != s.p:
        raise ValueError("field mismatch: p=%d vs p=%d" % (r.p, s.p))
    if r.cod != s.dom:
        raise ValueError("arity mismatch: cod %d vs dom %d" % (r.cod, s.dom))
    p, n, m, l = r.p, r.dom, r.cod, s.cod
    cr = r.constraint_rows()
    cs = s.constraint_rows()
    sys = np.zeros((cr.shape[0] + cs.shape[0], n + m + l + 1), dtype=np.int64)
    sys[:cr.shape[0], :n + m] = cr[:, :-1]
    sys[:cr.shape[0], -1] = cr[:, -1]
    sys[cr.shape[0]:, n:n + m + l] = cs[:, :-1]
    sys[cr.shape[0]:, -1] = cs[:, -1]
    joint = nullspace_mod(sys, p)
    keep = list(range(n)) + list(range(n + m, n + m + l + 1))
    return AffineRelation(p, n, l, Subspace(p, n + l + 1, joint[:, keep]))


def compose_all(*rels: AffineRelation) -> AffineRelation:
    out = rels[0]
    for r in rels[1:]:
        out = compose(out, r)
    return out


def tensor(r: AffineRelation, s: AffineRelation) -> AffineRelation:
    """Direct sum: inputs (x, x'), outputs (y, y')."""
    if r.p != s.p:
        raise ValueError("field mismatch: p=%d vs p=%d" % (r.p, s.p))
    p = r.p
    n1, m1, n2, m2 = r.dom, r.cod, s.dom, s.cod
    cr = r.constraint_rows()
    cs = s.constraint_rows()
    width = n1 + n2 + m1 + m2 + 1
    sys = np.zeros((cr.shape[0] + cs.shape[0], width), dtype=np.int64)
    sys[:cr.shape[0], :n1] = cr[:, :n1]
    sys[:cr.shape[0], n1 + n2:n1 + n2 + m1] = cr[:, n1:n1 + m1]
    sys[:cr.shape[0], -1] = cr[:, -1]
    sys[cr.shape[0]:, n1:n1 + n2] = cs[:, :n2]
    sys[cr.shape[0]:, n1 + n2 + m1:-1] = cs[:, n2:n2 + m2]
    sys[cr.shape[0]:, -1] = cs[:, -1]
    joint = nullspace_mod(sys, p)
    return AffineRelation(p, n1 + n2, m1 + m2, Subspace(p, width, joint))


def tensor_all(*rels: AffineRelation) -> AffineRelation:
    out = rels[0]
    for r in rels[1:]:
        out = tensor(out, r)
    return out


def converse(r: AffineRelation) -> AffineRelation:
    """Swap the input and output blocks."""
    n, m = r.dom, r.cod
    perm = list(range(n, n + m)) + list(range(n)) + [n + m]
    return AffineRelation(r.p, m, n, Subspace(r.p, n + m + 1, r.rep.basis[:, perm]))


def negate_coords(r: AffineRelation, indices) -> AffineRelation:
    """Negate the listed coordinates (of the dom+cod flattening)."""
    rows = r.rep.basis.copy()
    for i in indices:
        rows[:, i] = (-rows[:, i]) % r.p
    return AffineRelation(r.p, r.dom, r.cod, Subspace(r.p, r.dom + r.cod + 1, rows))


def ortho_complement(r: AffineRelation) -> AffineRelation:
    """Orthogonal complement of a linear relation under the dot product.

    The empty relation maps to itself; a non-empty relation with a
    nonzero shift has no defined complement here and raises
    ShiftedRelationError.
    """
    if r.is_empty:
        return empty(r.p, r.dom, r.cod)
    if not r.is_linear:
        raise ShiftedRelationError(
            "orthogonal complement is defined for linear relations only")
    _, lin = r.shift_and_linear()
    comp = nullspace_mod(lin, r.p)
    rows = np.zeros((comp.shape[0] + 1, r.dom + r.cod + 1), dtype=np.int64)
    rows[:-1, :-1] = comp
    rows[-1, -1] = 1
    return AffineRelation(r.p, r.dom, r.cod, Subspace(r.p, r.dom + r.cod + 1, rows))


def equal(r: AffineRelation, s: AffineRelation) -> bool:
    if r.p != s.p or r.dom != s.dom or r.cod != s.cod:
        raise ValueError("cannot compare relations of different shape")
    return r == s


def subset(r: AffineRelation, s: AffineRelation) -> bool:
    """Containment of r's point set in s's.

    Equivalent to containment of the homogenized row spaces, which the
    stored form answers directly.
    """
    if r.p != s.p or r.dom != s.dom or r.cod != s.cod:
        raise ValueError("cannot compare relations of different shape")
    return s.rep.contains_space(r.rep)


def image(r: AffineRelation) -> AffineRelation:
    """The 0 -> cod state of all outputs reachable from some input."""
    return compose(total(r.p, 0, r.dom), r)


def coimage(r: AffineRelation) -> AffineRelation:
    return image(converse(r))


# ---------------------------------------------------------------------------
# generators


def z_spider(p, n_in: int, n_out: int) -> AffineRelation:
    """All incident wires carry the same value."""
    k = n_in + n_out
    rows = np.zeros((max(k - 1, 0), k), dtype=np.int64)
    for i in range(k - 1):
        rows[i, i] = 1
        rows[i, i + 1] = -1
    return AffineRelation.from_constraints(p, n_in, n_out, rows,
                                           np.zeros(max(k - 1, 0), dtype=np.int64))


def x_spider(p, n_in: int, n_out: int, a=0) -> AffineRelation:
    """Sum of outputs minus sum of inputs equals the phase a."""
    row = np.array([[-1] * n_in + [1] * n_out], dtype=np.int64)
    return AffineRelation.from_constraints(p, n_in, n_out, row, [a])


def scalar(p, a) -> AffineRelation:
    """{(x, a x)}; a = 0 is the collapse-to-zero relation, still total on inputs."""
    return AffineRelation.from_constraints(p, 1, 1, [[a, -1]], [0])


def co_scalar(p, a) -> AffineRelation:
    """{(a y, y)}: the converse of scalar(a)."""
    return AffineRelation.from_constraints(p, 1, 1, [[1, -a]], [0])


def affine_unit(p) -> AffineRelation:
    """The point {1} as a state on one wire."""
    return AffineRelation.from_constraints(p, 0, 1, [[1]], [1])


def cup_z(p) -> AffineRelation:
    """0 -> 2 bent identity: {(t, t)}."""
    return AffineRelation.from_constraints(p, 0, 2, [[1, -1]], [0])


def cap_z(p) -> AffineRelation:
    return AffineRelation.from_constraints(p, 2, 0, [[1, -1]], [0])


def cup_x(p) -> AffineRelation:
    """0 -> 2 X-coloured cup: {(t, -t)}."""
    return AffineRelation.from_constraints(p, 0, 2, [[1, 1]], [0])


def cap_x(p) -> AffineRelation:
    return AffineRelation.from_constraints(p, 2, 0, [[1, 1]], [0])


def swap(p) -> AffineRelation:
    return permutation_relation(p, [1, 0])


def permutation_relation(p, perm) -> AffineRelation:
    """n -> n wiring with output i reading input perm[i]."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation: %r" % (perm,))
    rows = np.zeros((n, 2 * n), dtype=np.int64)
    for i, j in enumerate(perm):
        rows[i, j] = -1
        rows[i, n + i] = 1
    return AffineRelation.from_constraints(p, n, n, rows, np.zeros(n, dtype=np.int64))


_GENERATORS = {
    "z_spider": lambda p, n_in=1, n_out=1: z_spider(p, n_in, n_out),
    "x_spider": lambda p, n_in=1, n_out=1, a=0: x_spider(p, n_in, n_out, a),
    "scalar": lambda p, a: scalar(p, a),
    "co_scalar": lambda p, a: co_scalar(p, a),
    "affine_unit": lambda p: affine_unit(p),
    "cup_z": lambda p: cup_z(p),
    "cap_z": lambda p: cap_z(p),
    "cup_x": lambda p: cup_x(p),
    "cap_x": lambda p: cap_x(p),
    "swap": lambda p: swap(p),
}


def generator(p, kind: str, **params) -> AffineRelation:
    """Generator lookup by name; the vocabulary of layer-1 diagrams."""
    try:
        make = _GENERATORS[kind]
    except KeyError:
        raise ValueError("unknown generator kind %r" % kind) from None
    return make(p, **params)
