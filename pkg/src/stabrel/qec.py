"""Stabilizer codes over F_p as coisotropic subspaces, with correction.

A code on n qudits with k logical wires is a coisotropic affine subspace
S = L + a of F_p^{2n} with dim S = n + k.  The encoder is the Lagrangian
isometry k -> n whose image is S, built by dilation().  Errors are Weyl
shifts e = (z | x); the syndrome pairs e against a declared ordered
basis g_1 .. g_{n-k} of L^omega.  Operationally the syndrome is the
classical output of the non-destructive measurement circuit

    U ; (measure the first n-k wires, keep the rest) ; U^-1

with U the recorded dilation circuit, followed by the change of basis
from the dilation's syndrome rows to the declared generators.  Both
readings agree: the measured outcome on wire j is omega(b_j, -) with
b_j = U^-1 e_zj.

Correction tables map syndromes to errors.  verify_correction replays
the protocol relationally, one branch per error: encode, corrupt,
measure, subtract the tabulated correction, decode, and compare with the
identity channel beside the pinned classical outcome.  Linear tables
never need the branching: affine_correction_protocol applies the
correction with a classically controlled Weyl shift, keeping the whole
protocol a single relation.

File formats (both plain text, `#` comments, blank lines ignored):

  code file      p=2 / n=3 / k=1 assignments, one stabilizer generator
                 per line as `z1,..,zn|x1,..,xn` with an optional
                 `|phase` field, and correction entries as
                 `s1,..,sd -> z1,..,zn|x1,..,xn`.
  subspace file  p= / n= assignments, an optional `shift z|x` line and
                 one basis row `z|x` per line.
"""

from __future__ import annotations

from collections import namedtuple
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import doubled as db
from . import relation as ar
from . import symplectic as sy
from .linalg import Subspace, mod_p, nullspace_mod, rref_mod, solve_mod


class StabilizerCode:
    """A coisotropic subspace together with its dilation data.

    syndrome_basis holds the declared generators g_1 .. g_{n-k} as rows;
    basis_change is the matrix C with g_i = sum_j C_ij b_j over the
    dilation's own syndrome rows b_j, so declared syndromes are C times
    the raw measured outcomes.
    """

    __slots__ = ("p", "n", "k", "subspace", "dilation", "syndrome_basis",
                 "basis_change", "_measure")

    def __init__(self, subspace: sy.GradedSubspace, dilation: sy.Dilation,
                 syndrome_basis: np.ndarray, basis_change: np.ndarray):
        self.subspace = subspace
        self.dilation = dilation
        self.p = int(subspace.space.p)
        self.n = subspace.space.n
        self.k = subspace.dim - subspace.space.n
        self.syndrome_basis = syndrome_basis
        self.basis_change = basis_change
        self._measure = None

    @property
    def d(self) -> int:
        """Number of syndrome wires."""
        return self.n - self.k

    @property
    def encoder(self) -> db.GradedRelation:
        return self.dilation.encoder

    def __repr__(self):
        return "StabilizerCode(p=%d, n=%d, k=%d)" % (self.p, self.n, self.k)


def code_from_subspace(s: sy.GradedSubspace,
                       generators=None) -> StabilizerCode:
    """Build a code from a coisotropic subspace.

    When `generators` is given (rows spanning L^omega, e.g. the rows of
    a code file) the syndrome components follow that order; otherwise
    the dilation's own syndrome rows are used.
    """
    kind = sy.classify(s)
    if kind not in ("coisotropic", "lagrangian"):
        raise ValueError("code subspace must be coisotropic, got %s" % kind)
    dil = sy.dilation(s)
    p, n = int(s.space.p), s.space.n
    d = n - (s.dim - n)
    if generators is None:
        basis = dil.syndrome_basis.copy()
        change = np.eye(d, dtype=np.int64)
    else:
        basis = mod_p(generators, p).reshape(-1, 2 * n)
        if basis.shape[0] != d:
            raise ValueError("expected %d generator rows, got %d"
                             % (d, basis.shape[0]))
        red, _ = rref_mod(basis, p)
        if red.shape[0] != d:
            raise ValueError("generator rows are linearly dependent")
        change = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            coeffs = solve_mod(dil.syndrome_basis.T, basis[i], p)
            if coeffs is None:
                raise ValueError("generator row %d is not a stabilizer of"
                                 " the subspace" % i)
            change[i] = coeffs
    return StabilizerCode(s, dil, basis, change)


def _classical_map(p, mat, shift=None) -> db.GradedRelation:
    """The graph {(c, mat c + shift)} on classical wires."""
    mat = mod_p(mat, p)
    m, k = mat.shape
    if shift is None:
        shift = np.zeros(m, dtype=np.int64)
    coeffs = np.hstack([mat, (-np.eye(m, dtype=np.int64)) % p])
    rel = ar.AffineRelation.from_constraints(p, k, m, coeffs,
                                             (-mod_p(shift, p)) % p)
    return db.lift_classical(rel)


def _nondestructive_measure(p) -> db.GradedRelation:
    """One-wire z-basis measurement that keeps the wire: the x grading is
    copied to the classical outcome while z decoheres."""
    rel = ar.AffineRelation.from_constraints(
        p, 2, 3, [[0, 1, 0, -1, 0], [0, 1, 0, 0, -1]], [0, 0])
    return db.GradedRelation(p, db.quantum_wires(1),
                             db.quantum_wires(1) + db.classical_wires(1), rel)


def measurement(code: StabilizerCode) -> db.GradedRelation:
    """The non-destructive syndrome measurement, n quantum wires in,
    n quantum wires and d classical outcomes out."""
    if code._measure is not None:
        return code._measure
    p, n, d = code.p, code.n, code.d
    if d == 0:
        code._measure = db.identity_relation(p, n)
        return code._measure
    u_rel = db.symplectomorphism_relation(p, code.dilation.matrix)
    u_inv = db.symplectomorphism_relation(p, code.dilation.inv_matrix)
    parts = [_nondestructive_measure(p)] * d
    if code.k:
        parts.append(db.identity_relation(p, code.k))
    blocks = db.retype(db.tensor_all(*parts),
                       cod=db.quantum_wires(n) + db.classical_wires(d))
    out = db.compose_all(
        u_rel, blocks,
        db.tensor(u_inv, db.identity_graded(p, db.classical_wires(d))))
    # change to the declared generator basis and subtract the uncorrupted
    # outcome, so the classical wires carry the syndrome itself
    offset = np.array([sy.omega(code.subspace.space, g, code.subspace.shift)
                       for g in code.syndrome_basis], dtype=np.int64)
    post = _classical_map(p, code.basis_change, (-offset) % p)
    code._measure = db.compose(
        out, db.tensor(db.identity_relation(p, n), post))
    return code._measure


def code_state(code: StabilizerCode) -> db.GradedRelation:
    """The code space as a state: the image of the maximally mixed input."""
    return db.compose(db.total_state(code.p, code.k), code.encoder)


def _classical_readout(state: db.GradedRelation, n: int, d: int) -> np.ndarray:
    """Discard n quantum wires of a (Q^n, C^d) state and read the point."""
    p = state.p
    parts = [db.discard(p)] * n
    parts.append(db.identity_graded(p, db.classical_wires(d)))
    cls = db.compose(state, db.tensor_all(*parts))
    if cls.rel.is_empty:
        raise ValueError("measurement produced the empty relation")
    if cls.rel.rep.dim != 1:
        raise ValueError("syndrome outcome is not deterministic")
    return cls.rel.point()


def syndrome(code: StabilizerCode, error) -> np.ndarray:
    """Classical outcome of the measurement circuit after the Weyl error.

    Zero on the uncorrupted code state and linear in the error."""
    p, n, d = code.p, code.n, code.d
    e = mod_p(error, p).reshape(-1)
    if e.shape[0] != 2 * n:
        raise ValueError("error vector has length %d, expected %d"
                         % (e.shape[0], 2 * n))
    if d == 0:
        return np.zeros(0, dtype=np.int64)
    corrupted = db.compose_all(code_state(code), db.weyl(p, e[:n], e[n:]),
                               measurement(code))
    return _classical_readout(corrupted, n, d)


def undetectable(code: StabilizerCode, error) -> bool:
    """True when the error commutes with every stabilizer.

    Computed from the syndrome circuit and cross-checked against
    membership in the linear part of the code subspace (the joint
    normalizer of the stabilizers, i.e. the omega-complement of their
    span).
    """
    p, n = code.p, code.n
    e = mod_p(error, p).reshape(-1)
    by_circuit = not syndrome(code, e).any()
    by_form = code.subspace.linear.contains(e)
    if by_circuit != by_form:
        raise AssertionError("syndrome circuit disagrees with the form")
    return by_circuit


CorrectionCheck = namedtuple("CorrectionCheck",
                             ["error", "syndrome", "ok", "reason"])


class CorrectionTable:
    """A syndrome -> error lookup with its affine structure, if any.

    entries maps syndrome tuples (length d) to correction vectors
    (length 2n).  When every entry fits a single affine map f the matrix
    and shift of f are recorded; tables used inside the one-shot
    protocol must in addition fix the zero syndrome (f(0) = 0).
    """

    __slots__ = ("p", "n", "d", "entries", "matrix", "shift")

    def __init__(self, p, n: int, d: int, entries: Dict[tuple, Sequence[int]]):
        self.p = int(p)
        self.n = int(n)
        self.d = int(d)
        self.entries = {}
        for key, value in entries.items():
            key = tuple(int(c) % self.p for c in key)
            if len(key) != self.d:
                raise ValueError("syndrome %r has length %d, expected %d"
                                 % (key, len(key), self.d))
            value = mod_p(value, self.p).reshape(-1)
            if value.shape[0] != 2 * self.n:
                raise ValueError("correction for %r has length %d, expected %d"
                                 % (key, value.shape[0], 2 * self.n))
            self.entries[key] = value
        zero = (0,) * self.d
        if zero in self.entries and self.entries[zero].any():
            raise ValueError("the zero syndrome must map to the zero error")
        self.matrix, self.shift = self._fit_affine()

    def _fit_affine(self):
        """Fit entries to e = F s + t; None, None when no fit exists."""
        if not self.entries:
            return None, None
        keys = sorted(self.entries)
        lhs = np.array([list(k) + [1] for k in keys], dtype=np.int64)
        mat = np.zeros((2 * self.n, self.d), dtype=np.int64)
        shift = np.zeros(2 * self.n, dtype=np.int64)
        for i in range(2 * self.n):
            rhs = np.array([self.entries[k][i] for k in keys], dtype=np.int64)
            sol = solve_mod(lhs, rhs, self.p)
            if sol is None:
                return None, None
            mat[i] = sol[:-1]
            shift[i] = sol[-1]
        return mat, shift

    @property
    def affine(self) -> bool:
        return self.matrix is not None

    def lookup(self, syndrome_vec) -> Optional[np.ndarray]:
        key = tuple(int(c) % self.p for c in np.asarray(syndrome_vec).reshape(-1))
        return self.entries.get(key)

    def __repr__(self):
        return "CorrectionTable(p=%d, n=%d, d=%d, %d entries%s)" % (
            self.p, self.n, self.d, len(self.entries),
            ", affine" if self.affine else "")


def verify_correction(code: StabilizerCode, table: CorrectionTable,
                      errors) -> List[CorrectionCheck]:
    """Replay the protocol for each error and report pass/fail.

    Per error e: encode, apply weyl(e), measure the syndrome, apply the
    tabulated correction weyl(-f(d)), decode.  The branch passes when
    the composite equals the identity channel beside the classical
    outcome pinned to d.
    """
    p, n, k, d = code.p, code.n, code.k, code.d
    id_cls = db.identity_graded(p, db.classical_wires(d))
    reports = []
    for error in errors:
        e = mod_p(error, p).reshape(-1)
        dvec = syndrome(code, e)
        e_key = tuple(int(v) for v in e)
        d_key = tuple(int(v) for v in dvec)
        corr = table.lookup(dvec)
        if corr is None:
            reports.append(CorrectionCheck(e_key, d_key, False,
                                           "no table entry"))
            continue
        branch = db.compose_all(
            code.encoder,
            db.weyl(p, e[:n], e[n:]),
            measurement(code),
            db.tensor(db.weyl(p, (-corr[:n]) % p, (-corr[n:]) % p), id_cls),
            db.tensor(db.dagger(code.encoder), id_cls))
        expected = db.tensor(db.identity_relation(p, k),
                             db.classical_point(p, dvec))
        if db.equal(branch, expected):
            reports.append(CorrectionCheck(e_key, d_key, True, ""))
        else:
            reports.append(CorrectionCheck(e_key, d_key, False,
                                           "residual error after correction"))
    return reports


def affine_correction_protocol(code: StabilizerCode, table,
                               error=None) -> db.GradedRelation:
    """The one-shot protocol for an affine table, as a single relation.

    Encode, measure, copy the classical outcome, feed one copy into a
    classically controlled Weyl correction, decode.  The result maps k
    logical wires to k logical wires beside the d syndrome wires.  An
    optional error is inserted after the encoder to replay a corrupted
    channel.
    """
    if isinstance(table, CorrectionTable):
        if not table.affine:
            raise ValueError("correction table is not affine")
        if table.shift.any():
            raise ValueError("affine protocol needs f(0) = 0")
        matrix = table.matrix
    else:
        matrix = np.asarray(table, dtype=np.int64)
    p, n, k, d = code.p, code.n, code.k, code.d
    matrix = mod_p(matrix, p)
    if matrix.shape != (2 * n, d):
        raise ValueError("correction matrix must be %dx%d" % (2 * n, d))
    stages = [code.encoder]
    if error is not None:
        e = mod_p(error, p).reshape(-1)
        stages.append(db.weyl(p, e[:n], e[n:]))
    stages.append(measurement(code))
    if d == 0:
        stages.append(db.dagger(code.encoder))
        return db.compose_all(*stages)
    copy = db.tensor_all(*[db.classical_z_spider(p, 1, 2)] * d)
    if d > 1:
        perm = [2 * i for i in range(d)] + [2 * i + 1 for i in range(d)]
        copy = db.compose(copy,
                          db.wire_permutation(p, db.classical_wires(2 * d), perm))
    id_cls = db.identity_graded(p, db.classical_wires(d))
    spread = db.compose(db.compose_all(*stages),
                        db.tensor(db.identity_relation(p, n), copy))
    spread = db.retype(spread, cod=(db.classical_wires(d)
                                    + db.quantum_wires(n)
                                    + db.classical_wires(d)))
    control = db.controlled_weyl(p, (-matrix[:n]) % p, (-matrix[n:]) % p)
    return db.compose_all(spread,
                          db.tensor(control, id_cls),
                          db.tensor(db.dagger(code.encoder), id_cls))


# ---------------------------------------------------------------------------
# file formats


def _strip_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _parse_ints(text: str, no: int) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError("line %d: expected comma-separated integers, got %r"
                         % (no, text))


def _parse_row(text: str, n: int, no: int, allow_phase: bool = False):
    """A `z|x` row of length n each, optionally with a trailing `|phase`."""
    parts = [part.strip() for part in text.split("|")]
    if len(parts) == 2:
        phase = 0
    elif len(parts) == 3 and allow_phase:
        phase = _parse_ints(parts[2], no)
        if len(phase) != 1:
            raise ValueError("line %d: phase must be a single value" % no)
        phase = phase[0]
    else:
        raise ValueError("line %d: expected z|x%s, got %r"
                         % (no, "[|phase]" if allow_phase else "", text))
    zvec = _parse_ints(parts[0], no)
    xvec = _parse_ints(parts[1], no)
    if len(zvec) != n or len(xvec) != n:
        raise ValueError("line %d: expected %d entries per block" % (no, n))
    return zvec + xvec, phase


def _parse_assignments(lines, names):
    values = {}
    rest = []
    for no, line in lines:
        key, sep, value = line.partition("=")
        key = key.strip()
        if sep and key in names:
            if key in values:
                raise ValueError("line %d: duplicate %s" % (no, key))
            try:
                values[key] = int(value.strip())
            except ValueError:
                raise ValueError("line %d: %s must be an integer" % (no, key))
        else:
            rest.append((no, line))
    return values, rest


def parse_code_file(text: str, p=None) -> Tuple[StabilizerCode,
                                                Optional[CorrectionTable]]:
    """Parse a code file into the code and its correction table, if any.

    A non-None `p` overrides the file's declared prime."""
    values, rest = _parse_assignments(_strip_lines(text), ("p", "n", "k"))
    if p is not None:
        values["p"] = int(p)
    for name in ("p", "n", "k"):
        if name not in values:
            raise ValueError("code file is missing %s=" % name)
    p, n, k = values["p"], values["n"], values["k"]
    space = sy.SymplecticSpace(p, n)
    gen_rows: List[List[int]] = []
    phases: List[int] = []
    entries: Dict[tuple, np.ndarray] = {}
    for no, line in rest:
        if "->" in line:
            left, _, right = line.partition("->")
            key = tuple(_parse_ints(left.strip(), no))
            row, _ = _parse_row(right.strip(), n, no)
            if key in entries:
                raise ValueError("line %d: duplicate syndrome %r" % (no, key))
            entries[key] = np.asarray(row, dtype=np.int64)
        else:
            row, phase = _parse_row(line, n, no, allow_phase=True)
            gen_rows.append(row)
            phases.append(phase)
    if len(gen_rows) != n - k:
        raise ValueError("expected %d generator rows, got %d"
                         % (n - k, len(gen_rows)))
    gens = mod_p(gen_rows, p).reshape(-1, 2 * n)
    if len(gen_rows):
        red, _ = rref_mod(gens, p)
        if red.shape[0] != gens.shape[0]:
            raise ValueError("generator rows are linearly dependent")
        # the subspace stabilized by the rows: omega(g_i, v) = phase_i
        coeffs = np.hstack([(-gens[:, n:]) % p, gens[:, :n]])
        linear = Subspace(p, 2 * n, nullspace_mod(coeffs, p))
        shift = solve_mod(coeffs, phases, p)
        if shift is None:
            raise ValueError("the generator phases are inconsistent")
    else:
        linear = Subspace.full(p, 2 * n)
        shift = None
    subspace = sy.GradedSubspace(space, shift, linear)
    code = code_from_subspace(subspace, generators=gens)
    table = CorrectionTable(p, n, n - k, entries) if entries else None
    return code, table


def parse_code_path(path, p=None) -> Tuple[StabilizerCode,
                                           Optional[CorrectionTable]]:
    with open(path) as handle:
        return parse_code_file(handle.read(), p=p)


def parse_subspace_file(text: str, p=None) -> sy.GradedSubspace:
    """Parse a subspace file: p=, n=, optional `shift z|x`, basis rows."""
    values, rest = _parse_assignments(_strip_lines(text), ("p", "n"))
    if p is not None:
        values["p"] = int(p)
    for name in ("p", "n"):
        if name not in values:
            raise ValueError("subspace file is missing %s=" % name)
    p, n = values["p"], values["n"]
    space = sy.SymplecticSpace(p, n)
    shift = None
    rows: List[List[int]] = []
    for no, line in rest:
        if line.startswith("shift"):
            if shift is not None:
                raise ValueError("line %d: duplicate shift" % no)
            row, _ = _parse_row(line[len("shift"):].strip(), n, no)
            shift = row
        else:
            row, _ = _parse_row(line, n, no)
            rows.append(row)
    linear = Subspace(p, 2 * n, mod_p(rows, p).reshape(-1, 2 * n))
    return sy.GradedSubspace(space, shift, linear)


def parse_subspace_path(path, p=None) -> sy.GradedSubspace:
    with open(path) as handle:
        return parse_subspace_file(handle.read(), p=p)


def parse_table_file(text: str, p, n: int, d: int) -> CorrectionTable:
    """Parse correction entries (`syndrome -> error` lines) into a table.

    Lines without an arrow are ignored, so a code file that embeds its
    table can be passed directly.
    """
    entries: Dict[tuple, np.ndarray] = {}
    for no, line in _strip_lines(text):
        if "->" not in line:
            continue
        left, _, right = line.partition("->")
        key = tuple(_parse_ints(left.strip(), no))
        row, _ = _parse_row(right.strip(), n, no)
        if key in entries:
            raise ValueError("line %d: duplicate syndrome %r" % (no, key))
        entries[key] = np.asarray(row, dtype=np.int64)
    return CorrectionTable(p, n, d, entries)


def parse_errors_file(text: str, n: int) -> List[np.ndarray]:
    """Parse an error list: one `z|x` row per line."""
    out = []
    for no, line in _strip_lines(text):
        row, _ = _parse_row(line, n, no)
        out.append(np.asarray(row, dtype=np.int64))
    return out


def parse_error(text: str, n: int) -> np.ndarray:
    """A single `z|x` error vector."""
    row, _ = _parse_row(text.strip(), n, 0)
    return np.asarray(row, dtype=np.int64)


def _format_vector(vec, n: int) -> str:
    vec = np.asarray(vec).reshape(-1)
    return "%s|%s" % (",".join(str(int(v)) for v in vec[:n]),
                      ",".join(str(int(v)) for v in vec[n:]))


def format_dilation(dil: sy.Dilation) -> str:
    """Serialize a dilation: header, gate list, product matrix, syndrome
    rows and the subspace shift."""
    space = dil.subspace.space
    p, n = int(space.p), space.n
    lines = ["p=%d" % p, "n=%d" % n, "m=%d" % dil.m, "d=%d" % dil.d]
    for gate in dil.gates:
        wires = ",".join(str(w) for w in gate.wires)
        if gate.kind in ("cadd", "phase"):
            lines.append("gate %s %s %d" % (gate.kind, wires, gate.coeff % p))
        else:
            lines.append("gate %s %s" % (gate.kind, wires))
    for row in dil.matrix:
        lines.append("matrix %s" % ",".join(str(int(v)) for v in row))
    for row in dil.syndrome_basis:
        lines.append("syndrome %s" % _format_vector(row, n))
    lines.append("shift %s" % _format_vector(dil.subspace.shift, n))
    return "\n".join(lines) + "\n"


def weight(error, n: int) -> int:
    """Number of wires an error touches."""
    e = np.asarray(error, dtype=np.int64).reshape(-1)
    return int(np.count_nonzero(e[:n] | e[n:]))
