"""Exact sparse linear algebra over Q or F_p.

Matrices are sparse maps (row, col) -> nonzero scalar.  Subspaces carry a
unique reduced-echelon basis, so two equal subspaces compare bit-identical
and every downstream object (kernels, quotient projectors, lifted
generators) is reproducible run to run.

The elimination engine keeps the basis fully reduced at every step with a
fixed leftmost-pivot rule.  Over Q it works on primitive integer rows
(fraction-free) and only converts to Fractions when a basis is finalised;
over F_p it works on ints mod p.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .fields import FieldConfig, DomainError


class ShapeError(ValueError):
    """Dimension or scalar-domain mismatch between exact objects."""


# ---------------------------------------------------------------------------
# elimination engines
# ---------------------------------------------------------------------------

class _EchelonQ:
    """Fully reduced echelon basis over Q, kept as primitive integer rows.

    Row invariants: integer entries with content 1, positive pivot entry,
    zero at every other pivot column.  The true RREF row is row/row[pivot].
    """

    def __init__(self, ambient: int):
        self.ambient = ambient
        self.rows: dict[int, dict[int, int]] = {}  # pivot col -> row

    @property
    def rank(self) -> int:
        return len(self.rows)

    @staticmethod
    def _to_int_vec(vec) -> dict[int, int]:
        # clear denominators, strip zeros
        den = 1
        for v in vec.values():
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        out = {}
        for k, v in vec.items():
            iv = int(v * den) if isinstance(v, Fraction) else int(v) * den
            if iv:
                out[k] = iv
        return out

    def _reduce_int(self, v: dict[int, int]) -> dict[int, int]:
        """One-shot reduction against the (fully reduced) basis."""
        rows = self.rows
        hits = [c for c in v if c in rows]
        for c in hits:
            a = v.pop(c, 0)
            if not a:
                continue
            row = rows[c]
            piv = row[c]
            if piv != 1:
                for k in v:
                    v[k] *= piv
            for k, rv in row.items():
                if k == c:
                    continue
                nk = v.get(k, 0) - a * rv
                if nk:
                    v[k] = nk
                else:
                    v.pop(k, None)
        return v

    @staticmethod
    def _make_primitive(v: dict[int, int]) -> None:
        g = 0
        for x in v.values():
            g = gcd(g, x)
            if g == 1:
                break
        if g > 1:
            for k in v:
                v[k] //= g

    def reduce(self, vec) -> dict[int, int]:
        """Reduced integer representative (a positive multiple of the exact
        reduction); empty dict iff the vector lies in the span."""
        v = self._reduce_int(self._to_int_vec(vec))
        self._make_primitive(v)
        return v

    def add_vector(self, vec) -> bool:
        """Insert a vector; True iff it enlarged the span."""
        v = self._reduce_int(self._to_int_vec(vec))
        if not v:
            return False
        self._make_primitive(v)
        c0 = min(v)
        if v[c0] < 0:
            for k in v:
                v[k] = -v[k]
        piv = v[c0]
        # back-clean older rows so the full-reduction invariant survives
        for c, row in self.rows.items():
            a = row.get(c0, 0)
            if not a:
                continue
            if piv != 1:
                for k in row:
                    row[k] *= piv
            for k, nv in v.items():
                if k == c0:
                    continue
                nk = row.get(k, 0) - a * nv
                if nk:
                    row[k] = nk
                else:
                    row.pop(k, None)
            row.pop(c0, None)
            self._make_primitive(row)
        self.rows[c0] = v
        return True

    def finalized(self) -> tuple[list[int], list[dict[int, Fraction]]]:
        """Pivots and Fraction RREF rows, sorted by pivot column."""
        pivots = sorted(self.rows)
        out = []
        for c in pivots:
            row = self.rows[c]
            piv = row[c]
            out.append({k: Fraction(val, piv) for k, val in sorted(row.items())})
        return pivots, out


class _EchelonP:
    """Fully reduced echelon basis over F_p; pivot entries normalised to 1."""

    def __init__(self, ambient: int, p: int):
        self.ambient = ambient
        self.p = p
        self.rows: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _to_vec(self, vec) -> dict[int, int]:
        p = self.p
        out = {}
        for k, v in vec.items():
            iv = int(v) % p if not isinstance(v, Fraction) else \
                (v.numerator % p) * pow(v.denominator % p, -1, p) % p
            if iv:
                out[k] = iv
        return out

    def reduce(self, vec) -> dict[int, int]:
        p = self.p
        rows = self.rows
        v = self._to_vec(vec)
        hits = [c for c in v if c in rows]
        for c in hits:
            a = v.pop(c, 0)
            if not a:
                continue
            for k, rv in rows[c].items():
                if k == c:
                    continue
                nk = (v.get(k, 0) - a * rv) % p
                if nk:
                    v[k] = nk
                else:
                    v.pop(k, None)
        return v

    def add_vector(self, vec) -> bool:
        p = self.p
        v = self.reduce(vec)
        if not v:
            return False
        c0 = min(v)
        inv = pow(v[c0], -1, p)
        if inv != 1:
            v = {k: (val * inv) % p for k, val in v.items()}
        for c, row in self.rows.items():
            a = row.get(c0, 0)
            if not a:
                continue
            for k, nv in v.items():
                if k == c0:
                    continue
                nk = (row.get(k, 0) - a * nv) % p
                if nk:
                    row[k] = nk
                else:
                    row.pop(k, None)
            row.pop(c0, None)
        self.rows[c0] = v
        return True

    def finalized(self) -> tuple[list[int], list[dict[int, int]]]:
        pivots = sorted(self.rows)
        return pivots, [dict(sorted(self.rows[c].items())) for c in pivots]


def _new_echelon(field: FieldConfig, ambient: int):
    if field.characteristic == 0:
        return _EchelonQ(ambient)
    return _EchelonP(ambient, field.characteristic)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

class ExactMatrix:
    """Sparse exact matrix; all stored entries are nonzero."""

    __slots__ = ("field", "rows", "cols", "entries", "_colcache")

    def __init__(self, field: FieldConfig, rows: int, cols: int, entries=None):
        self.field = field
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            zero_ok = field.is_zero
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ShapeError(f"entry ({i},{j}) outside {rows}x{cols}")
                if not zero_ok(v):
                    ent[i, j] = v
        self.entries = ent
        self._colcache = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, field, cols, row_dicts):
        ent = {}
        for i, row in enumerate(row_dicts):
            for j, v in row.items():
                ent[i, j] = v
        return cls(field, len(row_dicts), cols, ent)

    @classmethod
    def identity(cls, field, n):
        one = field.one()
        return cls(field, n, n, {(i, i): one for i in range(n)})

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, rows, cols)

    # -- structure ----------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.entries)

    def row_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def col_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.cols, self.rows,
                           {(j, i): v for (i, j), v in self.entries.items()})

    def to_lists(self):
        z = self.field.zero()
        out = [[z] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    # -- arithmetic ---------------------------------------------------------

    def _check_same_domain(self, other):
        if self.field != other.field:
            raise ShapeError("scalar domain mismatch")

    def __add__(self, other):
        self._check_same_domain(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return ExactMatrix(self.field, self.rows, self.cols, ent)

    def __sub__(self, other):
        return self + other.scale(-self.field.one())

    def __neg__(self):
        return self.scale(-self.field.one())

    def scale(self, c):
        p = self.field.characteristic
        if p:
            c = c % p
            ent = {k: (v * c) % p for k, v in self.entries.items()}
        else:
            ent = {k: v * c for k, v in self.entries.items()}
        return ExactMatrix(self.field, self.rows, self.cols, ent)

    def __matmul__(self, other):
        self._check_same_domain(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        other_rows = other.row_dicts()
        acc: dict[tuple[int, int], object] = {}
        for (i, j), a in self.entries.items():
            row = other_rows[j]
            for k, b in row.items():
                key = (i, k)
                acc[key] = acc.get(key, 0) + a * b
        if self.field.characteristic:
            p = self.field.characteristic
            acc = {k: v % p for k, v in acc.items()}
        return ExactMatrix(self.field, self.rows, other.cols, acc)

    def apply(self, vec: dict) -> dict:
        """Matrix times sparse column vector (dict col -> scalar)."""
        if self._colcache is None:
            cols = {}
            for (i, j), a in self.entries.items():
                cols.setdefault(j, []).append((i, a))
            self._colcache = cols
        cols = self._colcache
        acc: dict[int, object] = {}
        for j, x in vec.items():
            for i, a in cols.get(j, ()):
                acc[i] = acc.get(i, 0) + a * x
        p = self.field.characteristic
        if p:
            return {i: v % p for i, v in acc.items() if v % p}
        return {i: v for i, v in acc.items() if v}

    def column(self, j) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, ExactMatrix) and self.field == other.field
                and self.shape == other.shape and self.entries == other.entries)

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """Subspace of K^n with its unique reduced-echelon basis."""

    __slots__ = ("field", "ambient_dim", "pivots", "rows")

    def __init__(self, field, ambient_dim, pivots, rows):
        self.field = field
        self.ambient_dim = ambient_dim
        self.pivots = tuple(pivots)
        self.rows = tuple(dict(r) for r in rows)

    @classmethod
    def from_vectors(cls, field, ambient_dim, vectors) -> "Subspace":
        eng = _new_echelon(field, ambient_dim)
        for v in vectors:
            for j in v:
                if not 0 <= j < ambient_dim:
                    raise ShapeError(f"coordinate {j} outside ambient {ambient_dim}")
            eng.add_vector(v)
        pivots, rows = eng.finalized()
        return cls(field, ambient_dim, pivots, rows)

    @classmethod
    def zero(cls, field, ambient_dim) -> "Subspace":
        return cls(field, ambient_dim, (), ())

    @classmethod
    def full(cls, field, ambient_dim) -> "Subspace":
        one = field.one()
        return cls(field, ambient_dim, range(ambient_dim),
                   [{i: one} for i in range(ambient_dim)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis_matrix(self) -> ExactMatrix:
        return ExactMatrix.from_rows(self.field, self.ambient_dim, self.rows)

    def reduce(self, vec: dict) -> dict:
        """Exact canonical representative of vec modulo this subspace."""
        v = {k: self.field.coerce(x) for k, x in vec.items() if not self.field.is_zero(self.field.coerce(x))}
        p = self.field.characteristic
        for c, row in zip(self.pivots, self.rows):
            a = v.pop(c, None)
            if a is None or self.field.is_zero(a):
                continue
            for k, rv in row.items():
                if k == c:
                    continue
                nk = v.get(k, self.field.zero()) - a * rv
                if p:
                    nk %= p
                if self.field.is_zero(nk):
                    v.pop(k, None)
                else:
                    v[k] = nk
        return v

    def contains_vec(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def coords_of(self, vec: dict) -> list:
        """Coordinates in the echelon basis; raises if vec is not a member."""
        if not self.contains_vec(vec):
            raise ShapeError("vector not in subspace")
        z = self.field.zero()
        return [self.field.coerce(vec.get(c, z)) for c in self.pivots]

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ShapeError("ambient mismatch")
        return all(self.contains_vec(r) for r in other.rows)

    def __eq__(self, other):
        return (isinstance(other, Subspace)
                and self.field == other.field
                and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots
                and self.rows == other.rows)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


# ---------------------------------------------------------------------------
# the four public operations
# ---------------------------------------------------------------------------

def rank_kernel_image(M: ExactMatrix):
    """Rank, kernel (in K^cols) and column-space image (in K^rows) of M."""
    row_space = Subspace.from_vectors(M.field, M.cols, M.row_dicts())
    rank = row_space.dim
    one = M.field.one()
    kernel_vecs = []
    pivset = dict(zip(row_space.pivots, row_space.rows))
    free_cols = [j for j in range(M.cols) if j not in pivset]
    for f in free_cols:
        v = {f: one}
        for c, row in pivset.items():
            a = row.get(f)
            if a is not None:
                v[c] = -a if not M.field.characteristic else (-a) % M.field.characteristic
        kernel_vecs.append(v)
    kernel = Subspace.from_vectors(M.field, M.cols, kernel_vecs)
    image = Subspace.from_vectors(M.field, M.rows, M.col_dicts())
    assert rank + kernel.dim == M.cols, "rank-nullity violated"
    assert image.dim == rank, "row rank != column rank"
    return rank, kernel, image


def quotient(ambient_dim: int, S: Subspace):
    """Quotient K^ambient / S: its dimension and the projector to quotient
    coordinates (read off the non-pivot coordinates after reduction mod S)."""
    if S.ambient_dim != ambient_dim:
        raise ShapeError(f"ambient mismatch: {S.ambient_dim} != {ambient_dim}")
    pivset = set(S.pivots)
    nonpivots = [j for j in range(ambient_dim) if j not in pivset]
    qdim = len(nonpivots)
    ent = {}
    one = S.field.one()
    pos = {f: t for t, f in enumerate(nonpivots)}
    for t, f in enumerate(nonpivots):
        ent[t, f] = one
    for c, row in zip(S.pivots, S.rows):
        for k, v in row.items():
            if k in pos:
                ent[pos[k], c] = -v if not S.field.characteristic else (-v) % S.field.characteristic
    projector = ExactMatrix(S.field, qdim, ambient_dim, ent)
    return qdim, projector


def quotient_section(ambient_dim: int, S: Subspace) -> list[dict]:
    """Representatives in K^ambient of the quotient coordinate basis."""
    pivset = set(S.pivots)
    one = S.field.one()
    return [{j: one} for j in range(ambient_dim) if j not in pivset]


def subspace_ops(A: Subspace, B: Subspace):
    """(sum, intersection, contains) where contains is B <= A."""
    if A.ambient_dim != B.ambient_dim:
        raise ShapeError("ambient mismatch")
    n = A.ambient_dim
    total = Subspace.from_vectors(A.field, n, list(A.rows) + list(B.rows))
    # Zassenhaus: rows [a | a] and [b | 0]; zero left block spans A \cap B.
    eng = _new_echelon(A.field, 2 * n)
    for r in A.rows:
        v = dict(r)
        v.update({k + n: val for k, val in r.items()})
        eng.add_vector(v)
    for r in B.rows:
        eng.add_vector(dict(r))
    inter_vecs = []
    for c, row in eng.rows.items():
        if c >= n:  # pivot in the right block => left block is zero
            inter_vecs.append({k - n: v for k, v in row.items()})
    inter = Subspace.from_vectors(A.field, n, inter_vecs)
    contains = A.contains_subspace(B)
    assert total.dim + inter.dim == A.dim + B.dim, "modular law violated"
    return total, inter, contains


def solve(M: ExactMatrix, v: dict):
    """Some x with Mx = v, or None; free variables are pinned to zero."""
    aug = M.cols  # index of the augmented column
    eng = _new_echelon(M.field, M.cols + 1)
    rows = M.row_dicts()
    for i, row in enumerate(rows):
        r = dict(row)
        val = v.get(i)
        if val is not None and not M.field.is_zero(M.field.coerce(val)):
            r[aug] = M.field.coerce(val)
        eng.add_vector(r)
    pivots, ech = eng.finalized()
    x = {}
    for c, row in zip(pivots, ech):
        if c == aug:
            return None  # inconsistent
        a = row.get(aug)
        if a is not None:
            x[c] = a if not M.field.characteristic else a % M.field.characteristic
    # free variables pinned to zero, so each pivot equation reads x_c = r_aug
    return x


def residual(M: ExactMatrix, x: dict, v: dict) -> dict:
    """Mx - v as a sparse dict (empty iff x solves the system)."""
    out = M.apply(x)
    p = M.field.characteristic
    for i, val in v.items():
        c = M.field.coerce(val)
        nk = out.get(i, M.field.zero()) - c
        if p:
            nk %= p
        if M.field.is_zero(nk):
            out.pop(i, None)
        else:
            out[i] = nk
    return out
