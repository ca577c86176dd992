"""Finite-dimensional associative unital coefficient algebras by structure
constants, a few built-in families, and Kahler differentials for the
commutative ones.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldConfig, DomainError
from .linalg import ExactMatrix, Subspace, ShapeError, rank_kernel_image, quotient


class AlgebraError(ValueError):
    """Structure constants that do not define a valid unital algebra."""


class CoeffAlgebra:
    """Associative unital algebra given by its multiplication tensor.

    mul[i][j] is the coordinate vector of (basis_i * basis_j); unit is the
    coordinate vector of 1.  Instances are immutable after construction and
    validated unless explicitly skipped.
    """

    __slots__ = ("field", "dim", "labels", "unit", "mul", "name")

    def __init__(self, field: FieldConfig, labels, unit, mul, name="custom",
                 validate: bool = True):
        self.field = field
        self.dim = len(labels)
        self.labels = tuple(labels)
        self.unit = tuple(field.coerce(x) for x in unit)
        if len(self.unit) != self.dim:
            raise AlgebraError("unit vector length != dim")
        self.mul = tuple(
            tuple(tuple(field.coerce(x) for x in mul[i][j]) for j in range(self.dim))
            for i in range(self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                if len(self.mul[i][j]) != self.dim:
                    raise AlgebraError(f"mul[{i}][{j}] has wrong length")
        self.name = name
        if validate:
            bad = validate_algebra(self)
            if bad:
                raise AlgebraError(f"invalid structure constants: {bad[:3]}")

    # -- scalar helpers -----------------------------------------------------

    def product_coords(self, a, b):
        """Coordinates of a*b for coordinate tuples a, b."""
        dim = self.dim
        f = self.field
        acc = [f.zero()] * dim
        for i, ai in enumerate(a):
            if f.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                if f.is_zero(bj):
                    continue
                c = ai * bj
                row = self.mul[i][j]
                for k in range(dim):
                    if not f.is_zero(row[k]):
                        acc[k] = acc[k] + c * row[k]
        if f.characteristic:
            acc = [x % f.characteristic for x in acc]
        return tuple(acc)

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, tuple(self.field.coerce(x) for x in coords))

    def basis_element(self, i) -> "AlgebraElement":
        coords = [self.field.zero()] * self.dim
        coords[i] = self.field.one()
        return AlgebraElement(self, tuple(coords))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def is_commutative(self) -> bool:
        return all(self.mul[i][j] == self.mul[j][i]
                   for i in range(self.dim) for j in range(i + 1, self.dim))

    def __eq__(self, other):
        return (isinstance(other, CoeffAlgebra) and self.field == other.field
                and self.labels == other.labels and self.unit == other.unit
                and self.mul == other.mul)

    def __repr__(self):
        return f"CoeffAlgebra({self.name}, dim={self.dim}, char={self.field.characteristic})"


@dataclass(frozen=True)
class AlgebraElement:
    parent: CoeffAlgebra
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.parent.dim:
            raise ShapeError("coordinate length does not match algebra dim")

    def __add__(self, other):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(
            f.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(
            f.sub(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(f.neg(a) for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.parent, self.parent.product_coords(self.coords, other.coords))
        f = self.parent.field
        c = f.coerce(other)
        return AlgebraElement(self.parent, tuple(f.mul(a, c) for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        f = self.parent.field
        return all(f.is_zero(a) for a in self.coords)

    def as_dict(self) -> dict:
        f = self.parent.field
        return {i: a for i, a in enumerate(self.coords) if not f.is_zero(a)}

    def __str__(self):
        f = self.parent.field
        terms = [f"{f.format(a)}*{self.parent.labels[i]}"
                 for i, a in enumerate(self.coords) if not f.is_zero(a)]
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_algebra(A: CoeffAlgebra) -> list[str]:
    """Every associativity or unit violation, as human-readable strings.

    Empty list means the structure constants define a unital associative
    algebra; the check is exhaustive over basis triples.
    """
    out = []
    f = A.field
    for i in range(A.dim):
        b = A.basis_element(i).coords
        left = A.product_coords(A.unit, b)
        right = A.product_coords(b, A.unit)
        if left != b:
            out.append(f"1*{A.labels[i]} != {A.labels[i]}")
        if right != b:
            out.append(f"{A.labels[i]}*1 != {A.labels[i]}")
    for i in range(A.dim):
        for j in range(A.dim):
            ij = A.mul[i][j]
            for k in range(A.dim):
                lhs = A.product_coords(ij, A.basis_element(k).coords)
                rhs = A.product_coords(A.basis_element(i).coords, A.mul[j][k])
                if lhs != rhs:
                    out.append(
                        f"({A.labels[i]}*{A.labels[j]})*{A.labels[k]} != "
                        f"{A.labels[i]}*({A.labels[j]}*{A.labels[k]})")
    return out


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------

def _zeros(field, n):
    return [field.zero()] * n


def ground_field(field: FieldConfig) -> CoeffAlgebra:
    return CoeffAlgebra(field, ["1"], [field.one()], [[[field.one()]]], name="ground_field")


def dual_numbers(field: FieldConfig) -> CoeffAlgebra:
    one, zero = field.one(), field.zero()
    mul = [[[one, zero], [zero, one]],
           [[zero, one], [zero, zero]]]  # eps*eps = 0
    return CoeffAlgebra(field, ["1", "eps"], [one, zero], mul, name="dual_numbers")


def truncated_poly(field: FieldConfig, k: int) -> CoeffAlgebra:
    if k < 1:
        raise AlgebraError("truncated_poly needs k >= 1")
    one = field.one()
    labels = ["1"] + [f"x^{i}" if i > 1 else "x" for i in range(1, k)]
    mul = []
    for i in range(k):
        row = []
        for j in range(k):
            v = _zeros(field, k)
            if i + j < k:
                v[i + j] = one
            row.append(v)
        mul.append(row)
    unit = _zeros(field, k)
    unit[0] = one
    return CoeffAlgebra(field, labels, unit, mul, name=f"truncated_poly({k})")


def cyclic_group_algebra(field: FieldConfig, k: int) -> CoeffAlgebra:
    if k < 1:
        raise AlgebraError("cyclic_group_algebra needs k >= 1")
    one = field.one()
    labels = [f"g^{i}" if i else "e" for i in range(k)]
    mul = []
    for i in range(k):
        row = []
        for j in range(k):
            v = _zeros(field, k)
            v[(i + j) % k] = one
            row.append(v)
        mul.append(row)
    unit = _zeros(field, k)
    unit[0] = one
    return CoeffAlgebra(field, labels, unit, mul, name=f"cyclic_group_algebra({k})")


def full_matrix(field: FieldConfig, k: int) -> CoeffAlgebra:
    if k < 1:
        raise AlgebraError("full_matrix needs k >= 1")
    one = field.one()
    dim = k * k
    idx = lambda r, c: r * k + c
    labels = [f"E{r + 1}{c + 1}" for r in range(k) for c in range(k)]
    mul = [[_zeros(field, dim) for _ in range(dim)] for _ in range(dim)]
    for r in range(k):
        for c in range(k):
            for r2 in range(k):
                for c2 in range(k):
                    if c == r2:
                        v = _zeros(field, dim)
                        v[idx(r, c2)] = one
                        mul[idx(r, c)][idx(r2, c2)] = v
    unit = _zeros(field, dim)
    for r in range(k):
        unit[idx(r, r)] = one
    return CoeffAlgebra(field, labels, unit, mul, name=f"full_matrix({k})")


def direct_sum(parts: list[CoeffAlgebra]) -> CoeffAlgebra:
    if not parts:
        raise AlgebraError("direct_sum needs at least one part")
    field = parts[0].field
    if any(p.field != field for p in parts):
        raise AlgebraError("direct_sum parts over different fields")
    dim = sum(p.dim for p in parts)
    offs = []
    o = 0
    for p in parts:
        offs.append(o)
        o += p.dim
    unit = _zeros(field, dim)
    labels = []
    for bi, p in enumerate(parts):
        labels.extend(f"b{bi}.{lab}" for lab in p.labels)
    for p, off in zip(parts, offs):
        for t, x in enumerate(p.unit):
            unit[off + t] = x
    mul = [[_zeros(field, dim) for _ in range(dim)] for _ in range(dim)]
    for p, off in zip(parts, offs):
        for i in range(p.dim):
            for j in range(p.dim):
                v = _zeros(field, dim)
                for t, x in enumerate(p.mul[i][j]):
                    v[off + t] = x
                mul[off + i][off + j] = v
    name = "direct_sum(" + ",".join(p.name for p in parts) + ")"
    return CoeffAlgebra(field, labels, unit, mul, name=name)


_FAMILY_RE = re.compile(r"^([a-z_]+)(?:\((.*)\))?$")


def _split_args(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur).strip())
    return parts


def build_family(spec: str, field: FieldConfig) -> CoeffAlgebra:
    """Build a coefficient algebra from a family spec string.

    Accepted: ground_field, dual_numbers, truncated_poly(k),
    cyclic_group_algebra(k), full_matrix(k), direct_sum(spec,...),
    custom_file(path).
    """
    m = _FAMILY_RE.match(spec.strip())
    if not m:
        raise AlgebraError(f"cannot parse family spec {spec!r}")
    fam, args = m.group(1), m.group(2)
    if fam == "ground_field":
        return ground_field(field)
    if fam == "dual_numbers":
        return dual_numbers(field)
    if fam == "truncated_poly":
        return truncated_poly(field, int(args))
    if fam == "cyclic_group_algebra":
        return cyclic_group_algebra(field, int(args))
    if fam == "full_matrix":
        return full_matrix(field, int(args))
    if fam == "direct_sum":
        return direct_sum([build_family(a, field) for a in _split_args(args or "")])
    if fam == "custom_file":
        with open(args, "r", encoding="utf-8") as fh:
            return algebra_from_json(json.load(fh))
    raise AlgebraError(f"unknown family {fam!r}")


# ---------------------------------------------------------------------------
# derived structure
# ---------------------------------------------------------------------------

def commutator_subspace(A: CoeffAlgebra) -> Subspace:
    """span{ b_i b_j - b_j b_i } in canonical echelon form."""
    f = A.field
    vecs = []
    for i in range(A.dim):
        for j in range(i + 1, A.dim):
            ab = A.mul[i][j]
            ba = A.mul[j][i]
            v = {}
            for k in range(A.dim):
                d = f.sub(ab[k], ba[k])
                if not f.is_zero(d):
                    v[k] = d
            if v:
                vecs.append(v)
    return Subspace.from_vectors(f, A.dim, vecs)


def kahler_differentials(A: CoeffAlgebra):
    """Dimension and echelon basis representatives of the module of
    differentials of a commutative algebra.

    Presented on symbols b_i (x) d b_j with one relation
    a (x) d(bc) - ab (x) dc - ac (x) db per basis triple (a, b, c).
    Returns (dim, representatives) with representatives as sparse dicts in
    the dim^2 symbol space.
    """
    if not A.is_commutative():
        raise AlgebraError("Kahler differentials need a commutative algebra")
    f = A.field
    d = A.dim
    sym = lambda i, j: i * d + j
    rels = []
    for a in range(d):
        ea = A.basis_element(a).coords
        for b in range(d):
            for c in range(d):
                v = {}
                bc = A.mul[b][c]
                for l in range(d):       # a (x) d(bc)
                    if not f.is_zero(bc[l]):
                        v[sym(a, l)] = v.get(sym(a, l), f.zero()) + bc[l]
                ab = A.mul[a][b]
                for l in range(d):       # - ab (x) dc
                    if not f.is_zero(ab[l]):
                        v[sym(l, c)] = v.get(sym(l, c), f.zero()) - ab[l]
                ac = A.mul[a][c]
                for l in range(d):       # - ac (x) db
                    if not f.is_zero(ac[l]):
                        v[sym(l, b)] = v.get(sym(l, b), f.zero()) - ac[l]
                if f.characteristic:
                    v = {k: x % f.characteristic for k, x in v.items()}
                v = {k: x for k, x in v.items() if not f.is_zero(x)}
                if v:
                    rels.append(v)
    rel_space = Subspace.from_vectors(f, d * d, rels)
    qdim, _ = quotient(d * d, rel_space)
    pivset = set(rel_space.pivots)
    one = f.one()
    reps = [{t: one} for t in range(d * d) if t not in pivset]
    return qdim, reps


# ---------------------------------------------------------------------------
# serialization (bit-exact round trip)
# ---------------------------------------------------------------------------

def algebra_to_json(A: CoeffAlgebra) -> dict:
    f = A.field
    return {
        "name": A.name,
        "char": f.characteristic,
        "dim": A.dim,
        "labels": list(A.labels),
        "unit": [f.format(x) for x in A.unit],
        "mul": [[[f.format(x) for x in A.mul[i][j]] for j in range(A.dim)]
                for i in range(A.dim)],
    }


def algebra_from_json(doc: dict, *, allow_small_char: bool = False) -> CoeffAlgebra:
    try:
        field = FieldConfig(int(doc["char"]), allow_small_char=allow_small_char)
        labels = list(doc["labels"])
        if len(labels) != int(doc["dim"]):
            raise AlgebraError("dim does not match number of labels")
        return CoeffAlgebra(field, labels, doc["unit"], doc["mul"],
                            name=str(doc.get("name", "custom")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (AlgebraError, DomainError)):
            raise
        raise AlgebraError(f"malformed algebra document: {exc}") from exc


def retarget(A: CoeffAlgebra, field: FieldConfig) -> CoeffAlgebra:
    """Same structure constants over another exact field."""
    return CoeffAlgebra(
        field, A.labels,
        [field.coerce(x) for x in A.unit],
        [[[field.coerce(x) for x in A.mul[i][j]] for j in range(A.dim)]
         for i in range(A.dim)],
        name=A.name)


# ---------------------------------------------------------------------------
# seeded random validated algebras
# ---------------------------------------------------------------------------

_BLOCKS = ["ground_field", "dual_numbers", "truncated_poly(2)",
           "truncated_poly(3)", "truncated_poly(4)", "cyclic_group_algebra(2)",
           "cyclic_group_algebra(3)", "cyclic_group_algebra(4)", "full_matrix(2)"]


def random_algebra(field: FieldConfig, max_dim: int, seed: int) -> CoeffAlgebra:
    """Seeded random validated algebra of dim <= max_dim: a random direct
    sum of built-in blocks conjugated by a random invertible basis change."""
    import random as _random
    rng = _random.Random(seed)
    parts = []
    left = max_dim
    while left > 0:
        opts = [b for b in _BLOCKS if build_family(b, field).dim <= left]
        spec = rng.choice(opts)
        part = build_family(spec, field)
        parts.append(part)
        left -= part.dim
        if rng.random() < 0.5:
            break
    A = direct_sum(parts) if len(parts) > 1 else parts[0]
    # random invertible basis change with small integer entries
    d = A.dim
    f = field
    while True:
        g = [[f.coerce(rng.randrange(-2, 3)) for _ in range(d)] for _ in range(d)]
        G = ExactMatrix(f, d, d, {(i, j): g[i][j] for i in range(d)
                                  for j in range(d) if not f.is_zero(g[i][j])})
        rank, _, _ = rank_kernel_image(G)
        if rank == d:
            break
    ginv_cols = []
    from .linalg import solve as _solve
    for j in range(d):
        x = _solve(G, {j: f.one()})
        ginv_cols.append(x)
    # new basis e'_i = sum_j G[j][i] e_j; structure constants conjugate
    def to_new(coords):
        out = [f.zero()] * d
        for j, x in enumerate(coords):
            if f.is_zero(x):
                continue
            col = ginv_cols[j]
            for i, y in col.items():
                out[i] = f.add(out[i], f.mul(x, y))
        return out

    def from_new(i):
        return [g[j][i] for j in range(d)]

    mul = []
    for i in range(d):
        bi = from_new(i)
        row = []
        for j in range(d):
            bj = from_new(j)
            row.append(to_new(A.product_coords(bi, bj)))
        mul.append(row)
    unit = to_new(A.unit)
    return CoeffAlgebra(field, [f"v{i}" for i in range(d)], unit, mul,
                        name=f"random(seed={seed},base={A.name})")
