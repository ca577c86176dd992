"""Hochschild-style and cyclic chain complexes of a coefficient algebra.

The boundary used here differs from the textbook Hochschild boundary in its
final summand: d_n(a_0 (x) ... (x) a_n) ends with
``- a_1 (x) ... (x) a_{n-1} (x) a_n a_0`` instead of the usual rotated term.
That variant is the one whose degree-one homology matches the extension
kernels computed in :mod:`uce_lab.extensions`; d_n o d_{n+1} = 0 is asserted
whenever two consecutive boundaries are built.

Tensor power bases are ordered lexicographically by basis index, so every
matrix, cycle representative and class projector is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .algebras import CoeffAlgebra, commutator_subspace
from .linalg import ExactMatrix, Subspace, ShapeError, quotient, rank_kernel_image


class DegreeError(ValueError):
    """Chain degree outside the supported desk-scale range."""


# ---------------------------------------------------------------------------
# tensor coordinates
# ---------------------------------------------------------------------------

def tensor_rank(dim: int, factors: int) -> int:
    return dim ** factors


def tensor_index(tup, dim: int) -> int:
    idx = 0
    for t in tup:
        idx = idx * dim + t
    return idx


def tensor_tuples(dim: int, factors: int):
    return product(range(dim), repeat=factors)


def _add_term(vec: dict, field, idx: int, coeff) -> None:
    v = vec.get(idx, field.zero()) + coeff
    if field.characteristic:
        v %= field.characteristic
    if field.is_zero(v):
        vec.pop(idx, None)
    else:
        vec[idx] = v


def _product_into(vec, field, A, prefix, left, right, suffix, sign, dim):
    """Add sign * (prefix (x) left*right (x) suffix) to vec."""
    row = A.mul[left][right]
    for l in range(dim):
        c = row[l]
        if field.is_zero(c):
            continue
        _add_term(vec, field, tensor_index(prefix + (l,) + suffix, dim), sign * c)


# ---------------------------------------------------------------------------
# boundaries
# ---------------------------------------------------------------------------

def hochschild_boundary(A: CoeffAlgebra, n: int) -> ExactMatrix:
    """Matrix of d_n : A^{(x)(n+1)} -> A^{(x)n} in the lexicographic basis.

    The last summand is - a_1 (x) ... (x) a_{n-1} (x) a_n a_0, not the
    rotated textbook term.
    """
    if not 1 <= n <= 3:
        raise DegreeError(f"boundary degree {n} outside 1..3")
    f = A.field
    dim = A.dim
    one = f.one()
    ent = {}
    for tup in tensor_tuples(dim, n + 1):
        col = tensor_index(tup, dim)
        vec: dict[int, object] = {}
        sign = one
        for i in range(n):
            _product_into(vec, f, A, tup[:i], tup[i], tup[i + 1], tup[i + 2:], sign, dim)
            sign = -sign
        _product_into(vec, f, A, tup[1:n], tup[n], tup[0], (), -one, dim)
        for r, v in vec.items():
            ent[r, col] = v
    return ExactMatrix(f, dim ** n, dim ** (n + 1), ent)


def _classical_boundary(A: CoeffAlgebra, n: int) -> ExactMatrix:
    """Textbook Hochschild boundary (rotated last summand); used only to
    certify that both boundaries induce the same cyclic boundary."""
    f = A.field
    dim = A.dim
    one = f.one()
    ent = {}
    for tup in tensor_tuples(dim, n + 1):
        col = tensor_index(tup, dim)
        vec: dict[int, object] = {}
        sign = one
        for i in range(n):
            _product_into(vec, f, A, tup[:i], tup[i], tup[i + 1], tup[i + 2:], sign, dim)
            sign = -sign
        last_sign = one if n % 2 == 0 else -one
        _product_into(vec, f, A, (), tup[n], tup[0], tup[1:n], last_sign, dim)
        for r, v in vec.items():
            ent[r, col] = v
    return ExactMatrix(f, dim ** n, dim ** (n + 1), ent)


@dataclass(frozen=True)
class ChainComplex:
    """Spaces (ambient dims per degree) and boundaries d_n: deg n -> deg n-1.

    boundaries[k] is d_k for k >= 1 (index 0 unused / None); consecutive
    compositions are asserted to vanish at construction.
    """

    spaces: tuple
    boundaries: tuple

    def __post_init__(self):
        for k in range(1, len(self.boundaries)):
            d = self.boundaries[k]
            if d is None:
                continue
            if d.shape != (self.spaces[k - 1], self.spaces[k]):
                raise ShapeError(f"boundary {k} has shape {d.shape}")
            nxt = self.boundaries[k + 1] if k + 1 < len(self.boundaries) else None
            if nxt is not None and not (d @ nxt).is_zero():
                raise AssertionError(f"d_{k} o d_{k + 1} != 0")

    def homology(self, n: int) -> "HomologyResult":
        dn = self.boundaries[n] if n >= 1 and n < len(self.boundaries) else None
        dn1 = self.boundaries[n + 1] if n + 1 < len(self.boundaries) else None
        return _homology_of(self.spaces[n], dn, dn1, n)


@dataclass(frozen=True)
class HomologyResult:
    """ker d_n / im d_{n+1} with canonical data.

    class_projector sends ambient coordinates to homology coordinates (it is
    only meaningful on cycles); reps are canonical cycle representatives of
    the homology basis.
    """

    degree: int
    dim: int
    cycle_basis: Subspace
    boundary_space: Subspace
    class_projector: ExactMatrix
    reps: tuple

    def classes_of(self, vec: dict) -> dict:
        return self.class_projector.apply(vec)


def _homology_of(ambient: int, dn, dn1, degree: int) -> HomologyResult:
    field = (dn or dn1).field
    if dn is None:
        cycles = Subspace.full(field, ambient)
    else:
        _, cycles, _ = rank_kernel_image(dn)
    if dn1 is None:
        bnd = Subspace.zero(field, ambient)
    else:
        _, _, bnd = rank_kernel_image(dn1)
    if not cycles.contains_subspace(bnd):
        raise AssertionError("boundaries do not lie inside cycles")
    qdim, P = quotient(ambient, bnd)
    in_quot = Subspace.from_vectors(field, qdim, [P.apply(r) for r in cycles.rows])
    hdim = in_quot.dim
    assert hdim == cycles.dim - bnd.dim
    # projector: quotient coordinates restricted to the homology basis pivots
    ent = {}
    for t, qrow in enumerate(in_quot.pivots):
        for (i, j), v in P.entries.items():
            if i == qrow:
                ent[t, j] = v
    C = ExactMatrix(field, hdim, ambient, ent)
    # canonical representatives: lift homology basis rows through the
    # quotient section (non-pivot coordinates of the boundary space)
    pivset = set(bnd.pivots)
    nonpivots = [j for j in range(ambient) if j not in pivset]
    reps = []
    for row in in_quot.rows:
        rep = {nonpivots[t]: v for t, v in row.items()}
        reps.append(rep)
    return HomologyResult(degree, hdim, cycles, bnd, C, tuple(reps))


def hochschild_homology(A: CoeffAlgebra, n: int) -> HomologyResult:
    """HH_n = ker d_n / im d_{n+1} for 0 <= n <= 2 (d_0 := 0)."""
    if not 0 <= n <= 2:
        raise DegreeError(f"homology degree {n} outside 0..2")
    dn = hochschild_boundary(A, n) if n >= 1 else None
    dn1 = hochschild_boundary(A, n + 1)
    if dn is not None and not (dn @ dn1).is_zero():
        raise AssertionError(f"d_{n} o d_{n + 1} != 0")
    return _homology_of(A.dim ** (n + 1), dn, dn1, n)


# ---------------------------------------------------------------------------
# cyclic complex
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicComplex:
    """Quotients C_k = A^{(x)(k+1)} / (cyclic differences) up to degree n.

    dims[k] is dim C_k; projectors[k] maps tensor coordinates to C_k
    coordinates; boundaries[k] (k >= 1) is the induced d_k: C_k -> C_{k-1}.
    """

    dims: tuple
    projectors: tuple
    boundaries: tuple
    relation_spaces: tuple


def cyclic_complex(A: CoeffAlgebra, n: int) -> CyclicComplex:
    if not 0 <= n <= 2:
        raise DegreeError(f"cyclic degree {n} outside 0..2")
    f = A.field
    dim = A.dim
    one = f.one()
    dims, projs, rels = [], [], []
    for k in range(n + 1):
        ambient = dim ** (k + 1)
        gens = []
        if k >= 1:
            sgn = one if k % 2 == 0 else -one
            for tup in tensor_tuples(dim, k + 1):
                rot = tup[1:] + tup[:1]
                v: dict[int, object] = {}
                _add_term(v, f, tensor_index(tup, dim), one)
                _add_term(v, f, tensor_index(rot, dim), -sgn)
                if v:
                    gens.append(v)
        R = Subspace.from_vectors(f, ambient, gens)
        qdim, P = quotient(ambient, R)
        dims.append(qdim)
        projs.append(P)
        rels.append(R)
    bounds = [None]
    for k in range(1, n + 1):
        dk = hochschild_boundary(A, k)
        # the boundary must send relation span into relation span
        for g in rels[k].rows:
            if not rels[k - 1].contains_vec(dk.apply(g)):
                raise AssertionError(f"modified boundary does not descend at degree {k}")
        bounds.append(_induced_on_quotients(dk, rels[k], projs[k - 1], dims[k], dims[k - 1]))
        if k >= 2:
            # the textbook boundary descends too and induces the same map
            dc = _classical_boundary(A, k)
            for g in rels[k].rows:
                if not rels[k - 1].contains_vec(dc.apply(g)):
                    raise AssertionError(f"classical boundary does not descend at degree {k}")
            if _induced_on_quotients(dc, rels[k], projs[k - 1], dims[k], dims[k - 1]) != bounds[k]:
                raise AssertionError("modified and classical boundaries induce different cyclic maps")
    for k in range(2, n + 1):
        if not (bounds[k - 1] @ bounds[k]).is_zero():
            raise AssertionError(f"cyclic d_{k - 1} o d_{k} != 0")
    return CyclicComplex(tuple(dims), tuple(projs), tuple(bounds), tuple(rels))


def _induced_on_quotients(d: ExactMatrix, rel_src: Subspace, proj_dst: ExactMatrix,
                          qdim_src: int, qdim_dst: int) -> ExactMatrix:
    """Map induced on quotient coordinates by d, via the canonical section."""
    field = d.field
    pivset = set(rel_src.pivots)
    nonpivots = [j for j in range(rel_src.ambient_dim) if j not in pivset]
    ent = {}
    for t, rep_coord in enumerate(nonpivots):
        img = proj_dst.apply(d.apply({rep_coord: field.one()}))
        for i, v in img.items():
            ent[i, t] = v
    return ExactMatrix(field, qdim_dst, qdim_src, ent)


def cyclic_homology(A: CoeffAlgebra, n: int) -> HomologyResult:
    """HC_n = ker d_n / im d_{n+1} on the cyclic quotient complex, n <= 1."""
    if not 0 <= n <= 1:
        raise DegreeError(f"cyclic homology degree {n} outside 0..1")
    cc = cyclic_complex(A, n + 1)
    dn = cc.boundaries[n] if n >= 1 else None
    dn1 = cc.boundaries[n + 1]
    res = _homology_of(cc.dims[n], dn, dn1, n)
    if n == 1:
        # exactness: HC_1 = ker(induced d_1 on C_1 / im d_2)
        _, img2 = None, None
        _, _, img2 = rank_kernel_image(dn1)
        qdim, P = quotient(cc.dims[1], img2)
        pivset = set(img2.pivots)
        nonpiv = [j for j in range(cc.dims[1]) if j not in pivset]
        ent = {}
        for t, c in enumerate(nonpiv):
            for i, v in dn.apply({c: A.field.one()}).items():
                ent[i, t] = v
        induced = ExactMatrix(A.field, cc.dims[0], qdim, ent)
        _, ker, _ = rank_kernel_image(induced)
        if ker.dim != res.dim:
            raise AssertionError("degree-one cyclic homology fails the exact-sequence check")
    return res


def hh_to_hc_projection(A: CoeffAlgebra) -> ExactMatrix:
    """Degree-one map induced by A^{(x)2} ->> C_1; surjectivity asserted."""
    hh1 = hochschild_homology(A, 1)
    hc1 = cyclic_homology(A, 1)
    cc = cyclic_complex(A, 1)
    ent = {}
    for t, rep in enumerate(hh1.reps):
        img = hc1.class_projector.apply(cc.projectors[1].apply(rep))
        for i, v in img.items():
            ent[i, t] = v
    P = ExactMatrix(A.field, hc1.dim, hh1.dim, ent)
    rank, _, _ = rank_kernel_image(P)
    if rank != hc1.dim:
        raise AssertionError("projection HH_1 -> HC_1 is not surjective")
    return P


# ---------------------------------------------------------------------------
# Connes operator
# ---------------------------------------------------------------------------

def connes_B(A: CoeffAlgebra, n: int) -> ExactMatrix:
    """Two-term cyclic-sum degree-raising operator A^{(x)(n+1)} -> A^{(x)(n+2)}.

    The anticommutation B d_n + d_{n+1} B = 0 is asserted (with d_0 = 0).
    """
    if not 0 <= n <= 1:
        raise DegreeError(f"Connes operator degree {n} outside 0..1")
    f = A.field
    dim = A.dim
    one = f.one()
    ent: dict[tuple[int, int], object] = {}

    def add(r, c, val):
        v = ent.get((r, c), f.zero()) + val
        if f.characteristic:
            v %= f.characteristic
        if f.is_zero(v):
            ent.pop((r, c), None)
        else:
            ent[r, c] = v

    for tup in tensor_tuples(dim, n + 1):
        col = tensor_index(tup, dim)
        for i in range(n + 1):
            rot = tup[i:] + tup[:i]
            s1 = one if (n * i) % 2 == 0 else -one
            s2 = one if (n * (i + 1)) % 2 == 0 else -one
            for u, cu in enumerate(A.unit):
                if f.is_zero(cu):
                    continue
                add(tensor_index((u,) + rot, dim), col, s1 * cu)
                add(tensor_index(rot + (u,), dim), col, s2 * cu)
    B = ExactMatrix(f, dim ** (n + 2), dim ** (n + 1), ent)
    d_up = hochschild_boundary(A, n + 1)
    if n == 0:
        if not (d_up @ B).is_zero():
            raise AssertionError("d_1 B_0 != 0: sign convention broken")
    else:
        lower = connes_B(A, n - 1) @ hochschild_boundary(A, n)
        if not (lower + d_up @ B).is_zero():
            raise AssertionError("B d_n + d_{n+1} B != 0: sign convention broken")
    return B


@dataclass(frozen=True)
class InducedConnesMap:
    """The Connes operator pushed down to a map HC_0 -> HH_1."""

    matrix: ExactMatrix     # hc0 coords -> hh1 coords
    image: Subspace         # Im B-bar inside HH_1 coordinates

    @property
    def image_dim(self) -> int:
        return self.image.dim


def induced_B_image(A: CoeffAlgebra) -> InducedConnesMap:
    f = A.field
    hh1 = hochschild_homology(A, 1)
    B0 = connes_B(A, 0)
    cc = cyclic_complex(A, 1)
    _, _, im_d1bar = rank_kernel_image(cc.boundaries[1])
    comm = commutator_subspace(A)
    if not (im_d1bar.contains_subspace(comm) and comm.contains_subspace(im_d1bar)):
        raise AssertionError("im(d_1 on C_1) differs from the commutator span")
    # descent: the composite kills the commutator span
    for g in comm.rows:
        if hh1.class_projector.apply(B0.apply(g)):
            raise AssertionError("induced Connes map is not well-defined on HC_0")
    qdim, _ = quotient(A.dim, comm)
    pivset = set(comm.pivots)
    nonpiv = [j for j in range(A.dim) if j not in pivset]
    ent = {}
    cols = []
    for t, c in enumerate(nonpiv):
        img = hh1.class_projector.apply(B0.apply({c: f.one()}))
        cols.append(img)
        for i, v in img.items():
            ent[i, t] = v
    M = ExactMatrix(f, hh1.dim, qdim, ent)
    image = Subspace.from_vectors(f, hh1.dim, cols)
    return InducedConnesMap(M, image)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def homology_to_json(res: HomologyResult, field) -> dict:
    ambient = res.cycle_basis.ambient_dim
    basis = []
    for rep in res.reps:
        basis.append([field.format(rep.get(i, field.zero())) for i in range(ambient)])
    return {
        "degree": res.degree,
        "dim": res.dim,
        "cycle_dim": res.cycle_basis.dim,
        "boundary_dim": res.boundary_space.dim,
        "basis": basis,
    }
