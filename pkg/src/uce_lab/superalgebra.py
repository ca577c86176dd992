"""Z_2-graded structure-constant superalgebras.

Houses the block matrix superalgebra gl(m, n, A) with its supercommutator,
its derived subalgebra sl(m, n, A), exhaustive identity checkers for both
the non-antisymmetric (Leibniz-type) and antisymmetric (Lie-type) graded
identities, ideal closures, and the quotient that forces antisymmetry.

Bracket tables are sparse dicts.  The triple identity checks vectorise
through numpy when the structure constants fit exact float64/int64 windows
and fall back to plain loops otherwise; both paths report the same
violating triples.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .algebras import AlgebraElement, CoeffAlgebra
from .fields import FieldConfig
from .linalg import ExactMatrix, ShapeError, Subspace, quotient

_F53 = 2 ** 53


class GradingError(ValueError):
    """Bracket table breaks the Z_2-grading."""


class IdentityError(AssertionError):
    """A construction that must satisfy an identity fails it."""


# ---------------------------------------------------------------------------
# core type
# ---------------------------------------------------------------------------

class SuperAlgebra:
    """Structure-constant superalgebra: parity bits and a bracket table.

    brackets[i][j] is the sparse coordinate dict of [b_i, b_j].  Grading
    compatibility is enforced at construction; the Leibniz/Lie identity
    sweeps live in :func:`check_identities` and are run by every operation
    whose contract requires them.
    """

    def __init__(self, field: FieldConfig, parity, brackets, labels=None):
        self.field = field
        self.parity = tuple(int(p) & 1 for p in parity)
        self.dim = len(self.parity)
        self.brackets = tuple(tuple(dict(brackets[i][j]) for j in range(self.dim))
                              for i in range(self.dim))
        self.labels = tuple(labels) if labels else tuple(f"x{i}" for i in range(self.dim))
        self._dense = None
        self._derived = None
        for i in range(self.dim):
            for j in range(self.dim):
                want = (self.parity[i] + self.parity[j]) & 1
                for k, v in self.brackets[i][j].items():
                    if field.is_zero(v):
                        raise ShapeError("bracket table stores a zero entry")
                    if self.parity[k] != want:
                        raise GradingError(
                            f"[{self.labels[i]}, {self.labels[j]}] leaves the "
                            f"parity-{want} component at {self.labels[k]}")

    # -- brackets -----------------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> dict:
        return self.brackets[i][j]

    def bracket_vec(self, x: dict, y: dict) -> dict:
        f = self.field
        p = f.characteristic
        acc: dict[int, object] = {}
        for i, xi in x.items():
            row = self.brackets[i]
            for j, yj in y.items():
                c = xi * yj
                for k, v in row[j].items():
                    acc[k] = acc.get(k, 0) + c * v
        if p:
            return {k: v % p for k, v in acc.items() if v % p}
        return {k: v for k, v in acc.items() if v}

    def sign(self, i: int, j: int):
        """(-1)^{|b_i||b_j|} as a field scalar."""
        neg = self.parity[i] and self.parity[j]
        one = self.field.one()
        return self.field.neg(one) if neg else one

    # -- dense view for the vectorised checks --------------------------------

    def dense_tensor(self):
        """(T, scale): int64/float64 array with T[i,j,k] = scale * c_ijk.

        Over F_p entries are reduced mod p and scale is None; over Q the
        entries are the structure constants times a global denominator
        (exactness is preserved because the identities are homogeneous of
        the same degree on both sides).  Returns (None, None) if the values
        do not fit the exact integer windows.
        """
        if self._dense is not None:
            return self._dense
        q = self.dim
        ch = self.field.characteristic
        T = np.zeros((q, q, q), dtype=np.int64)
        if ch:
            for i in range(q):
                for j in range(q):
                    for k, v in self.brackets[i][j].items():
                        T[i, j, k] = v % ch
            self._dense = (T, None)
            return self._dense
        den = 1
        for i in range(q):
            for j in range(q):
                for v in self.brackets[i][j].values():
                    d = v.denominator
                    den = den * d // gcd(den, d)
        maxabs = 0
        try:
            for i in range(q):
                for j in range(q):
                    for k, v in self.brackets[i][j].items():
                        iv = int(v * den)
                        if abs(iv) > 2 ** 40:
                            raise OverflowError
                        T[i, j, k] = iv
                        maxabs = max(maxabs, abs(iv))
        except OverflowError:
            self._dense = (None, None)
            return self._dense
        if q * maxabs * maxabs >= _F53:
            self._dense = (None, None)
            return self._dense
        self._dense = (T, den)
        return self._dense

    def __eq__(self, other):
        return (isinstance(other, SuperAlgebra) and self.field == other.field
                and self.parity == other.parity and self.brackets == other.brackets)

    def __repr__(self):
        odd = sum(self.parity)
        return f"SuperAlgebra(dim={self.dim}, odd={odd}, char={self.field.characteristic})"


# ---------------------------------------------------------------------------
# identity checks
# ---------------------------------------------------------------------------

def check_identities(L: SuperAlgebra, *, max_reported: int = 32) -> dict:
    """Exhaustive basis sweeps of both graded identities.

    Returns {"leibniz_super": [(i,j,k)...], "lie_super": [(i,j)...]};
    empty lists certify the corresponding identity.
    """
    T, _ = L.dense_tensor()
    if T is not None:
        return _check_identities_dense(L, T, max_reported)
    return _check_identities_sparse(L, max_reported)


def _check_identities_dense(L, T, max_reported):
    q = L.dim
    ch = L.field.characteristic
    par = np.asarray(L.parity, dtype=np.int64)
    sgn = 1.0 - 2.0 * np.outer(par, par)
    Tf = T.astype(np.float64)
    T_flat = Tf.reshape(q, q * q)      # (l, (k,m))
    T_flat2 = Tf.reshape(q * q, q)     # ((j,k), l)
    leib = []
    for i in range(q):
        lhs = (Tf[i] @ T_flat).reshape(q, q, q)
        r1 = (T_flat2 @ Tf[i]).reshape(q, q, q)
        r2 = np.tensordot(Tf[i], Tf, axes=([1], [1])).transpose(1, 0, 2)
        delta = lhs - r1 + sgn[i][:, None, None] * r2
        if ch:
            delta = np.mod(delta, ch)
        bad = np.argwhere(delta.any(axis=2))
        for j, k in bad:
            leib.append((i, int(j), int(k)))
            if len(leib) >= max_reported:
                break
        if len(leib) >= max_reported:
            break
    anti = Tf + sgn[:, :, None] * Tf.transpose(1, 0, 2)
    if ch:
        anti = np.mod(anti, ch)
    lie = [(int(i), int(j)) for i, j in np.argwhere(anti.any(axis=2))[:max_reported]]
    return {"leibniz_super": leib, "lie_super": lie}


def _check_identities_sparse(L, max_reported):
    leib, lie = [], []
    f = L.field
    for i in range(L.dim):
        for j in range(L.dim):
            s = L.sign(i, j)
            for k in range(L.dim):
                lhs = L.bracket_vec(L.brackets[i][j], {k: f.one()})
                r1 = L.bracket_vec({i: f.one()}, L.brackets[j][k])
                r2 = L.bracket_vec({j: f.one()}, L.brackets[i][k])
                delta = dict(lhs)
                for t, v in r1.items():
                    delta[t] = delta.get(t, f.zero()) - v
                for t, v in r2.items():
                    delta[t] = delta.get(t, f.zero()) + s * v
                if any(not f.is_zero(v if not f.characteristic else v % f.characteristic)
                       for v in delta.values()):
                    leib.append((i, j, k))
                    if len(leib) >= max_reported:
                        break
            if len(leib) >= max_reported:
                break
            v = dict(L.brackets[i][j])
            for t, w in L.brackets[j][i].items():
                v[t] = v.get(t, f.zero()) + s * w
            if any(not f.is_zero(x if not f.characteristic else x % f.characteristic)
                   for x in v.values()):
                lie.append((i, j))
    return {"leibniz_super": leib, "lie_super": lie[:max_reported]}


def require_leibniz(L: SuperAlgebra, what: str) -> None:
    rep = check_identities(L)
    if rep["leibniz_super"]:
        raise IdentityError(f"{what} violates the graded Leibniz identity at "
                            f"triples {rep['leibniz_super'][:5]}")


def require_lie(L: SuperAlgebra, what: str) -> None:
    rep = check_identities(L)
    if rep["leibniz_super"] or rep["lie_super"]:
        raise IdentityError(f"{what} is not a Lie superalgebra: "
                            f"leibniz={rep['leibniz_super'][:3]} lie={rep['lie_super'][:3]}")


# ---------------------------------------------------------------------------
# gl(m, n, A)
# ---------------------------------------------------------------------------

def tau(i: int, j: int, m: int, n: int) -> int:
    """Parity of matrix position (i, j): 0 inside the diagonal blocks."""
    s = m + n
    if not (1 <= i <= s and 1 <= j <= s):
        raise ShapeError(f"index ({i},{j}) outside 1..{s}")
    return 0 if (i <= m) == (j <= m) else 1


class GlAlgebra(SuperAlgebra):
    """gl(m, n, A) on the basis E_ij(b_k), ordered (i, j, k) lexicographically."""

    def __init__(self, m: int, n: int, coeff: CoeffAlgebra):
        self.m = m
        self.n = n
        self.coeff = coeff
        s = m + n
        dA = coeff.dim
        f = coeff.field
        dim = s * s * dA
        parity = []
        labels = []
        for i in range(1, s + 1):
            for j in range(1, s + 1):
                t = tau(i, j, m, n)
                for k in range(dA):
                    parity.append(t)
                    labels.append(f"E[{i},{j}]({coeff.labels[k]})")
        idx = self.flat_index
        brackets = [[{} for _ in range(dim)] for _ in range(dim)]
        one = f.one()
        for i in range(1, s + 1):
            for j in range(1, s + 1):
                tij = tau(i, j, m, n)
                for k in range(1, s + 1):
                    for l in range(1, s + 1):
                        tkl = tau(k, l, m, n)
                        sign = -one if (tij and tkl) else one
                        for a in range(dA):
                            for b in range(dA):
                                acc: dict[int, object] = {}
                                if j == k:  # E_il(ab)
                                    for t, c in enumerate(coeff.mul[a][b]):
                                        if not f.is_zero(c):
                                            acc[idx(i, l, t)] = acc.get(idx(i, l, t), f.zero()) + c
                                if l == i:  # -(-1)^{tau tau} E_kj(ba)
                                    for t, c in enumerate(coeff.mul[b][a]):
                                        if not f.is_zero(c):
                                            key = idx(k, j, t)
                                            acc[key] = acc.get(key, f.zero()) - sign * c
                                acc = {t: v for t, v in acc.items() if not f.is_zero(v)}
                                if acc:
                                    brackets[idx(i, j, a)][idx(k, l, b)] = acc
        super().__init__(f, parity, brackets, labels)

    def flat_index(self, i: int, j: int, k: int) -> int:
        s = self.m + self.n
        return ((i - 1) * s + (j - 1)) * self.coeff.dim + k

    def E(self, i: int, j: int, a) -> dict:
        """Coordinate vector of E_ij(a) for a an AlgebraElement or coords."""
        coords = a.coords if isinstance(a, AlgebraElement) else a
        f = self.field
        return {self.flat_index(i, j, k): c
                for k, c in enumerate(coords) if not f.is_zero(c)}

    def element(self, vec: dict) -> "GlElement":
        return GlElement(self, vec)


class GlElement:
    """A block matrix over the coefficient algebra, as entries and as
    coordinates in the E_ij(b_k) basis."""

    def __init__(self, parent: GlAlgebra, vec: dict):
        self.parent = parent
        f = parent.field
        self.vec = {k: v for k, v in vec.items() if not f.is_zero(v)}
        s = parent.m + parent.n
        dA = parent.coeff.dim
        rows = []
        for i in range(1, s + 1):
            row = []
            for j in range(1, s + 1):
                coords = [f.zero()] * dA
                base = ((i - 1) * s + (j - 1)) * dA
                for k in range(dA):
                    v = self.vec.get(base + k)
                    if v is not None:
                        coords[k] = v
                row.append(parent.coeff.element(coords))
            rows.append(tuple(row))
        self.entries = tuple(rows)

    def entry(self, i: int, j: int) -> AlgebraElement:
        return self.entries[i - 1][j - 1]


def build_gl(m: int, n: int, A: CoeffAlgebra) -> GlAlgebra:
    """The matrix superalgebra with supercommutator bracket; certified
    Lie-super (hence Leibniz-super) at construction."""
    if m < 0 or n < 0 or m + n < 2:
        raise ShapeError("need m, n >= 0 and m + n >= 2")
    gl = GlAlgebra(m, n, A)
    require_lie(gl, f"gl({m},{n},{A.name})")
    return gl


def supertrace(X: GlElement) -> AlgebraElement:
    """Sum of the first m diagonal entries minus the last n."""
    gl = X.parent
    acc = gl.coeff.element([gl.field.zero()] * gl.coeff.dim)
    for i in range(1, gl.m + 1):
        acc = acc + X.entry(i, i)
    for i in range(gl.m + 1, gl.m + gl.n + 1):
        acc = acc - X.entry(i, i)
    return acc


# ---------------------------------------------------------------------------
# derived subalgebra and sl
# ---------------------------------------------------------------------------

def _row_parity(row: dict, parity) -> int:
    seen = {parity[k] for k in row}
    if len(seen) != 1:
        raise GradingError("subspace basis row mixes parities")
    return seen.pop()


def restrict_to_subspace(L: SuperAlgebra, S: Subspace, labels=None) -> SuperAlgebra:
    """Superalgebra structure on a bracket-closed graded subspace."""
    par = [_row_parity(r, L.parity) for r in S.rows]
    brackets = []
    for rs in S.rows:
        row = []
        for rt in S.rows:
            w = L.bracket_vec(rs, rt)
            coords = S.coords_of(w)  # raises if not closed
            row.append({t: c for t, c in enumerate(coords) if not L.field.is_zero(c)})
        brackets.append(row)
    if labels is None:
        labels = [L.labels[p] for p in S.pivots]
    return SuperAlgebra(L.field, par, brackets, labels)


def derived_subalgebra(L: SuperAlgebra):
    """Span of all brackets, with the superalgebra structure it carries."""
    if L._derived is not None:
        return L._derived
    vecs = (L.brackets[i][j] for i in range(L.dim) for j in range(L.dim))
    S = Subspace.from_vectors(L.field, L.dim, vecs)
    restricted = restrict_to_subspace(L, S)
    L._derived = (S, restricted)
    return L._derived


def is_perfect(L: SuperAlgebra) -> bool:
    S, _ = derived_subalgebra(L)
    return S.dim == L.dim


class SlAlgebra(SuperAlgebra):
    """sl(m, n, A) := the derived subalgebra of gl(m, n, A).

    Carries the ambient gl, the embedding subspace, and coordinate
    converters both ways.
    """

    def __init__(self, gl: GlAlgebra):
        self.gl = gl
        self.embedding, restricted = derived_subalgebra(gl)
        super().__init__(restricted.field, restricted.parity, restricted.brackets,
                         restricted.labels)
        self.m, self.n, self.coeff = gl.m, gl.n, gl.coeff

    def from_gl(self, vec: dict) -> dict:
        coords = self.embedding.coords_of(vec)
        return {t: c for t, c in enumerate(coords) if not self.field.is_zero(c)}

    def to_gl(self, vec: dict) -> dict:
        f = self.field
        acc: dict[int, object] = {}
        for t, c in vec.items():
            for k, v in self.embedding.rows[t].items():
                acc[k] = acc.get(k, 0) + c * v
        if f.characteristic:
            return {k: v % f.characteristic for k, v in acc.items() if v % f.characteristic}
        return {k: v for k, v in acc.items() if v}

    def gl_element(self, vec: dict) -> GlElement:
        return self.gl.element(self.to_gl(vec))


def build_sl(m: int, n: int, A: CoeffAlgebra) -> SlAlgebra:
    """Derived subalgebra of gl with the supertrace cross-checks.

    The subspace is certified equal to {X : str X in [A, A]}, and when A is
    commutative also equal to {X : str X = 0}.
    """
    from .algebras import commutator_subspace

    gl = build_gl(m, n, A)
    sl = SlAlgebra(gl)
    f = A.field
    s = m + n
    ent = {}
    for i in range(1, s + 1):
        sign = f.one() if i <= m else f.neg(f.one())
        for k in range(A.dim):
            ent[k, gl.flat_index(i, i, k)] = sign
    str_matrix = ExactMatrix(f, A.dim, gl.dim, ent)
    comm = commutator_subspace(A)
    qdim, P = quotient(A.dim, comm)
    from .linalg import rank_kernel_image
    _, ker, _ = rank_kernel_image(P @ str_matrix)
    if not (ker.contains_subspace(sl.embedding) and sl.embedding.contains_subspace(ker)):
        raise IdentityError("derived subalgebra differs from {X: str X in [A,A]}")
    if A.is_commutative():
        _, ker0, _ = rank_kernel_image(str_matrix)
        if not (ker0.contains_subspace(sl.embedding) and sl.embedding.contains_subspace(ker0)):
            raise IdentityError("commutative case: derived subalgebra differs from {str X = 0}")
    return sl


# ---------------------------------------------------------------------------
# ideals and the antisymmetrised quotient
# ---------------------------------------------------------------------------

def ideal_closure(L: SuperAlgebra, seed: Subspace) -> Subspace:
    """Smallest subspace containing seed closed under brackets with L."""
    if seed.ambient_dim != L.dim:
        raise ShapeError("seed lives in the wrong ambient space")
    from .linalg import _new_echelon
    eng = _new_echelon(L.field, L.dim)
    queue = []
    for r in seed.rows:
        if eng.add_vector(r):
            queue.append(r)
    f = L.field
    while queue:
        v = queue.pop()
        for i in range(L.dim):
            e = {i: f.one()}
            for w in (L.bracket_vec(e, v), L.bracket_vec(v, e)):
                if w and eng.add_vector(w):
                    queue.append(w)
    pivots, rows = eng.finalized()
    return Subspace(L.field, L.dim, pivots, rows)


def squares_span(L: SuperAlgebra) -> Subspace:
    """span{ [x, y] + (-1)^{|x||y|} [y, x] } over basis pairs."""
    f = L.field
    vecs = []
    for i in range(L.dim):
        for j in range(i, L.dim):
            s = L.sign(i, j)
            v = dict(L.brackets[i][j])
            for t, w in L.brackets[j][i].items():
                nv = v.get(t, f.zero()) + s * w
                if f.characteristic:
                    nv %= f.characteristic
                if f.is_zero(nv):
                    v.pop(t, None)
                else:
                    v[t] = nv
            if v:
                vecs.append(v)
    return Subspace.from_vectors(f, L.dim, vecs)


def slie_quotient(L: SuperAlgebra):
    """Quotient by the ideal generated by the symmetrised brackets.

    Returns (quotient SuperAlgebra, projection ExactMatrix).  The quotient
    is certified Lie-super and the projection a bracket homomorphism.
    """
    f = L.field
    ideal = ideal_closure(L, squares_span(L))
    qdim, P = quotient(L.dim, ideal)
    # well-definedness: the ideal really is two-sided
    for u in ideal.rows:
        for i in range(L.dim):
            e = {i: f.one()}
            if P.apply(L.bracket_vec(u, e)) or P.apply(L.bracket_vec(e, u)):
                raise IdentityError("ideal closure is not bracket-stable")
    pivset = set(ideal.pivots)
    nonpiv = [j for j in range(L.dim) if j not in pivset]
    par = [L.parity[j] for j in nonpiv]
    brackets = []
    for a in nonpiv:
        row = []
        fa = {a: f.one()}
        for b in nonpiv:
            row.append(P.apply(L.bracket_vec(fa, {b: f.one()})))
        brackets.append(row)
    labels = [L.labels[j] for j in nonpiv]
    Q = SuperAlgebra(f, par, brackets, labels)
    Q._section_coords = tuple(nonpiv)  # representatives of the quotient basis
    require_lie(Q, "antisymmetrised quotient")
    # projection is a bracket homomorphism on all basis pairs
    for i in range(L.dim):
        pi = P.apply({i: f.one()})
        for j in range(L.dim):
            pj = P.apply({j: f.one()})
            lhs = P.apply(L.brackets[i][j])
            rhs = Q.bracket_vec(pi, pj)
            if lhs != rhs:
                raise IdentityError(f"projection fails to be a homomorphism at ({i},{j})")
    return Q, P
