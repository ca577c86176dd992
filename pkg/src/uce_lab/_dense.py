"""Dense numpy kernels for prime-field elimination on large matrices.

Everything here is exact: values are integers carried in float64 inside a
2^52 window, so BLAS matmuls and the floor-based modular reduction commit
no rounding.  The span engine returns the canonical reduced echelon basis,
identical to the sparse engine's, so callers may switch freely.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse as _sp

_WINDOW = float(2 ** 52)


def fast_mod(x: np.ndarray, p: int, out: np.ndarray | None = None) -> np.ndarray:
    """Exact x mod p for integer-valued float64 arrays with |x| < 2^52.

    floor(x/p) computed through the reciprocal can be off by one, so the
    result is corrected into [0, p) afterwards; every intermediate stays an
    exactly representable integer.
    """
    q = np.multiply(x, 1.0 / p)
    np.floor(q, out=q)
    np.multiply(q, float(p), out=q)
    if out is None:
        out = np.empty_like(x)
    np.subtract(x, q, out=out)
    out[out < 0] += p
    out[out >= p] -= p
    return out


def mul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) % p for arrays with entries in [0, p)."""
    if A.shape[1] != B.shape[0]:
        raise ValueError("inner dimension mismatch")
    if (p - 1) * (p - 1) >= _WINDOW:
        raise ValueError(f"prime {p} too large for the float64 window")
    step = max(1, int(_WINDOW // ((p - 1) ** 2)))
    k = A.shape[1]
    if k <= step:
        return fast_mod(A @ B, p)
    acc = np.zeros((A.shape[0], B.shape[1]))
    for lo in range(0, k, step):
        acc += A[:, lo:lo + step] @ B[lo:lo + step, :]
        fast_mod(acc, p, out=acc)
    return acc


def _rref_small(R: np.ndarray, p: int) -> tuple[list[int], np.ndarray]:
    """Full RREF of a modest block (recursive halving, rank-1 base case)."""
    k = R.shape[0]
    if k <= 8:
        piv: list[int] = []
        rows: list[np.ndarray] = []
        for i in range(k):
            row = R[i]
            for c, rv in zip(piv, rows):
                a = row[c]
                if a:
                    row = fast_mod(row - a * rv, p)
            nz = row.nonzero()[0]
            if nz.size == 0:
                continue
            c0 = int(nz[0])
            inv = pow(int(row[c0]), -1, p)
            if inv != 1:
                row = fast_mod(row * float(inv), p)
            for t, (c, rv) in enumerate(zip(piv, rows)):
                a = rv[c0]
                if a:
                    rows[t] = fast_mod(rv - a * row, p)
            piv.append(c0)
            rows.append(row)
        if not rows:
            return [], np.zeros((0, R.shape[1]))
        return piv, np.vstack(rows)
    half = k // 2
    piv1, B1 = _rref_small(R[:half], p)
    R2 = R[half:]
    if piv1:
        g = R2[:, piv1]
        if g.any():
            R2 = fast_mod(R2 - mul_mod(g, B1, p), p)
    piv2, B2 = _rref_small(R2, p)
    if not piv2:
        return piv1, B1
    if not piv1:
        return piv2, B2
    g = B1[:, piv2]
    if g.any():
        B1 = fast_mod(B1 - mul_mod(g, B2, p), p)
    return piv1 + piv2, np.vstack([B1, B2])


def _rref_block(R: np.ndarray, p: int, panel: int = 256) -> tuple[list[int], np.ndarray]:
    """Full RREF of a dense block.

    Forward pass builds panel-sized echelon blocks, each internally reduced
    and zero at the pivots of earlier blocks; corrections accumulate
    unreduced (they stay far inside the exact window) and each panel is
    reduced once.  A single backward sweep then clears the remaining pivot
    columns, so the basis is never rewritten during the forward pass.
    """
    k, n = R.shape
    if (p - 1) * (p - 1) * 2 >= _WINDOW:
        raise ValueError(f"prime {p} too large for the dense engine")
    blocks: list[tuple[list[int], np.ndarray]] = []
    rank = 0
    # corrections are reduced matrices, so each block step grows entries by
    # at most p; guard the window anyway
    max_steps = int(_WINDOW / 4 / p)
    for lo in range(0, k, panel):
        P = fast_mod(np.array(R[lo:lo + panel]), p)
        steps = 0
        for piv_b, rows_b in blocks:
            g = fast_mod(P[:, piv_b], p)
            if g.any():
                P -= mul_mod(g, rows_b, p)
                steps += 1
                if steps >= max_steps:
                    fast_mod(P, p, out=P)
                    steps = 0
        fast_mod(P, p, out=P)
        live = np.nonzero(P.any(axis=1))[0]
        if live.size == 0:
            continue
        piv_new, rows_new = _rref_small(P[live], p)
        if piv_new:
            blocks.append((piv_new, rows_new))
            rank += len(piv_new)
            if rank == n:
                break
    if not blocks:
        return [], np.zeros((0, n))
    # backward sweep: clear later blocks' pivot columns from earlier blocks
    tail_piv: list[int] = []
    tail = None
    for b in range(len(blocks) - 1, -1, -1):
        piv_b, rows_b = blocks[b]
        if tail is not None:
            g = rows_b[:, tail_piv]
            if g.any():
                rows_b = fast_mod(rows_b - mul_mod(g, tail, p), p)
        tail = rows_b if tail is None else np.vstack([rows_b, tail])
        tail_piv = piv_b + tail_piv
    return tail_piv, tail


class BlockRrefModp:
    """Incrementally maintained full RREF over F_p, batch at a time.

    Rows are stored as float64 holding exact integers in [0, p).
    """

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.B = np.zeros((0, n))
        self.J: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.J)

    def add_batch(self, R: np.ndarray) -> int:
        """Absorb rows of R; returns how many new pivots appeared."""
        if len(self.J) == self.n:
            return 0  # span is already everything
        p = self.p
        R = fast_mod(R.astype(np.float64, copy=True), p)
        if self.J:
            gathered = R[:, self.J]
            if np.any(gathered):
                R = fast_mod(R - mul_mod(gathered, self.B, p), p)
                assert not np.any(R[:, self.J]), "one-shot reduction failed"
        live = np.nonzero(R.any(axis=1))[0]
        if live.size == 0:
            return 0
        new_piv, NB = _rref_block(R[live], p)
        if not new_piv:
            return 0
        if self.J:
            gathered = self.B[:, new_piv]
            if np.any(gathered):
                self.B = fast_mod(self.B - mul_mod(gathered, NB, p), p)
        self.B = np.vstack([self.B, NB]) if self.B.size else NB
        self.J.extend(new_piv)
        return len(new_piv)

    def membership_functionals(self) -> tuple[list[int], np.ndarray]:
        """Non-pivot columns and W with: v in span(B)  iff  W @ v == 0."""
        pivset = set(self.J)
        free = [j for j in range(self.n) if j not in pivset]
        W = np.zeros((len(free), self.n))
        for t, f in enumerate(free):
            W[t, f] = 1.0
        if self.J and free:
            block = self.B[:, free]  # (r, q)
            for r_idx, c in enumerate(self.J):
                W[:, c] = fast_mod(-block[r_idx, :], self.p)
        return free, W

    def finalized(self) -> tuple[list[int], list[dict[int, int]]]:
        order = np.argsort(self.J)
        pivots = [self.J[i] for i in order]
        rows = []
        for i in order:
            r = self.B[i]
            nz = np.nonzero(r)[0]
            rows.append({int(j): int(r[j]) for j in nz})
        return pivots, rows


def span_rref_modp(n: int, p: int, vectors, *, seed: int = 0):
    """Canonical RREF basis of the span of many sparse vectors over F_p.

    `vectors` is an iterable of dicts {coord: int}.  A seeded random bucket
    compression cuts the work; the result is verified exactly against every
    input vector (vacuous when the span turns out to be everything), so the
    output does not depend on the compression at all.
    """
    data, rows_idx, cols_idx = [], [], []
    count = 0
    for v in vectors:
        for j, val in v.items():
            val %= p
            if val:
                data.append(val)
                rows_idx.append(count)
                cols_idx.append(j)
        count += 1
    M = _sp.csr_matrix(
        (np.asarray(data, dtype=np.float64),
         (np.asarray(rows_idx, dtype=np.int64), np.asarray(cols_idx, dtype=np.int64))),
        shape=(count, n))
    eng = BlockRrefModp(n, p)
    if count == 0:
        return eng.finalized()

    rng = np.random.default_rng(seed)
    nb = min(count, n + 64)
    if nb < count:
        buckets = rng.integers(0, nb, size=count)
        weights = rng.integers(1, p, size=count).astype(np.float64)
        sel = _sp.csr_matrix((weights, (buckets, np.arange(count))), shape=(nb, count))
        S = fast_mod(np.asarray((sel @ M).todense()), p)
    else:
        S = fast_mod(np.asarray(M.todense()), p)

    eng.add_batch(S)

    # exact verification sweep: every input vector must lie in the span
    while True:
        free, W = eng.membership_functionals()
        if not free:
            break
        step = max(1, int(_WINDOW // ((p - 1) ** 2)))
        if n <= step:
            res = fast_mod(np.asarray((M @ W.T)), p)
        else:
            res = np.zeros((count, W.shape[0]))
            for lo in range(0, n, step):
                res += M[:, lo:lo + step] @ W.T[lo:lo + step, :]
                fast_mod(res, p, out=res)
            res = fast_mod(res, p)
        bad = np.nonzero(np.asarray(res).any(axis=1))[0]
        if bad.size == 0:
            break
        eng.add_batch(np.asarray(M[bad].todense()))
    return eng.finalized()
