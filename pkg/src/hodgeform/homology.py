"""Boundary operators and rational Betti numbers.

Ranks of the boundary operators are computed exactly over the rationals;
that is the source of truth.  A floating singular-value rank is available as
a fast cross-check and must agree (Betti numbers are integers and must not
be victims of round-off).
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, gcd
from typing import Iterable

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .complexes import SimplicialComplex, is_closed_pseudomanifold, orient

__all__ = [
    "boundary_matrix",
    "betti_numbers",
    "betti_numbers_float",
    "euler_characteristic",
    "poincare_duality_check",
    "exact_rank",
    "floating_rank",
]

# Exact elimination dispatch: plain dense Bareiss is competitive only for
# small matrices; everything larger goes through the sparse column reduction.
_DENSE_COLUMN_LIMIT = 150
_FLOAT_RANK_RTOL = 1e-8


def boundary_matrix(K: SimplicialComplex, k: int) -> sp.csc_matrix:
    """Signed incidence of k-simplices on their (k-1)-faces.

    Column j lists the faces of the j-th k-simplex with alternating signs
    (-1)^i for the face omitting the i-th vertex.
    """
    if not 1 <= k <= K.dimension:
        raise ValueError(f"degree {k} out of range 1..{K.dimension}")
    rows_of = K._index_maps[k - 1]
    simplices = K.simplices(k)
    data = np.empty((len(simplices), k + 1), dtype=np.int64)
    rows = np.empty((len(simplices), k + 1), dtype=np.int64)
    for j, s in enumerate(simplices):
        for i in range(k + 1):
            rows[j, i] = rows_of[s[:i] + s[i + 1 :]]
            data[j, i] = -1 if i % 2 else 1
    indptr = np.arange(0, (len(simplices) + 1) * (k + 1), k + 1)
    mat = sp.csc_matrix(
        (data.ravel(), rows.ravel(), indptr),
        shape=(K.simplex_count(k - 1), len(simplices)),
    )
    mat.sort_indices()
    return mat


def _strip_content(col: dict[int, int]) -> None:
    g = 0
    for v in col.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for r in col:
            col[r] //= g


def _reduce_columns(columns: Iterable[dict[int, int] | None]):
    """Left-to-right column reduction over Q (integer arithmetic, gcd-stripped).

    Returns (rank, pivot row set).  ``None`` entries are skipped.
    """
    pivot_by_low: dict[int, dict[int, int]] = {}
    rank = 0
    for col in columns:
        if col is None:
            continue
        while col:
            low = max(col)
            other = pivot_by_low.get(low)
            if other is None:
                _strip_content(col)
                pivot_by_low[low] = col
                rank += 1
                break
            a, b = other[low], col[low]
            g = gcd(a, b)
            a //= g
            b //= g
            merged = {r: v * a for r, v in col.items()}
            for r, v in other.items():
                nv = merged.get(r, 0) - v * b
                if nv:
                    merged[r] = nv
                else:
                    merged.pop(r, None)
            if merged and max(abs(v) for v in merged.values()) > 1 << 62:
                _strip_content(merged)
            col = merged
    return rank, set(pivot_by_low)


def _columns_as_dicts(mat: sp.csc_matrix) -> list[dict[int, int]]:
    out = []
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    for j in range(mat.shape[1]):
        lo, hi = indptr[j], indptr[j + 1]
        out.append({int(indices[t]): int(data[t]) for t in range(lo, hi)})
    return out


def _dense_rank_bareiss(mat: sp.csc_matrix) -> int:
    """Fraction-free elimination with exact integers (small matrices only).

    Every row of the active submatrix is updated at every step; the division
    by the previous pivot is exact only under that discipline.
    """
    m = [[int(x) for x in row] for row in mat.toarray()]
    rows, cols = len(m), len(m[0]) if m else 0
    rank = 0
    prev = 1
    for c in range(cols):
        pivot_row = next((r for r in range(rank, rows) if m[r][c]), None)
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        p = m[rank][c]
        row_p = m[rank]
        for r in range(rank + 1, rows):
            row_r = m[r]
            f = row_r[c]
            for cc in range(c + 1, cols):
                row_r[cc] = (row_r[cc] * p - f * row_p[cc]) // prev
            row_r[c] = 0
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def exact_rank(mat: sp.csc_matrix) -> int:
    """Rank over Q of an integer sparse matrix."""
    if mat.shape[0] == 0 or mat.shape[1] == 0:
        return 0
    if mat.shape[1] <= _DENSE_COLUMN_LIMIT and mat.shape[0] <= _DENSE_COLUMN_LIMIT:
        return _dense_rank_bareiss(mat)
    rank, _ = _reduce_columns(_columns_as_dicts(mat))
    return rank


def floating_rank(mat: sp.csc_matrix) -> int:
    """Singular-value rank with a relative threshold, for cross-checking."""
    if mat.shape[0] == 0 or mat.shape[1] == 0 or mat.nnz == 0:
        return 0
    svals = scipy.linalg.svdvals(mat.toarray().astype(np.float64))
    if svals.size == 0:
        return 0
    return int(np.count_nonzero(svals > _FLOAT_RANK_RTOL * svals[0]))


@lru_cache(maxsize=64)
def _boundary_ranks(K: SimplicialComplex) -> tuple[int, ...]:
    """Ranks of all boundary operators, reduced top-down with clearing.

    A pivot row of the reduced degree-(k+1) matrix marks a k-simplex whose
    column in the degree-k matrix is a combination of earlier columns (it
    reduces to zero), so those columns are skipped.
    """
    n = K.dimension
    ranks = [0] * (n + 2)
    cleared: set[int] = set()
    for k in range(n, 0, -1):
        cols = _columns_as_dicts(boundary_matrix(K, k))
        for j in cleared:
            cols[j] = None
        ranks[k], cleared = _reduce_columns(cols)
    return tuple(ranks)


def betti_numbers(K: SimplicialComplex, method: str = "exact") -> tuple[int, ...]:
    """Rational Betti vector b_0..b_n.

    ``method="exact"`` (default) uses fraction-free elimination;
    ``method="float"`` uses SVD ranks and exists as the fast path that the
    test suite pins against the exact one.
    """
    n = K.dimension
    if method == "exact":
        ranks = _boundary_ranks(K)
    elif method == "float":
        ranks = tuple(
            [0] + [floating_rank(boundary_matrix(K, k)) for k in range(1, n + 1)] + [0]
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    f = K.f_vector
    return tuple(f[k] - ranks[k] - ranks[k + 1] for k in range(n + 1))


def betti_numbers_float(K: SimplicialComplex) -> tuple[int, ...]:
    return betti_numbers(K, method="float")


def euler_characteristic(K: SimplicialComplex) -> int:
    """Alternating sum of face counts."""
    return sum((-1) ** k * c for k, c in enumerate(K.f_vector))


def poincare_duality_check(K: SimplicialComplex) -> bool:
    """b_k == b_{n-k} for all k; requires a closed orientable complex."""
    if not is_closed_pseudomanifold(K):
        raise ValueError("duality check requires a closed pseudomanifold")
    if orient(K) is None:
        raise ValueError("duality check requires an orientable complex")
    b = betti_numbers(K)
    return b == b[::-1]


def torus_betti_bound(n: int, k: int) -> int:
    """The degree-k bound attained by the n-torus: C(n, k)."""
    return comb(n, k)
