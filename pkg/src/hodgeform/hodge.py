"""Weighted inner products, Hodge Laplacians, harmonic bases, decomposition.

The discrete metric is one strictly positive weight per simplex, i.e. a
diagonal inner product W_k per degree.  The coboundary d_k is the transpose
of the boundary operator; its adjoint under the weights is

    delta_k = W_{k-1}^{-1} d_{k-1}^T W_k

and the degree-k Laplacian is Delta_k = delta_{k+1} d_k + d_{k-1} delta_k.
Solvers work on the similar symmetric matrix S_k = W^{1/2} Delta_k W^{-1/2},
whose orthonormal eigenvectors turn into w-orthonormal eigenvectors of
Delta_k after scaling by W^{-1/2}.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complexes import Cochain, SimplicialComplex
from .errors import NumericalError
from .homology import betti_numbers, boundary_matrix

__all__ = [
    "MetricWeights",
    "HarmonicBasis",
    "unit_weights",
    "random_weights",
    "weights_from_arrays",
    "inner",
    "norm",
    "coboundary",
    "laplacian",
    "harmonic_basis",
    "harmonic_projection",
    "hodge_decompose",
]

DEFAULT_TOL = 1e-9
# Dense symmetric eigendecomposition below this size; shift-invert iteration
# above, certified against the exact Betti number either way.
DENSE_EIGEN_LIMIT = 3000


@dataclass(frozen=True, eq=False)
class MetricWeights:
    """One positive weight per simplex, per degree."""

    by_degree: tuple[np.ndarray, ...]

    def __post_init__(self):
        for k, w in enumerate(self.by_degree):
            if w.size and (not np.all(np.isfinite(w)) or np.any(w <= 0)):
                raise ValueError(f"degree-{k} weights must be strictly positive")

    def degree(self, k: int) -> np.ndarray:
        return self.by_degree[k]

    def replace(self, k: int, values: np.ndarray) -> "MetricWeights":
        parts = list(self.by_degree)
        parts[k] = values
        return MetricWeights(tuple(parts))


def weights_from_arrays(K: SimplicialComplex, arrays) -> MetricWeights:
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    if len(arrays) != K.dimension + 1:
        raise ValueError(
            f"need {K.dimension + 1} weight vectors, got {len(arrays)}"
        )
    for k, a in enumerate(arrays):
        if a.shape != (K.simplex_count(k),):
            raise ValueError(
                f"degree-{k} weights have length {a.size}, "
                f"expected {K.simplex_count(k)}"
            )
    return MetricWeights(tuple(arrays))


def unit_weights(K: SimplicialComplex) -> MetricWeights:
    return MetricWeights(
        tuple(np.ones(K.simplex_count(k)) for k in range(K.dimension + 1))
    )


def random_weights(K, rng, low: float = 1e-2, high: float = 1e2) -> MetricWeights:
    """Log-uniform weights in [low, high]."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    lo, hi = np.log(low), np.log(high)
    return MetricWeights(
        tuple(
            np.exp(rng.uniform(lo, hi, size=K.simplex_count(k)))
            for k in range(K.dimension + 1)
        )
    )


def _check_weights(K: SimplicialComplex, w: MetricWeights) -> None:
    if len(w.by_degree) != K.dimension + 1:
        raise ValueError("weights do not match the complex's dimensions")
    for k, a in enumerate(w.by_degree):
        if a.shape != (K.simplex_count(k),):
            raise ValueError(f"degree-{k} weights do not match the face count")


def inner(w: MetricWeights, k: int, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x, w.degree(k) * y))


def norm(w: MetricWeights, k: int, x: np.ndarray) -> float:
    return float(np.sqrt(max(inner(w, k, x, x), 0.0)))


def coboundary(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """d_k: k-cochains -> (k+1)-cochains (transpose of the boundary)."""
    if not 0 <= k < K.dimension:
        raise ValueError(f"coboundary degree {k} out of range")
    return boundary_matrix(K, k + 1).T.tocsr().astype(np.float64)


@lru_cache(maxsize=512)
def _sym_factors(K: SimplicialComplex, w: MetricWeights, k: int):
    """(up, down) with S_k = up^T up + down down^T, in W^{1/2} coordinates."""
    _check_weights(K, w)
    sqrt_k = np.sqrt(w.degree(k))
    up = None
    if k < K.dimension:
        d = coboundary(K, k)
        up = sp.diags(np.sqrt(w.degree(k + 1))) @ d @ sp.diags(1.0 / sqrt_k)
    down = None
    if k > 0:
        d = coboundary(K, k - 1)
        down = sp.diags(sqrt_k) @ d @ sp.diags(1.0 / np.sqrt(w.degree(k - 1)))
    return up, down


@lru_cache(maxsize=512)
def _sym_laplacian(K: SimplicialComplex, w: MetricWeights, k: int) -> sp.csr_matrix:
    m = K.simplex_count(k)
    up, down = _sym_factors(K, w, k)
    S = sp.csr_matrix((m, m))
    if up is not None:
        S = S + up.T @ up
    if down is not None:
        S = S + down @ down.T
    return S.tocsr()


@lru_cache(maxsize=512)
def laplacian(K: SimplicialComplex, w: MetricWeights, k: int) -> sp.csr_matrix:
    """Delta_k as a sparse matrix; self-adjoint under the weighted inner
    product and positive semidefinite (not symmetric as a plain matrix)."""
    if not 0 <= k <= K.dimension:
        raise ValueError(f"degree {k} out of range 0..{K.dimension}")
    _check_weights(K, w)
    m = K.simplex_count(k)
    out = sp.csr_matrix((m, m))
    if k < K.dimension:
        d = coboundary(K, k)
        out = out + sp.diags(1.0 / w.degree(k)) @ d.T @ sp.diags(w.degree(k + 1)) @ d
    if k > 0:
        d = coboundary(K, k - 1)
        out = out + d @ sp.diags(1.0 / w.degree(k - 1)) @ d.T @ sp.diags(w.degree(k))
    return out.tocsr()


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """w-orthonormal basis of the numerical nullspace of Delta_k.

    ``vectors`` has one column per basis element; cardinality always equals
    the Betti number (enforced at construction).  ``residual`` is the worst
    relative harmonicity defect ||Delta v||_w / ||v||_w over the basis, and
    ``gap`` the first nonzero eigenvalue relative to the spectral scale, so
    the margin of the nullspace call can be audited.
    """

    degree: int
    vectors: np.ndarray
    weights: MetricWeights
    tolerance: float
    residual: float
    gap: float | None

    @property
    def cardinality(self) -> int:
        return self.vectors.shape[1]

    @property
    def cochains(self) -> list[Cochain]:
        return [Cochain(self.degree, self.vectors[:, i]) for i in range(self.cardinality)]


def _gershgorin_scale(S: sp.csr_matrix) -> float:
    if S.shape[0] == 0 or S.nnz == 0:
        return 0.0
    return float(np.max(np.abs(S).sum(axis=1)))


def _small_eigs(S: sp.csr_matrix, count: int, scale: float):
    """Smallest ``count`` eigenpairs of the symmetric PSD matrix S."""
    m = S.shape[0]
    if m <= DENSE_EIGEN_LIMIT:
        vals, vecs = scipy.linalg.eigh(
            S.toarray(), subset_by_index=[0, min(count, m) - 1]
        )
        return vals, vecs
    # Shift-invert about a small negative sigma keeps S - sigma*I positive
    # definite; the shift must stay far below the spectral gap or the
    # transformed kernel cluster loses its separation.  The symmetric
    # minimum-degree ordering keeps the factor sparse.
    k_req = min(count, m - 1)
    sigma = -max(scale, 1.0) * 1e-8
    shifted = (S - sigma * sp.identity(m, format="csr")).tocsc()
    lu = spla.splu(
        shifted,
        permc_spec="MMD_AT_PLUS_A",
        options=dict(SymmetricMode=True, DiagPivotThresh=0.01),
    )
    op_inv = spla.LinearOperator((m, m), matvec=lu.solve, dtype=np.float64)
    rng = np.random.default_rng(0x5EED)
    v0 = rng.standard_normal(m)
    vals, vecs = spla.eigsh(
        S,
        k=k_req,
        sigma=sigma,
        which="LM",
        v0=v0,
        OPinv=op_inv,
        ncv=min(m, max(24, 4 * k_req)),
    )
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


# Optional on-disk reuse of harmonic bases between runs, keyed by content
# hash of (complex, weights, degree, tolerance).  Enabled by pointing the
# HODGEFORM_CACHE_DIR environment variable at a directory.
def _cache_dir() -> Path | None:
    path = os.environ.get("HODGEFORM_CACHE_DIR")
    return Path(path) if path else None


def _cache_key(K: SimplicialComplex, w: MetricWeights, k: int, tol: float) -> str:
    digest = hashlib.sha256()
    digest.update(repr(K.f_vector).encode())
    for facet in K.facets:
        digest.update(np.asarray(facet, dtype=np.int64).tobytes())
    for arr in w.by_degree:
        digest.update(arr.astype(np.float64).tobytes())
    digest.update(f"deg={k};tol={tol!r};v1".encode())
    return digest.hexdigest()


def _cache_load(key: str, w: MetricWeights, k: int, tol: float) -> "HarmonicBasis | None":
    root = _cache_dir()
    if root is None:
        return None
    path = root / f"basis-{key}.npz"
    if not path.exists():
        return None
    try:
        with np.load(path) as payload:
            gap = float(payload["gap"])
            return HarmonicBasis(
                k,
                payload["vectors"],
                w,
                tol,
                float(payload["residual"]),
                None if gap < 0 else gap,
            )
    except Exception:
        return None


def _cache_store(key: str, basis: "HarmonicBasis") -> None:
    root = _cache_dir()
    if root is None:
        return
    try:
        root.mkdir(parents=True, exist_ok=True)
        np.savez(
            root / f"basis-{key}.npz",
            vectors=basis.vectors,
            residual=basis.residual,
            gap=-1.0 if basis.gap is None else basis.gap,
        )
    except OSError:
        pass


@lru_cache(maxsize=512)
def harmonic_basis(
    K: SimplicialComplex, w: MetricWeights, k: int, tol: float = DEFAULT_TOL
) -> HarmonicBasis:
    """Orthonormal (under w) spanning set of the nullspace of Delta_k.

    Fails loudly when the numerical nullspace dimension disagrees with the
    Betti number, which signals a tolerance or conditioning problem rather
    than topology.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if not 0 <= k <= K.dimension:
        raise ValueError(f"degree {k} out of range 0..{K.dimension}")
    _check_weights(K, w)
    b = betti_numbers(K)[k]
    m = K.simplex_count(k)
    if m == 0:
        if b != 0:
            raise NumericalError(f"empty degree {k} but b_{k}={b}")
        return HarmonicBasis(k, np.zeros((0, 0)), w, tol, 0.0, None)
    key = _cache_key(K, w, k, tol)
    cached = _cache_load(key, w, k, tol)
    if cached is not None and cached.vectors.shape == (m, b):
        return cached

    S = _sym_laplacian(K, w, k)
    scale = _gershgorin_scale(S)
    thresh = tol * scale
    vals, vecs = _small_eigs(S, min(b + 1, m), scale)

    def _certified(v):
        ok = int(np.count_nonzero(v <= thresh)) == b
        return ok and (len(v) <= b or v[b] > thresh)

    if not _certified(vals) and m > DENSE_EIGEN_LIMIT and m <= 8000:
        # iterative path missed the certificate; retry with the dense solver
        vals, vecs = scipy.linalg.eigh(
            S.toarray(), subset_by_index=[0, min(b + 1, m) - 1]
        )
    if not _certified(vals):
        null_count = int(np.count_nonzero(vals <= thresh))
        raise NumericalError(
            f"nullspace of Delta_{k} has numerical dimension {null_count}, "
            f"but b_{k} = {b} (eigenvalues {vals[: b + 1]}, threshold {thresh:.3e})"
        )
    gap = float(vals[b] / scale) if len(vals) > b and scale > 0 else None

    sqrt_w = np.sqrt(w.degree(k))
    X = vecs[:, :b] / sqrt_w[:, None]
    residual = 0.0
    if b:
        L = laplacian(K, w, k)
        for i in range(b):
            x = X[:, i]
            residual = max(
                residual, norm(w, k, L @ x) / norm(w, k, x)
            )
    basis = HarmonicBasis(k, X, w, tol, residual, gap)
    _cache_store(key, basis)
    return basis


def harmonic_projection(
    K: SimplicialComplex,
    w: MetricWeights,
    c: Cochain,
    basis: HarmonicBasis | None = None,
) -> Cochain:
    """w-orthogonal projection onto the harmonic subspace; idempotent."""
    if basis is None:
        basis = harmonic_basis(K, w, c.degree)
    X = basis.vectors
    values = np.asarray(c.values, dtype=np.float64)
    if X.shape[1] == 0:
        return Cochain(c.degree, np.zeros_like(values))
    coeffs = X.T @ (w.degree(c.degree) * values)
    return Cochain(c.degree, X @ coeffs)


def hodge_decompose(
    K: SimplicialComplex, w: MetricWeights, c: Cochain, tol: float = 1e-8
) -> tuple[Cochain, Cochain, Cochain]:
    """Split c = (exact) + (coexact) + (harmonic), pairwise w-orthogonal."""
    k = c.degree
    if not 0 <= k <= K.dimension:
        raise ValueError(f"degree {k} out of range 0..{K.dimension}")
    _check_weights(K, w)
    values = np.asarray(c.values, dtype=np.float64)
    h = harmonic_projection(K, w, Cochain(k, values)).values

    sqrt_w = np.sqrt(w.degree(k))
    y = sqrt_w * (values - h)
    if k > 0:
        _, down = _sym_factors(K, w, k)
        if down.shape[1] and down.shape[0] <= DENSE_EIGEN_LIMIT:
            z, *_ = np.linalg.lstsq(down.toarray(), y, rcond=None)
        else:
            z = spla.lsmr(down, y, atol=1e-13, btol=1e-13)[0]
        exact = (down @ z) / sqrt_w
    else:
        exact = np.zeros_like(values)
    coexact = values - h - exact

    scale = norm(w, k, values) or 1.0
    checks = (
        abs(inner(w, k, exact, coexact)),
        abs(inner(w, k, exact, h)),
        abs(inner(w, k, coexact, h)),
    )
    if max(checks) > tol * scale**2:
        raise NumericalError(
            f"hodge decomposition lost orthogonality (worst {max(checks):.3e})"
        )
    return Cochain(k, exact), Cochain(k, coexact), Cochain(k, h)
