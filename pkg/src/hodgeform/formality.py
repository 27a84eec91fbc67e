"""How far a weighted complex is from having harmonic cup products.

For harmonic cochains a, b the probe measures

    residual(a, b) = ||a cup b - P_H (a cup b)||_w / ||a cup b||_w

where P_H is the w-orthogonal projection onto the harmonic subspace of the
target degree.  Residual 0 for every basis pair means the weight choice is
discretely formal for the tested basis; bilinearity reduces the quantifier
over all harmonic cochains to basis pairs.  Products that vanish identically
are flagged instead of divided by zero.

Pairs involving a degree-0 harmonic cochain are resolved exactly: on a
connected complex the degree-0 harmonic space is the constants, a constant
acts as the ring unit, and unit * b = b stays harmonic, so the residual is
0 by arithmetic rather than by a float projection.

The probe tests pairwise products only.  Products of three or more harmonic
cochains need not lie in the tested set; extending the sweep to triples is a
possible follow-up, not implemented.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import Cochain, SimplicialComplex
from .hodge import (
    MetricWeights,
    harmonic_basis,
    harmonic_projection,
    laplacian,
    norm,
    unit_weights,
)
from .cup import cup

__all__ = [
    "PairResidual",
    "PairRecord",
    "NormRecord",
    "FormalityReport",
    "SearchConfig",
    "pair_residual",
    "norm_constancy",
    "formality_residual",
    "search_formal_weights",
]

ZERO_PRODUCT_RTOL = 1e-12
FORMAL_AGGREGATE_THRESHOLD = 1e-8
_HARMONIC_GATE = 1e-7


@dataclass(frozen=True, eq=False)
class PairResidual:
    residual: float
    zero_product: bool
    product_norm: float
    unit_pair: bool = False


@dataclass(frozen=True, eq=False)
class PairRecord:
    degree_a: int
    index_a: int
    degree_b: int
    index_b: int
    product_norm: float
    residual: float
    zero_product: bool
    unit_pair: bool

    def to_dict(self) -> dict:
        return {
            "degree_a": self.degree_a,
            "index_a": self.index_a,
            "degree_b": self.degree_b,
            "index_b": self.index_b,
            "product_norm": self.product_norm,
            "residual": self.residual,
            "zero_product": self.zero_product,
            "unit_pair": self.unit_pair,
        }


@dataclass(frozen=True, eq=False)
class NormRecord:
    degree: int
    index: int
    variation: float

    def to_dict(self) -> dict:
        return {"degree": self.degree, "index": self.index, "variation": self.variation}


@dataclass(eq=False)
class FormalityReport:
    aggregate: float
    tolerance: float
    pairs: list[PairRecord] = field(default_factory=list)
    norm_constancy: list[NormRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "tolerance": self.tolerance,
            "pairs": [p.to_dict() for p in self.pairs],
            "norm_constancy": [r.to_dict() for r in self.norm_constancy],
        }


def _require_harmonic(K, w, c: Cochain) -> None:
    n = norm(w, c.degree, np.asarray(c.values, dtype=np.float64))
    if n == 0.0:
        raise ValueError("zero cochain is not a harmonic input")
    L = laplacian(K, w, c.degree)
    defect = norm(w, c.degree, L @ np.asarray(c.values, dtype=np.float64))
    scale = float(np.abs(L).sum(axis=1).max()) if L.nnz else 1.0
    if defect > _HARMONIC_GATE * scale * n:
        raise ValueError(
            f"input cochain of degree {c.degree} is not harmonic to tolerance "
            f"(relative defect {defect / (scale * n):.3e})"
        )


def pair_residual(
    K: SimplicialComplex,
    w: MetricWeights,
    a: Cochain,
    b: Cochain,
    tol: float = 1e-9,
) -> PairResidual:
    """Residual of the cup product of two harmonic cochains.

    Returns 0 with the zero-product flag when the product vanishes
    identically relative to ||a|| ||b||, and an exact 0 with the unit flag
    when one factor has degree 0 (ring-unit law).
    """
    _require_harmonic(K, w, a)
    _require_harmonic(K, w, b)
    c = cup(K, a, b)
    values = np.asarray(c.values, dtype=np.float64)
    nc = norm(w, c.degree, values)
    if a.degree == 0 or b.degree == 0:
        return PairResidual(0.0, False, nc, unit_pair=True)
    na = norm(w, a.degree, np.asarray(a.values, dtype=np.float64))
    nb = norm(w, b.degree, np.asarray(b.values, dtype=np.float64))
    if nc <= ZERO_PRODUCT_RTOL * na * nb:
        return PairResidual(0.0, True, nc)
    basis = harmonic_basis(K, w, c.degree, tol)
    projected = harmonic_projection(K, w, Cochain(c.degree, values), basis)
    residual = norm(w, c.degree, values - projected.values) / nc
    return PairResidual(float(residual), False, nc)


def norm_constancy(K: SimplicialComplex, w: MetricWeights, a: Cochain) -> float:
    """Coefficient of variation of the localized squared norm over vertices.

    The localized norm at a vertex averages w_sigma * a(sigma)^2 over the
    k-simplices containing it, weight-normalized; 0 means the cochain has
    discretely constant length.
    """
    values = np.asarray(a.values, dtype=np.float64)
    if not np.any(values):
        raise ValueError("norm constancy of the zero cochain is undefined")
    weights = w.degree(a.degree)
    star = K.vertex_star(a.degree)
    local = np.empty(K.vertex_count)
    for v in range(K.vertex_count):
        ids = np.fromiter(star[v], dtype=np.int64)
        wv = weights[ids]
        local[v] = np.dot(wv, values[ids] ** 2) / wv.sum()
    mean = local.mean()
    return float(local.std() / mean)


def formality_residual(
    K: SimplicialComplex, w: MetricWeights, tol: float = 1e-9
) -> FormalityReport:
    """Evaluate all degree-compatible harmonic basis pairs and norm scores.

    Both orders of each unordered pair are recorded (the cochain product is
    not commutative); the aggregate is the maximum residual over records.
    """
    n = K.dimension
    bases = {k: harmonic_basis(K, w, k, tol) for k in range(n + 1)}
    report = FormalityReport(aggregate=0.0, tolerance=tol)
    for k in range(n + 1):
        for l in range(k, n + 1 - k):
            bk, bl = bases[k], bases[l]
            for i in range(bk.cardinality):
                j_start = i if k == l else 0
                for j in range(j_start, bl.cardinality):
                    a = Cochain(k, bk.vectors[:, i])
                    b = Cochain(l, bl.vectors[:, j])
                    orders = [(k, i, l, j, a, b)]
                    if (k, i) != (l, j):
                        orders.append((l, j, k, i, b, a))
                    for da, ia, db, ib, x, y in orders:
                        r = _pair_residual_trusted(K, w, x, y, bases, tol)
                        report.pairs.append(
                            PairRecord(
                                da, ia, db, ib, r.product_norm, r.residual,
                                r.zero_product, r.unit_pair,
                            )
                        )
    for k in range(n + 1):
        bk = bases[k]
        for i in range(bk.cardinality):
            variation = norm_constancy(K, w, Cochain(k, bk.vectors[:, i]))
            report.norm_constancy.append(NormRecord(k, i, variation))
    report.aggregate = max((p.residual for p in report.pairs), default=0.0)
    return report


def _pair_residual_trusted(K, w, a, b, bases, tol) -> PairResidual:
    # same as pair_residual but skips the harmonicity gate (basis vectors)
    c = cup(K, a, b)
    values = np.asarray(c.values, dtype=np.float64)
    nc = norm(w, c.degree, values)
    if a.degree == 0 or b.degree == 0:
        return PairResidual(0.0, False, nc, unit_pair=True)
    na = norm(w, a.degree, np.asarray(a.values, dtype=np.float64))
    nb = norm(w, b.degree, np.asarray(b.values, dtype=np.float64))
    if nc <= ZERO_PRODUCT_RTOL * na * nb:
        return PairResidual(0.0, True, nc)
    projected = harmonic_projection(K, w, Cochain(c.degree, values), bases[c.degree])
    residual = norm(w, c.degree, values - projected.values) / nc
    return PairResidual(float(residual), False, nc)


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the coordinate search over log-weights."""

    max_iterations: int = 20
    improvement_tol: float = 1e-6
    step_scale: float = 0.5
    seed: int = 0
    free_degrees: tuple[int, ...] | None = None
    min_step: float = 1e-3

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if self.step_scale <= 0:
            raise ValueError("step_scale must be positive")


def search_formal_weights(
    K: SimplicialComplex,
    cfg: SearchConfig,
    initial: MetricWeights | None = None,
    tol: float = 1e-9,
) -> tuple[MetricWeights, list[float]]:
    """Derivative-free coordinate descent on the aggregate residual.

    Multiplicative perturbations in log-weight space keep every weight
    strictly positive; only strictly improving candidates are accepted, so
    the returned trace is nonincreasing.  The step halves after a sweep
    without improvement.  Deterministic for a fixed seed.
    """
    w = initial if initial is not None else unit_weights(K)
    aggregate = formality_residual(K, w, tol).aggregate
    trace = [aggregate]
    free = (
        tuple(range(K.dimension + 1))
        if cfg.free_degrees is None
        else tuple(cfg.free_degrees)
    )
    for k in free:
        if not 0 <= k <= K.dimension:
            raise ValueError(f"free degree {k} out of range")
    rng = np.random.default_rng(cfg.seed)
    step = cfg.step_scale

    for _ in range(cfg.max_iterations):
        if aggregate <= FORMAL_AGGREGATE_THRESHOLD:
            break
        sweep_start = aggregate
        improved = False
        coords = [(k, i) for k in free for i in range(K.simplex_count(k))]
        rng.shuffle(coords)
        for k, i in coords:
            for direction in (1.0, -1.0):
                scaled = w.degree(k).copy()
                scaled[i] *= float(np.exp(direction * step))
                candidate = w.replace(k, scaled)
                value = formality_residual(K, candidate, tol).aggregate
                if value < aggregate:
                    w, aggregate = candidate, value
                    trace.append(aggregate)
                    improved = True
                    break
        if not improved:
            step *= 0.5
            if step < cfg.min_step:
                break
        elif sweep_start - aggregate < cfg.improvement_tol:
            break
    return w, trace
