import numpy as np
import pytest
import scipy.linalg

from hodgeform.complexes import Cochain, build_complex, sphere, torus
from hodgeform.cup import cup
from hodgeform.formality import (
    SearchConfig,
    formality_residual,
    norm_constancy,
    pair_residual,
    search_formal_weights,
)
from hodgeform.hodge import (
    MetricWeights,
    harmonic_basis,
    random_weights,
    unit_weights,
)
from hodgeform.homology import boundary_matrix


def oracle_pair_residual(K, w, a, b):
    """Independent dense route: full Laplacian, dense nullspace, explicit
    w-orthogonal projector."""
    c = cup(K, a, b)
    k = c.degree
    m = K.simplex_count(k)
    L = np.zeros((m, m))
    if k < K.dimension:
        d = boundary_matrix(K, k + 1).T.toarray().astype(float)
        L += np.diag(1.0 / w.degree(k)) @ d.T @ np.diag(w.degree(k + 1)) @ d
    if k > 0:
        d = boundary_matrix(K, k).T.toarray().astype(float)
        L += d @ np.diag(1.0 / w.degree(k - 1)) @ d.T @ np.diag(w.degree(k))
    null = scipy.linalg.null_space(L, rcond=1e-10)
    W = np.diag(w.degree(k))
    if null.shape[1]:
        X = null
        projector = X @ np.linalg.solve(X.T @ W @ X, X.T @ W)
    else:
        projector = np.zeros((m, m))
    values = np.asarray(c.values, dtype=np.float64)
    weighted_norm = lambda v: float(np.sqrt(max(v @ W @ v, 0.0)))
    nc = weighted_norm(values)
    if nc == 0.0:
        return 0.0
    return weighted_norm(values - projector @ values) / nc


def harmonic_pair(K, w, k, i, j):
    basis = harmonic_basis(K, w, k)
    return (
        Cochain(k, basis.vectors[:, i]),
        Cochain(k, basis.vectors[:, j]),
    )


def test_pair_residual_matches_dense_oracle_on_torus(tori):
    K = tori[2]
    w = unit_weights(K)
    for i, j in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        a, b = harmonic_pair(K, w, 1, i, j)
        got = pair_residual(K, w, a, b).residual
        want = oracle_pair_residual(K, w, a, b)
        assert abs(got - want) < 1e-9


def test_pair_residual_matches_dense_oracle_random_weights(surfaces):
    K = surfaces[2]
    for seed in (0, 1):
        w = random_weights(K, seed)
        basis = harmonic_basis(K, w, 1)
        for i in range(basis.cardinality):
            a = Cochain(1, basis.vectors[:, i])
            b = Cochain(1, basis.vectors[:, (i + 1) % basis.cardinality])
            got = pair_residual(K, w, a, b).residual
            want = oracle_pair_residual(K, w, a, b)
            assert abs(got - want) < 1e-9


def test_unit_pairs_give_exact_zero(tori):
    K = tori[2]
    w = unit_weights(K)
    one = harmonic_basis(K, w, 0).cochains[0]
    for degree in (0, 1, 2):
        basis = harmonic_basis(K, w, degree)
        for c in basis.cochains:
            result = pair_residual(K, w, one, c)
            assert result.residual == 0.0
            assert result.unit_pair
            reversed_result = pair_residual(K, w, c, one)
            assert reversed_result.residual == 0.0


def test_pair_residual_rejects_non_harmonic_inputs(tori):
    K = tori[2]
    w = unit_weights(K)
    rng = np.random.default_rng(0)
    junk = Cochain(1, rng.standard_normal(27))
    good = harmonic_basis(K, w, 1).cochains[0]
    with pytest.raises(ValueError):
        pair_residual(K, w, junk, good)
    with pytest.raises(ValueError):
        pair_residual(K, w, good, Cochain(1, np.zeros(27)))


def test_identically_zero_product_is_flagged():
    # two disjoint staircase tori: harmonic cochains supported on different
    # components multiply to the zero cochain
    t = torus(2)
    shifted = [tuple(v + 9 for v in f) for f in t.facets]
    K = build_complex(list(t.facets) + shifted)
    w = unit_weights(K)
    one_forms = harmonic_basis(K, w, 1)
    assert one_forms.cardinality == 4
    # build component-supported harmonic cochains by zeroing the other side
    edges = K.simplices(1)
    mask_a = np.array([1.0 if e[1] < 9 else 0.0 for e in edges])
    mask_b = 1.0 - mask_a
    combo = one_forms.vectors @ np.ones(4)
    a = Cochain(1, combo * mask_a)
    b = Cochain(1, combo * mask_b)
    result = pair_residual(K, w, a, b)
    assert result.zero_product
    assert result.residual == 0.0


def test_residuals_lie_in_unit_interval(surfaces):
    K = surfaces[2]
    for seed in range(3):
        w = random_weights(K, seed)
        report = formality_residual(K, w)
        for record in report.pairs:
            assert -1e-12 <= record.residual <= 1 + 1e-9


# ---------------------------------------------------------------------------
# norm constancy


def test_circle_harmonic_cochain_has_constant_length(tori):
    K = tori[1]
    w = unit_weights(K)
    a = harmonic_basis(K, w, 1).cochains[0]
    assert norm_constancy(K, w, a) < 1e-12


def test_torus_area_generator_has_constant_length(tori):
    K = tori[2]
    w = unit_weights(K)
    a = harmonic_basis(K, w, 2).cochains[0]
    assert norm_constancy(K, w, a) < 1e-12


def test_genus_two_one_cochains_have_nonconstant_length(surfaces):
    K = surfaces[2]
    w = unit_weights(K)
    basis = harmonic_basis(K, w, 1)
    variations = [norm_constancy(K, w, c) for c in basis.cochains]
    assert max(variations) > 1e-3


def test_norm_constancy_rejects_zero(tori):
    with pytest.raises(ValueError):
        norm_constancy(tori[2], unit_weights(tori[2]), Cochain(1, np.zeros(27)))


# ---------------------------------------------------------------------------
# whole-complex reports


def test_sphere_reports_exact_zero(spheres):
    for n in (2, 3):
        K = spheres[n]
        report = formality_residual(K, unit_weights(K))
        assert report.aggregate == 0.0
        assert all(p.residual == 0.0 for p in report.pairs)


def test_torus_aggregate_is_max_over_pairs(tori):
    K = tori[2]
    report = formality_residual(K, unit_weights(K))
    assert report.aggregate == max(p.residual for p in report.pairs)
    non_unit = [p for p in report.pairs if not p.unit_pair]
    # both orders of the mixed pair are recorded
    keys = {(p.degree_a, p.index_a, p.degree_b, p.index_b) for p in non_unit}
    assert (1, 0, 1, 1) in keys and (1, 1, 1, 0) in keys


def test_genus_two_aggregate_exceeds_threshold(surfaces):
    K = surfaces[2]
    assert formality_residual(K, unit_weights(K)).aggregate > 1e-3
    for seed in range(3):
        assert formality_residual(K, random_weights(K, seed)).aggregate > 1e-3


def test_aggregate_invariant_under_single_degree_scaling(tori):
    K = tori[2]
    w = random_weights(K, 40)
    before = formality_residual(K, w).aggregate
    for k in range(3):
        scaled = w.replace(k, 7.5 * w.degree(k))
        after = formality_residual(K, scaled).aggregate
        assert abs(after - before) < 1e-9


def test_norm_records_cover_every_basis_vector(tori):
    K = tori[2]
    report = formality_residual(K, unit_weights(K))
    assert {(r.degree, r.index) for r in report.norm_constancy} == {
        (0, 0),
        (1, 0),
        (1, 1),
        (2, 0),
    }


# ---------------------------------------------------------------------------
# weight search


def test_search_on_sphere_returns_immediately(spheres):
    weights, trace = search_formal_weights(spheres[3], SearchConfig())
    assert trace == [0.0]
    assert all(np.all(v == 1.0) for v in weights.by_degree)


def test_search_trace_monotone_and_bounded(tori):
    K = tori[2]
    for seed in range(2):
        initial = random_weights(K, seed)
        cfg = SearchConfig(max_iterations=2, seed=seed)
        _, trace = search_formal_weights(K, cfg, initial)
        assert all(x >= y for x, y in zip(trace, trace[1:]))
        assert trace[-1] <= trace[0]


def test_search_deterministic_per_seed(tori):
    K = tori[2]
    cfg = SearchConfig(max_iterations=2, seed=11)
    initial = random_weights(K, 11)
    again = random_weights(K, 11)
    _, trace_one = search_formal_weights(K, cfg, initial)
    _, trace_two = search_formal_weights(K, cfg, again)
    assert trace_one == trace_two


def test_search_from_unit_weights_does_not_regress(tori):
    K = tori[2]
    baseline = formality_residual(K, unit_weights(K)).aggregate
    _, trace = search_formal_weights(K, SearchConfig(max_iterations=1, seed=3))
    assert trace[-1] <= baseline + 1e-12


def test_search_keeps_weights_positive(tori):
    K = tori[2]
    cfg = SearchConfig(max_iterations=1, seed=5)
    weights, _ = search_formal_weights(K, cfg, random_weights(K, 5))
    assert all(np.all(arr > 0) for arr in weights.by_degree)


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_iterations=-1)
    with pytest.raises(ValueError):
        SearchConfig(step_scale=0.0)


def test_search_rejects_bad_degrees(tori):
    cfg = SearchConfig(free_degrees=(5,))
    with pytest.raises(ValueError):
        search_formal_weights(tori[2], cfg)
