import itertools

import numpy as np
import pytest

from hodgeform.complexes import build_complex, product_complex
from hodgeform.homology import (
    betti_numbers,
    betti_numbers_float,
    boundary_matrix,
    euler_characteristic,
    exact_rank,
    floating_rank,
    poincare_duality_check,
)


def test_single_edge_boundary_column():
    K = build_complex([(0, 1)])
    col = boundary_matrix(K, 1).toarray()
    assert col.tolist() == [[-1], [1]]


def test_boundary_squares_to_zero(zoo):
    for K in zoo.values():
        for k in range(2, K.dimension + 1):
            prod = boundary_matrix(K, k - 1) @ boundary_matrix(K, k)
            assert prod.nnz == 0


def test_boundary_column_structure(tori):
    K = tori[3]
    for k in range(1, 4):
        mat = boundary_matrix(K, k).tocsc()
        for j in range(mat.shape[1]):
            col = mat[:, j]
            assert col.nnz == k + 1
            # alternating signs by face position
            simplex = K.simplices(k)[j]
            for i in range(k + 1):
                face = simplex[:i] + simplex[i + 1 :]
                row = K.index_of(face, k - 1)
                assert col[row, 0] == (-1) ** i


def test_tetrahedron_boundary_rank_matches_float_oracle(spheres):
    mat = boundary_matrix(spheres[2], 2)
    assert mat.shape == (6, 4)
    oracle = int(np.linalg.matrix_rank(mat.toarray().astype(float)))
    assert oracle == 3
    assert exact_rank(mat) == 3
    assert floating_rank(mat) == 3


def test_betti_spheres(spheres):
    for n, K in spheres.items():
        expected = tuple(1 if k in (0, n) else 0 for k in range(n + 1))
        assert betti_numbers(K) == expected


def test_betti_tori_attain_binomial_values(tori):
    from math import comb

    for n, K in tori.items():
        assert betti_numbers(K) == tuple(comb(n, k) for k in range(n + 1))


def test_betti_surfaces(surfaces):
    for g, K in surfaces.items():
        if g == 0:
            assert betti_numbers(K) == (1, 0, 1)
        else:
            assert betti_numbers(K) == (1, 2 * g, 1)


def test_betti_projective_plane_rational(rp2):
    assert betti_numbers(rp2) == (1, 0, 0)


def test_b0_counts_connected_components():
    # disjoint union of two triangle boundaries; oracle: union-find
    facets = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    K = build_complex(facets)

    parent = list(range(K.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in K.simplices(1):
        parent[find(a)] = find(b)
    components = len({find(v) for v in range(K.vertex_count)})
    assert betti_numbers(K)[0] == components == 2


def test_euler_characteristic_matches_betti_alternating_sum(zoo):
    for K in zoo.values():
        betti = betti_numbers(K)
        assert euler_characteristic(K) == sum(
            (-1) ** k * b for k, b in enumerate(betti)
        )


def test_duality_check(tori, spheres):
    assert poincare_duality_check(tori[3])
    assert poincare_duality_check(spheres[2])


def test_duality_check_rejects_open_complex():
    with pytest.raises(ValueError):
        poincare_duality_check(build_complex([(0, 1, 2)]))


def test_duality_check_rejects_non_orientable(rp2):
    with pytest.raises(ValueError):
        poincare_duality_check(rp2)


def test_exact_and_float_ranks_agree_everywhere(zoo):
    for K in zoo.values():
        exact = betti_numbers(K)
        assert betti_numbers_float(K) == exact


def test_kunneth_convolution_on_products(spheres, tori, surfaces):
    pairs = [
        (spheres[1], spheres[1]),
        (spheres[1], spheres[2]),
        (spheres[2], spheres[2]),
        (tori[2], spheres[1]),
        (tori[2], tori[1]),
        (surfaces[2], spheres[1]),
    ]
    for a, b in pairs:
        product = product_complex(a, b)
        if sum(product.f_vector) > 10_000:
            continue
        ba, bb = betti_numbers(a), betti_numbers(b)
        expected = tuple(
            sum(
                ba[i] * bb[k - i]
                for i in range(len(ba))
                if 0 <= k - i < len(bb)
            )
            for k in range(product.dimension + 1)
        )
        assert betti_numbers(product) == expected


def test_boundary_degree_out_of_range(tori):
    with pytest.raises(ValueError):
        boundary_matrix(tori[2], 0)
    with pytest.raises(ValueError):
        boundary_matrix(tori[2], 3)


def test_exact_rank_small_dense_path():
    # below the dense dispatch limit both paths are exercised
    rng = np.random.default_rng(3)
    import scipy.sparse as sp

    dense = rng.integers(-2, 3, size=(20, 12))
    mat = sp.csc_matrix(dense)
    assert exact_rank(mat) == int(np.linalg.matrix_rank(dense.astype(float)))
