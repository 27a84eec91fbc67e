"""Weighted combinatorial Hodge theory on triangulated closed manifolds.

The package computes harmonic cochain bases under diagonal metric weights,
cup products and intersection forms, a quantitative "formality residual"
for products of harmonic cochains, a derivative-free search for residual-
minimizing weights, and the elementary low-dimensional obstruction rules.
"""

__version__ = "0.1.0"

from .complexes import (
    Cochain,
    Orientation,
    SimplicialComplex,
    build_complex,
    connected_sum,
    is_closed_pseudomanifold,
    load_bundled_complex,
    load_complex,
    orient,
    product_complex,
    save_complex,
    sphere,
    surface,
    torus,
)
from .cup import IntersectionForm, cup, evaluate_on_fundamental_class, intersection_form
from .errors import NumericalError
from .formality import (
    FormalityReport,
    SearchConfig,
    formality_residual,
    norm_constancy,
    pair_residual,
    search_formal_weights,
)
from .hodge import (
    HarmonicBasis,
    MetricWeights,
    harmonic_basis,
    harmonic_projection,
    hodge_decompose,
    laplacian,
    random_weights,
    unit_weights,
    weights_from_arrays,
)
from .homology import (
    betti_numbers,
    boundary_matrix,
    euler_characteristic,
    poincare_duality_check,
)
from .obstructions import (
    CohomologySummary,
    ObstructionReport,
    check_obstructions,
    classify_symmetric_model,
    load_summary,
    summarize,
)

__all__ = [
    "__version__",
    "SimplicialComplex",
    "Orientation",
    "Cochain",
    "build_complex",
    "is_closed_pseudomanifold",
    "orient",
    "product_complex",
    "connected_sum",
    "sphere",
    "torus",
    "surface",
    "load_complex",
    "save_complex",
    "load_bundled_complex",
    "boundary_matrix",
    "betti_numbers",
    "euler_characteristic",
    "poincare_duality_check",
    "MetricWeights",
    "HarmonicBasis",
    "unit_weights",
    "random_weights",
    "weights_from_arrays",
    "laplacian",
    "harmonic_basis",
    "harmonic_projection",
    "hodge_decompose",
    "cup",
    "evaluate_on_fundamental_class",
    "IntersectionForm",
    "intersection_form",
    "FormalityReport",
    "SearchConfig",
    "pair_residual",
    "norm_constancy",
    "formality_residual",
    "search_formal_weights",
    "CohomologySummary",
    "ObstructionReport",
    "summarize",
    "check_obstructions",
    "classify_symmetric_model",
    "load_summary",
    "NumericalError",
]
