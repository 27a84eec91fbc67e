"""Simplicial complexes over a single global vertex order.

Vertices are dense nonnegative integers and every simplex is stored as a
strictly increasing tuple.  All sign conventions used downstream (boundary
operators, cup products, fundamental classes) derive from this one order, so
no other module ever has to reconcile orientations of vertex lists.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
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
    "complex_to_dict",
]


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Downward-closed finite simplicial complex with dense vertex ids.

    ``simplices_by_dim[k]`` holds the k-simplices as strictly increasing
    vertex tuples, sorted lexicographically; the position of a simplex in
    that list is its index everywhere else (boundary matrices, cochain
    values, metric weights).

    Instances are immutable and compared by identity, so they can key
    caches cheaply.  Construct via :func:`build_complex` or one of the
    generators, which validate the invariants.
    """

    vertex_count: int
    simplices_by_dim: tuple[tuple[tuple[int, ...], ...], ...]
    name: str = ""

    @property
    def dimension(self) -> int:
        return len(self.simplices_by_dim) - 1

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.simplices_by_dim)

    @property
    def facets(self) -> tuple[tuple[int, ...], ...]:
        return self.simplices_by_dim[-1]

    def simplices(self, k: int) -> tuple[tuple[int, ...], ...]:
        """All k-simplices, or () when the degree is out of range."""
        if 0 <= k < len(self.simplices_by_dim):
            return self.simplices_by_dim[k]
        return ()

    def simplex_count(self, k: int) -> int:
        return len(self.simplices(k))

    @cached_property
    def _index_maps(self) -> tuple[dict[tuple[int, ...], int], ...]:
        return tuple(
            {simplex: i for i, simplex in enumerate(level)}
            for level in self.simplices_by_dim
        )

    def index_of(self, simplex: tuple[int, ...], k: int) -> int:
        """Index of a k-simplex in the degree-k list."""
        return self._index_maps[k][tuple(simplex)]

    @cached_property
    def _vertex_stars(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        # _vertex_stars[k][v] = indices of k-simplices containing vertex v
        stars = []
        for level in self.simplices_by_dim:
            per_vertex: list[list[int]] = [[] for _ in range(self.vertex_count)]
            for i, simplex in enumerate(level):
                for v in simplex:
                    per_vertex[v].append(i)
            stars.append(tuple(tuple(ids) for ids in per_vertex))
        return tuple(stars)

    def vertex_star(self, k: int) -> tuple[tuple[int, ...], ...]:
        """For each vertex, the indices of the k-simplices containing it."""
        return self._vertex_stars[k]


@dataclass(frozen=True, eq=False)
class Orientation:
    """A consistent sign per facet: induced ridge orientations cancel."""

    facet_signs: tuple[int, ...]


@dataclass(eq=False)
class Cochain:
    """A value per k-simplex, indexed like ``K.simplices(k)``.

    ``values`` is usually a float array; object arrays of exact numbers
    (ints, Fractions) are accepted by the cochain algebra so exactness can
    be preserved where it matters.
    """

    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("cochain degree must be nonnegative")
        if not isinstance(self.values, np.ndarray):
            self.values = np.asarray(self.values)


def _validate_facet(facet) -> tuple[int, ...]:
    vertices = tuple(int(v) for v in facet)
    if len(set(vertices)) != len(vertices):
        raise ValueError(f"facet {facet!r} repeats a vertex")
    if any(v < 0 for v in vertices):
        raise ValueError(f"facet {facet!r} has a negative vertex id")
    return tuple(sorted(vertices))


def build_complex(facets, name: str = "") -> SimplicialComplex:
    """Build the downward closure of a list of equal-arity facets.

    Vertex ids are renumbered densely (order-preserving), faces are
    deduplicated, and every dimension is sorted lexicographically so index
    assignment is deterministic.
    """
    facets = list(facets)
    if not facets:
        raise ValueError("facet list is empty")
    canonical = [_validate_facet(f) for f in facets]
    arities = {len(f) for f in canonical}
    if len(arities) != 1:
        raise ValueError(f"facets have mixed arities {sorted(arities)}")
    n = arities.pop() - 1

    used = sorted({v for f in canonical for v in f})
    relabel = {v: i for i, v in enumerate(used)}
    facet_set = {tuple(relabel[v] for v in f) for f in canonical}

    levels: list[set[tuple[int, ...]]] = [set() for _ in range(n + 1)]
    for f in facet_set:
        for k in range(n + 1):
            levels[k].update(itertools.combinations(f, k + 1))
    return SimplicialComplex(
        vertex_count=len(used),
        simplices_by_dim=tuple(tuple(sorted(level)) for level in levels),
        name=name,
    )


def _ridge_incidence(K: SimplicialComplex):
    """Map each (n-1)-simplex to the list of (facet index, omitted position)."""
    n = K.dimension
    incidence: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for fi, facet in enumerate(K.facets):
        for pos in range(n + 1):
            ridge = facet[:pos] + facet[pos + 1 :]
            incidence.setdefault(ridge, []).append((fi, pos))
    return incidence


def is_closed_pseudomanifold(K: SimplicialComplex) -> bool:
    """True iff every ridge lies in exactly two facets and the facet
    adjacency graph is connected."""
    n = K.dimension
    facets = K.facets
    if not facets:
        return False
    if n == 0:
        return len(facets) == 1
    incidence = _ridge_incidence(K)
    if any(len(fs) != 2 for fs in incidence.values()):
        return False
    # facet adjacency connectivity
    adjacency: list[list[int]] = [[] for _ in facets]
    for (a, _), (b, _) in incidence.values():
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adjacency[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(facets)


def orient(K: SimplicialComplex) -> Orientation | None:
    """Propagate facet signs across ridges; None when no consistent choice
    exists (non-orientable).

    The facet with the lexicographically smallest vertex tuple gets +1, so
    the result is deterministic.
    """
    if not is_closed_pseudomanifold(K):
        raise ValueError("orient requires a closed pseudomanifold")
    facets = K.facets
    if K.dimension == 0:
        return Orientation((1,))
    incidence = _ridge_incidence(K)
    signs: dict[int, int] = {0: 1}
    stack = [0]
    # neighbor lists carrying the omitted positions on both sides
    neighbors: list[list[tuple[int, int, int]]] = [[] for _ in facets]
    for (a, pa), (b, pb) in incidence.values():
        neighbors[a].append((b, pa, pb))
        neighbors[b].append((a, pb, pa))
    while stack:
        f = stack.pop()
        for g, pf, pg in neighbors[f]:
            # induced ridge orientations must cancel:
            # signs[f] * (-1)^pf + signs[g] * (-1)^pg == 0
            required = -signs[f] * (-1) ** pf * (-1) ** pg
            if g in signs:
                if signs[g] != required:
                    return None
            else:
                signs[g] = required
                stack.append(g)
    return Orientation(tuple(signs[i] for i in range(len(facets))))


def product_complex(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of the product of two pure complexes.

    Vertices are pairs ordered lexicographically; the facets over a facet
    pair (sigma, tau) are the monotone lattice paths from (sigma_0, tau_0)
    to (sigma_p, tau_q), giving C(p+q, p) simplices per pair.  Because the
    path diagonalization is determined by the global vertex orders, shared
    faces of neighboring cells agree and the result is again a complex.
    """
    if not K1.facets or not K2.facets:
        raise ValueError("product requires nonempty complexes")
    width = K2.vertex_count

    def pair_id(u: int, v: int) -> int:
        return u * width + v

    facets: list[tuple[int, ...]] = []
    for s in K1.facets:
        p = len(s) - 1
        for t in K2.facets:
            q = len(t) - 1
            for rights in itertools.combinations(range(p + q), p):
                rset = set(rights)
                i = j = 0
                chain = [pair_id(s[0], t[0])]
                for step in range(p + q):
                    if step in rset:
                        i += 1
                    else:
                        j += 1
                    chain.append(pair_id(s[i], t[j]))
                facets.append(tuple(chain))
    name = f"product:{K1.name or '?'},{K2.name or '?'}"
    return build_complex(facets, name=name)


def connected_sum(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    """Remove one facet from each summand and glue the boundary spheres.

    The glued bijection matches sorted vertex positions; when that choice
    produces an inconsistent orientation, the first two positions are
    transposed instead.  Inputs must be closed, orientable and of equal
    dimension <= 4.
    """
    n = K1.dimension
    if K2.dimension != n:
        raise ValueError(f"dimension mismatch: {n} vs {K2.dimension}")
    if n > 4:
        raise ValueError("connected sums are supported up to dimension 4")
    for K in (K1, K2):
        if not is_closed_pseudomanifold(K):
            raise ValueError("connected sum requires closed pseudomanifolds")
        if orient(K) is None:
            raise ValueError("connected sum requires orientable summands")

    f1 = K1.facets[0]
    f2 = K2.facets[0]
    rest1 = list(K1.facets[1:])
    rest2 = list(K2.facets[1:])
    outside2 = sorted(set(range(K2.vertex_count)) - set(f2))
    fresh = {v: K1.vertex_count + i for i, v in enumerate(outside2)}

    def glue(swap_first_two: bool) -> SimplicialComplex:
        image = list(f1)
        if swap_first_two:
            image[0], image[1] = image[1], image[0]
        relabel = {v: image[i] for i, v in enumerate(f2)}
        relabel.update(fresh)
        glued = [tuple(sorted(relabel[v] for v in facet)) for facet in rest2]
        name = f"connsum:{K1.name or '?'},{K2.name or '?'}"
        return build_complex(rest1 + glued, name=name)

    candidate = glue(False)
    if orient(candidate) is not None:
        return candidate
    candidate = glue(True)
    if orient(candidate) is None:
        raise RuntimeError("neither gluing of the connected sum is orientable")
    return candidate


def sphere(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex."""
    if n < 1:
        raise ValueError("sphere(n) requires n >= 1")
    facets = itertools.combinations(range(n + 2), n + 1)
    return build_complex(list(facets), name=f"sphere:{n}")


def torus(n: int) -> SimplicialComplex:
    """n-fold staircase product of the 3-vertex circle."""
    if n < 1:
        raise ValueError("torus(n) requires n >= 1")
    K = sphere(1)
    for _ in range(n - 1):
        K = product_complex(K, sphere(1))
    return SimplicialComplex(K.vertex_count, K.simplices_by_dim, name=f"torus:{n}")


def surface(g: int) -> SimplicialComplex:
    """Closed orientable surface of genus g (iterated connected sum of tori)."""
    if g < 0:
        raise ValueError("surface(g) requires g >= 0")
    if g == 0:
        K = sphere(2)
    else:
        K = torus(2)
        for _ in range(g - 1):
            K = connected_sum(K, torus(2))
    return SimplicialComplex(K.vertex_count, K.simplices_by_dim, name=f"surface:{g}")


def complex_to_dict(K: SimplicialComplex) -> dict:
    return {"name": K.name, "facets": [list(f) for f in K.facets]}


def save_complex(K: SimplicialComplex, path) -> None:
    Path(path).write_text(
        json.dumps(complex_to_dict(K), sort_keys=True, indent=2) + "\n"
    )


def load_complex(path) -> SimplicialComplex:
    """Load and canonicalize a complex file: {"name": str, "facets": [[int,...],...]}."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict) or "facets" not in payload:
        raise ValueError(f"{path}: expected an object with a 'facets' key")
    name = payload.get("name", "")
    if not isinstance(name, str):
        raise ValueError(f"{path}: 'name' must be a string")
    facets = payload["facets"]
    if not isinstance(facets, list) or not all(isinstance(f, list) for f in facets):
        raise ValueError(f"{path}: 'facets' must be a list of vertex lists")
    return build_complex(facets, name=name)


def load_bundled_complex(name: str) -> SimplicialComplex:
    """Load a triangulation shipped with the package (e.g. 'projective_plane')."""
    data = resources.files("hodgeform.data").joinpath(f"{name}.json")
    payload = json.loads(data.read_text())
    return build_complex(payload["facets"], name=payload.get("name", name))
