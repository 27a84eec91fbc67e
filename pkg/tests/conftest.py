import pytest

from hodgeform.complexes import (
    load_bundled_complex,
    product_complex,
    sphere,
    surface,
    torus,
)


@pytest.fixture(scope="session")
def spheres():
    return {n: sphere(n) for n in range(1, 5)}


@pytest.fixture(scope="session")
def tori():
    return {n: torus(n) for n in range(1, 5)}


@pytest.fixture(scope="session")
def surfaces():
    return {g: surface(g) for g in range(0, 4)}


@pytest.fixture(scope="session")
def s2xs2(spheres):
    return product_complex(spheres[2], spheres[2])


@pytest.fixture(scope="session")
def rp2():
    return load_bundled_complex("projective_plane")


@pytest.fixture(scope="session")
def zoo(spheres, tori, surfaces, s2xs2, rp2):
    """Every generated complex the suites sweep over."""
    members = {}
    members.update({f"sphere:{n}": K for n, K in spheres.items()})
    members.update({f"torus:{n}": K for n, K in tori.items()})
    members.update({f"surface:{g}": K for g, K in surfaces.items()})
    members["product:sphere:2,sphere:2"] = s2xs2
    members["projective_plane"] = rp2
    return members


@pytest.fixture(scope="session")
def small_zoo(zoo):
    """Zoo members cheap enough for dense / brute-force oracles."""
    return {
        name: K
        for name, K in zoo.items()
        if sum(K.f_vector) <= 1200
    }
