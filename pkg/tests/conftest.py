import numpy as np
import pytest

from gerbelab import meshes


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(scope="session")
def t3():
    return meshes.torus3(3, 3, 3)


@pytest.fixture(scope="session")
def all_meshes():
    return [
        meshes.sphere2(1),
        meshes.sphere2(3),
        meshes.torus2(3, 4),
        meshes.torus3(3, 3, 3),
        meshes.torus3(3, 4, 3),
        meshes.cylinder(3, 5),
        meshes.circle(6),
    ]


def solid_angle(a, b, c):
    """Signed solid angle of the geodesic triangle abc (Van Oosterom-Strackee)."""
    num = np.dot(a, np.cross(b, c))
    den = 1 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a)
    return 2 * np.arctan2(num, den)
