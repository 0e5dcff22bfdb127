"""Mesh generators: sphere, 2- and 3-tori, cylinder, circle.

Every generator returns an oriented :class:`SimplicialComplex` with
embedded coordinates.  Periodic directions need at least three cells:
with fewer, distinct lattice simplices share a vertex set and the
result is not a simplicial complex.
"""

from __future__ import annotations

import re
from itertools import permutations

import numpy as np

from .complex import SimplicialComplex, SimplicialMap
from .errors import InvalidSpec

GENERATORS = ("sphere2", "torus2", "torus3", "cylinder", "circle")


def _check(values, minimum, what):
    for v in values:
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise InvalidSpec(f"{what}: resolution must be an integer >= 1, got {v!r}")
        if v < minimum:
            raise InvalidSpec(
                f"{what}: periodic direction needs >= {minimum} cells to be simplicial, got {v}"
            )


def sphere2(n: int) -> SimplicialComplex:
    """Octahedron with each edge cut into n + 1 pieces, projected to the unit sphere."""
    _check([n], 1, "sphere2")
    s = n + 1
    axes = np.eye(3, dtype=np.int64)
    keys: dict[tuple, int] = {}
    cells = []

    def vid(vec):
        key = tuple(vec.tolist())
        if key not in keys:
            keys[key] = len(keys)
        return keys[key]

    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                A, B, C = sx * axes[0], sy * axes[1], sz * axes[2]
                if sx * sy * sz < 0:
                    B, C = C, B  # outward normal

                def P(a, b):
                    return vid((s - a - b) * A + a * B + b * C)

                for a in range(s):
                    for b in range(s - a):
                        cells.append((P(a, b), P(a + 1, b), P(a, b + 1)))
                        if a + b <= s - 2:
                            cells.append((P(a + 1, b), P(a + 1, b + 1), P(a, b + 1)))
    coords = np.array(list(keys), dtype=float)
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    return SimplicialComplex(cells, coords=coords, name="sphere2", params=(n,))


def torus2(n: int, m: int) -> SimplicialComplex:
    """n x m periodic grid, squares cut along the (1, 1) diagonal."""
    _check([n, m], 3, "torus2")

    def v(i, j):
        return (i % n) * m + (j % m)

    cells = []
    for i in range(n):
        for j in range(m):
            cells.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            cells.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    u, w = np.meshgrid(2 * np.pi * np.arange(n) / n, 2 * np.pi * np.arange(m) / m, indexing="ij")
    coords = np.stack(
        [(2 + np.cos(w)) * np.cos(u), (2 + np.cos(w)) * np.sin(u), np.sin(w)], axis=-1
    ).reshape(-1, 3)
    return SimplicialComplex(cells, coords=coords, name="torus2", params=(n, m))


def torus3_vertex(shape: tuple[int, int, int], i: int, j: int, k: int) -> int:
    n, m, p = shape
    return ((i % n) * m + (j % m)) * p + (k % p)


def torus3(n: int, m: int, p: int) -> SimplicialComplex:
    """Periodic n x m x p cube grid, six tetrahedra per cube (Kuhn/Freudenthal).

    The tetrahedra of a cube at ``v`` are the monotone lattice paths
    ``v, v+e_a, v+e_a+e_b, v+(1,1,1)``; the whole triangulation is invariant
    under translations and axis permutations.  Coordinates are lattice
    coordinates of the fundamental domain.
    """
    _check([n, m, p], 3, "torus3")
    shape = (n, m, p)
    eye = np.eye(3, dtype=np.int64)
    cells = []
    for i in range(n):
        for j in range(m):
            for k in range(p):
                base = np.array([i, j, k])
                for perm in permutations(range(3)):
                    pts = [base, base + eye[perm[0]], base + eye[perm[0]] + eye[perm[1]], base + 1]
                    ids = [torus3_vertex(shape, *q) for q in pts]
                    if np.linalg.det(eye[list(perm)]) < 0:
                        ids[0], ids[1] = ids[1], ids[0]
                    cells.append(tuple(ids))
    coords = np.array([(i, j, k) for i in range(n) for j in range(m) for k in range(p)], dtype=float)
    return SimplicialComplex(cells, coords=coords, name="torus3", params=shape)


def cylinder(n: int, m: int) -> SimplicialComplex:
    """[0, 1] x S^1 with n segments along the interval and m around the circle.

    Vertex ``(i, j)`` has id ``i * m + j``.  The orientation makes the
    boundary equal to ``c0 - c1``, where ``c_i`` is the circle at ``s = i/n``
    traversed with increasing ``j``.
    """
    _check([n], 1, "cylinder")
    _check([m], 3, "cylinder")

    def v(i, j):
        return i * m + (j % m)

    cells = []
    for i in range(n):
        for j in range(m):
            cells.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
            cells.append((v(i, j), v(i + 1, j + 1), v(i + 1, j)))
    t = 2 * np.pi * np.arange(m) / m
    coords = np.array([(np.cos(a), np.sin(a), i / n) for i in range(n + 1) for a in t])
    return SimplicialComplex(cells, coords=coords, name="cylinder", params=(n, m))


def cylinder_boundary(K: SimplicialComplex, end: int) -> list[int]:
    """Closed vertex path of the boundary circle ``c_end`` (end = 0 or 1)."""
    n, m = K.params
    i = 0 if end == 0 else n
    return [i * m + j for j in range(m)] + [i * m]


def circle(n: int) -> SimplicialComplex:
    _check([n], 3, "circle")
    t = 2 * np.pi * np.arange(n) / n
    coords = np.stack([np.cos(t), np.sin(t), np.zeros(n)], axis=1)
    return SimplicialComplex([(j, (j + 1) % n) for j in range(n)], coords=coords, name="circle", params=(n,))


def circle_loop(K: SimplicialComplex) -> list[int]:
    return list(range(K.params[0])) + [0]


def latitude_circle(n: int, colatitude: float) -> SimplicialComplex:
    """Circle of n vertices placed on the unit sphere at a fixed colatitude."""
    _check([n], 3, "circle")
    t = 2 * np.pi * np.arange(n) / n
    st, ct = np.sin(colatitude), np.cos(colatitude)
    coords = np.stack([st * np.cos(t), st * np.sin(t), np.full(n, ct)], axis=1)
    cells = [(j, (j + 1) % n) for j in range(n)]
    return SimplicialComplex(cells, coords=coords, name="circle", params=(n,))


def equator_loop(K: SimplicialComplex) -> list[int]:
    """Counter-clockwise (seen from +z) closed vertex path along z = 0."""
    on = np.nonzero(np.abs(K.coords[:, 2]) < 1e-12)[0]
    phi = np.arctan2(K.coords[on, 1], K.coords[on, 0])
    ring = on[np.argsort(phi, kind="stable")].tolist()
    path = ring + [ring[0]]
    for a, b in zip(path[:-1], path[1:]):
        if (a, b) not in K:
            raise InvalidSpec("mesh has no equator edge path")
    return path


_SPEC = re.compile(r"^\s*([a-z0-9]+)\s*\(([^)]*)\)\s*$")


def build_mesh(spec: str, *resolution: int) -> SimplicialComplex:
    """Build a mesh from ``"torus3(3,3,3)"`` or ``("torus3", 3, 3, 3)``."""
    if not resolution:
        match = _SPEC.match(spec)
        if not match:
            raise InvalidSpec(f"cannot parse mesh spec {spec!r}")
        spec = match.group(1)
        try:
            resolution = tuple(int(x) for x in match.group(2).split(",") if x.strip())
        except ValueError as exc:
            raise InvalidSpec(f"bad resolution in {spec!r}") from exc
    arity = {"sphere2": 1, "torus2": 2, "torus3": 3, "cylinder": 2, "circle": 1}
    if spec not in arity:
        raise InvalidSpec(f"unknown generator {spec!r}; choose from {', '.join(GENERATORS)}")
    if len(resolution) != arity[spec]:
        raise InvalidSpec(f"{spec} takes {arity[spec]} resolution value(s)")
    return globals()[spec](*resolution)


def random_torus_cylinder(
    target: SimplicialComplex, n: int, m: int, rng: np.random.Generator
) -> SimplicialMap:
    """Random simplicial map ``cylinder(n, m) -> torus3``.

    The image of ``(i, j)`` is ``base + sign * (Q[i] + P[j])`` where ``P`` is a
    closed lattice loop and ``Q`` an open lattice path whose steps are 0/1
    vectors on disjoint sets of axes, so every cylinder triangle lands on a
    monotone lattice chain inside one cube, i.e. on a simplex of the Kuhn
    triangulation (possibly collapsed).  Loops may wind several times.
    """
    if target.name != "torus3":
        raise InvalidSpec("target must be a generated torus3")
    shape = np.array(target.params)
    axes = rng.permutation(3)
    n_loop_axes = int(rng.integers(1, 3))
    loop_axes, path_axes = axes[:n_loop_axes], axes[n_loop_axes:]

    P = np.zeros((m, 3), dtype=np.int64)  # steps of the closed loop
    for a in loop_axes:
        winding = int(rng.integers(0, m // shape[a] + 1))
        hits = rng.choice(m, size=winding * shape[a], replace=False)
        P[hits, a] = 1
    Q = np.zeros((n, 3), dtype=np.int64)
    Q[:, path_axes] = rng.integers(0, 2, size=(n, len(path_axes)))

    loop = np.vstack([np.zeros(3, dtype=np.int64), np.cumsum(P, axis=0)[:-1]])
    path = np.vstack([np.zeros(3, dtype=np.int64), np.cumsum(Q, axis=0)])
    if len(set(shape.tolist())) == 1:
        perm = rng.permutation(3)
        loop, path = loop[:, perm], path[:, perm]
    sign = 1 if rng.random() < 0.5 else -1
    base = rng.integers(0, shape)
    vmap = np.empty((n + 1) * m, dtype=np.int64)
    for i in range(n + 1):
        for j in range(m):
            q = base + sign * (path[i] + loop[j])
            vmap[i * m + j] = torus3_vertex(tuple(shape), *q)
    return SimplicialMap(cylinder(n, m), target, vmap)
