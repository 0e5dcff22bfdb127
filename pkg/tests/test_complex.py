import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gerbelab import meshes
from gerbelab.cochain import Cochain, coboundary, integrate, pullback, solve_coboundary
from gerbelab.complex import Chain, SimplicialComplex, SimplicialMap, permutation_parity
from gerbelab.errors import InvalidComplex, InvalidMap, InvalidSpec, ObstructionError


# ------------------------------------------------------------------ meshes


def test_sphere2_level1_counts():
    S = meshes.sphere2(1)
    assert (S.count(0), S.count(2)) == (18, 32)
    assert S.euler_characteristic == 2


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_sphere_euler_and_closed(n):
    S = meshes.sphere2(n)
    assert S.euler_characteristic == 2
    assert S.is_closed
    assert S.count(2) == 8 * (n + 1) ** 2


def test_sphere_orientation_is_outward():
    S = meshes.sphere2(3)
    c, t = S.coords, S.simplices[2]
    normal = np.cross(c[t[:, 1]] - c[t[:, 0]], c[t[:, 2]] - c[t[:, 0]])
    outward = np.sign(np.einsum("ij,ij->i", normal, c[t[:, 0]]))
    assert np.all(outward * S.orientation == 1)


def test_torus2_euler():
    assert meshes.torus2(3, 3).euler_characteristic == 0
    assert meshes.torus2(3, 3).is_closed


def test_torus3_every_triangle_in_two_tetrahedra():
    T = meshes.torus3(3, 3, 3)
    counts = np.bincount(T.faces[3].ravel(), minlength=T.count(2))
    assert np.all(counts == 2)
    assert T.is_closed
    assert T.euler_characteristic == 0


def test_torus3_two_cells_per_direction_is_not_simplicial():
    # 8 vertices cannot triangulate T^3 (at least 15 are needed)
    with pytest.raises(InvalidSpec):
        meshes.torus3(2, 2, 2)


def test_cylinder_boundary_is_c0_minus_c1():
    C = meshes.cylinder(4, 6)
    assert not C.is_closed and C.is_oriented
    expected = Chain.path(C, meshes.cylinder_boundary(C, 0)) - Chain.path(C, meshes.cylinder_boundary(C, 1))
    assert C.fundamental_chain().boundary() == expected


def test_circle_closed():
    K = meshes.circle(5)
    assert K.is_closed and K.euler_characteristic == 0


@pytest.mark.parametrize("spec", ["sphere2(0)", "torus2(3,0)", "circle(0)", "cube(3)", "torus3(3,3)", "sphere2"])
def test_build_mesh_rejects_bad_specs(spec):
    with pytest.raises(InvalidSpec):
        meshes.build_mesh(spec)


def test_build_mesh_parses_strings():
    K = meshes.build_mesh("torus3(3, 4, 3)")
    assert K.params == (3, 4, 3) and K.count(3) == 6 * 36


def test_complex_rejects_duplicate_cells():
    with pytest.raises(InvalidComplex):
        SimplicialComplex([(0, 1, 2), (2, 1, 0)])
    with pytest.raises(InvalidComplex):
        SimplicialComplex([(0, 0, 1)])


def test_index_reports_orientation():
    K = SimplicialComplex([(0, 1, 2)])
    assert K.index((0, 1, 2))[1] == 1
    assert K.index((1, 0, 2))[1] == -1
    assert K.index((1, 2, 0))[1] == 1
    assert permutation_parity(np.array([[2, 1, 0, 3]]))[0] == -1


def test_star_of_triangle(t3):
    tri = tuple(t3.simplices[2][17])
    star = t3.star(tri)
    assert star.count(3) == 2
    assert star.is_oriented


# -------------------------------------------------------------- coboundary


def test_single_triangle_alternating_sum():
    K = SimplicialComplex([(0, 1, 2)])
    a, b, c = 0.3, -1.1, 2.5
    vals = np.zeros(3)
    vals[K.index((0, 1))[0]] = a
    vals[K.index((1, 2))[0]] = b
    vals[K.index((0, 2))[0]] = c
    d = coboundary(Cochain(K, 1, "real", vals))
    assert d.values[0] == pytest.approx(a + b - c, abs=1e-15)


def test_coboundary_of_constant_phase_is_one(all_meshes):
    for K in all_meshes:
        for k in range(K.dim):
            assert coboundary(Cochain.neutral(K, k)).is_neutral()


def test_coboundary_squares_to_zero(all_meshes, rng):
    for K in all_meshes:
        for k in range(K.dim - 1):
            c = Cochain.random(K, k, "real", rng)
            assert np.max(np.abs(coboundary(coboundary(c)).values)) < 1e-12
            p = Cochain.random(K, k, "phase", rng)
            assert coboundary(coboundary(p)).is_neutral(1e-12)


def test_coboundary_matrix_matches_operator(rng):
    K = meshes.torus3(3, 3, 3)
    c = Cochain.random(K, 1, "real", rng)
    assert np.allclose(K.coboundary_matrix(1) @ c.values, coboundary(c).values, atol=1e-13)


def test_orientation_reversal_conjugates():
    K = SimplicialComplex([(0, 1, 2)])
    c = Cochain.from_angles(K, 1, [0.1, 0.2, 0.3])
    assert c.value((1, 0)) == pytest.approx(np.conj(c.value((0, 1))))
    r = Cochain(K, 1, "real", [0.1, 0.2, 0.3])
    assert r.value((2, 1)) == -r.value((1, 2))


def test_phase_cochain_rejects_non_unit_values():
    K = SimplicialComplex([(0, 1)])
    with pytest.raises(ValueError):
        Cochain(K, 1, "phase", [1.1])


# ---------------------------------------------------------------- pullback


def test_pullback_identity(rng):
    K = meshes.sphere2(2)
    c = Cochain.random(K, 2, "phase", rng)
    assert pullback(SimplicialMap.identity(K), c).distance(c) == 0.0


def test_pullback_along_constant_map_is_neutral(rng, t3):
    S = meshes.torus2(3, 3)
    f = SimplicialMap(S, t3, np.full(S.n_vertices, 4))
    assert pullback(f, Cochain.random(t3, 2, "phase", rng)).is_neutral()
    assert pullback(f, Cochain.random(t3, 1, "real", rng)).is_neutral()


def test_pullback_rejects_non_simplicial_map(t3):
    S = meshes.torus2(3, 3)
    with pytest.raises(InvalidMap):
        # (0,0,0) and (1,1,2) differ by (1,1,-1): not a Kuhn edge
        vm = np.zeros(S.n_vertices, dtype=np.int64)
        vm[1] = meshes.torus3_vertex(t3.params, 1, 1, 2)
        SimplicialMap(S, t3, vm)


def test_pullback_commutes_with_coboundary(rng, t3):
    for _ in range(10):
        f = meshes.random_torus_cylinder(t3, 4, 9, rng)
        for kind in ("real", "phase"):
            c = Cochain.random(t3, 1, kind, rng)
            lhs = coboundary(pullback(f, c))
            rhs = pullback(f, coboundary(c))
            assert lhs.distance(rhs) < 1e-12


# --------------------------------------------------------------- integrate


def test_integrate_trivial_cases():
    K = SimplicialComplex([(0, 1, 2)])
    c = Cochain(K, 1, "real", [0.5, 1.5, -2.0])
    assert integrate(c, []) == 0.0
    assert integrate(Cochain.neutral(K, 1), []) == 1.0
    assert integrate(c, [(0, 1)]) == 0.5
    assert integrate(c, [(1, 0)]) == -0.5


def test_discrete_stokes_on_patch(rng):
    S = meshes.sphere2(3)
    patch = S.star((0,))  # disk around vertex 0
    chain = Chain(S, 2, np.zeros(S.count(2), dtype=np.int64))
    for row in patch.simplices[2].tolist():
        sid, _ = S.index(row)
        chain.coeffs[sid] = S.orientation[sid]
    a = Cochain.random(S, 1, "real", rng)
    assert integrate(coboundary(a), chain) == pytest.approx(integrate(a, chain.boundary()), abs=1e-12)
    p = Cochain.random(S, 1, "phase", rng)
    assert abs(integrate(coboundary(p), chain) - integrate(p, chain.boundary())) < 1e-12


# ------------------------------------------------------- solve_coboundary


@pytest.mark.parametrize("k", [1, 2])
def test_solve_coboundary_round_trip(k, all_meshes, rng):
    for K in all_meshes:
        if K.dim < k:
            continue
        target = coboundary(Cochain.random(K, k - 1, "phase", rng))
        u = solve_coboundary(target)
        assert coboundary(u).distance(target) < 1e-12


def test_solve_all_ones_gives_all_ones(all_meshes):
    for K in all_meshes:
        for k in (1, 2):
            if K.dim >= k:
                assert solve_coboundary(Cochain.neutral(K, k)).is_neutral()


def test_solve_is_deterministic(rng):
    K = meshes.cylinder(3, 5)
    target = coboundary(Cochain.random(K, 1, "phase", rng))
    assert np.array_equal(solve_coboundary(target).values, solve_coboundary(target).values)


def test_solve_real_round_trip(rng):
    K = meshes.torus3(3, 3, 3)
    target = coboundary(Cochain.random(K, 1, "real", rng))
    u = solve_coboundary(target)
    assert coboundary(u).distance(target) < 1e-12


def test_nontrivial_holonomy_is_obstruction():
    K = meshes.circle(5)
    target = Cochain.from_angles(K, 1, [0.7, 0, 0, 0, 0])
    with pytest.raises(ObstructionError) as info:
        solve_coboundary(target)
    # holonomy of the residual around the circle equals the offending phase
    report = info.value.report
    assert report.flux == pytest.approx(0.7)


def test_torus_cycle_class_is_solvable_in_degree_two(rng):
    # H^1 classes leave free directions; elimination must still succeed
    K = meshes.torus2(4, 3)
    b = Cochain.random(K, 1, "phase", rng)
    u = solve_coboundary(coboundary(b))
    assert coboundary(u).distance(coboundary(b)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), m=st.integers(3, 7))
def test_cylinder_gerbe_always_trivializes(seed, n, m):
    K = meshes.cylinder(n, m)
    target = Cochain.random(K, 2, "phase", np.random.default_rng(seed))
    u = solve_coboundary(target)
    assert coboundary(u).distance(target) < 1e-12
