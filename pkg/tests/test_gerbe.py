import numpy as np
import pytest

from gerbelab import meshes
from gerbelab.bundle import loop_holonomy
from gerbelab.cochain import Cochain, coboundary, pullback, solve_coboundary
from gerbelab.complex import SimplicialComplex, SimplicialMap
from gerbelab.errors import InvalidSurface, NontrivialOnSubcomplex, NotProjectiveCocycle
from gerbelab.gerbe import (
    DiscreteGerbe,
    basic_gerbe,
    cylinder_check,
    dd_flux,
    dd_number,
    from_projective_cocycle,
    gauge_gerbe,
    pullback_gerbe,
    surface_holonomy,
    tetra_curvature,
    trivialize_over,
)
from gerbelab.scenarios import pauli_lifts, random_unitary


def subtorus_map(T, rng=None, axes=(0, 1), layer=0, sign=1, winding=(1, 1), offset=(0, 0, 0)):
    """Coordinate 2-torus inside a generated 3-torus, possibly wound several times."""
    shape = T.params
    a, b = axes
    S = meshes.torus2(winding[0] * shape[a], winding[1] * shape[b])
    n, m = S.params
    vm = np.empty(S.n_vertices, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            q = np.array(offset)
            q[3 - a - b] += layer
            q[a] += sign * i
            q[b] += sign * j
            vm[i * m + j] = meshes.torus3_vertex(shape, *q)
    return SimplicialMap(S, T, vm)


def random_closed_surfaces(T, rng, count):
    out = []
    for _ in range(count):
        a, b = rng.permutation(3)[:2]
        out.append(subtorus_map(
            T, axes=(int(a), int(b)), layer=int(rng.integers(3)), sign=int(rng.choice([-1, 1])),
            winding=tuple(int(x) for x in rng.integers(1, 3, size=2)),
            offset=tuple(int(x) for x in rng.integers(0, 3, size=3)),
        ))
    return out


def brute_force_product(W, f):
    """Product over source triangles, positively ordered, of the target phase."""
    S, total = f.source, 1 + 0j
    for row, sign in zip(S.simplices[2].tolist(), S.orientation.tolist()):
        a, b, c = row if sign > 0 else (row[1], row[0], row[2])
        img = [int(f.vertex_map[v]) for v in (a, b, c)]
        if len(set(img)) == 3:
            total *= W.value(img)
    return total


def reversed_complex(K):
    cells = []
    for row, sign in zip(K.simplices[K.dim].tolist(), K.orientation.tolist()):
        if sign > 0:
            row[0], row[1] = row[1], row[0]
        cells.append(row)
    return SimplicialComplex(cells, n_vertices=K.n_vertices, coords=K.coords)


@pytest.fixture(scope="module")
def basic1(t3):
    return basic_gerbe(t3, 1)


# ----------------------------------------------------- projective cocycles


def test_exact_unitary_cocycle_gives_trivial_gerbe(t3, rng):
    frames = [random_unitary(3, rng) for _ in range(t3.n_vertices)]
    lifts = {tuple(e): frames[e[0]] @ frames[e[1]].conj().T for e in t3.simplices[1].tolist()}
    g = from_projective_cocycle(t3, lifts)
    assert g.phases.is_neutral(1e-12)


def test_rephasing_lifts_shifts_by_coboundary(t3, rng):
    frames = [random_unitary(2, rng) for _ in range(t3.n_vertices)]
    base = {tuple(e): frames[e[0]] @ frames[e[1]].conj().T for e in t3.simplices[1].tolist()}
    lam = Cochain.random(t3, 1, "phase", rng)
    twisted = {e: lam.value(e) * g for e, g in base.items()}
    g0, g1 = from_projective_cocycle(t3, base), from_projective_cocycle(t3, twisted)
    assert g1.phases.distance(g0.phases * coboundary(lam)) < 1e-10
    assert coboundary(g1.phases).is_neutral(1e-10)
    assert dd_number(g1) == dd_number(g0) == 0


def test_reversed_keys_use_inverse(rng):
    S = meshes.torus2(3, 3)
    lifts = {(w, v): np.conj(g.T) for (v, w), g in pauli_lifts(S).items()}
    g1 = from_projective_cocycle(S, lifts)
    g0 = from_projective_cocycle(S, pauli_lifts(S))
    assert g1.phases.distance(g0.phases) < 1e-14


def test_random_lifts_are_not_projective(rng):
    S = meshes.torus2(3, 3)
    lifts = {tuple(e): random_unitary(2, rng) for e in S.simplices[1].tolist()}
    with pytest.raises(NotProjectiveCocycle):
        from_projective_cocycle(S, lifts)


def test_missing_lift():
    S = meshes.torus2(3, 3)
    lifts = pauli_lifts(S)
    lifts.pop(next(iter(lifts)))
    with pytest.raises(ValueError):
        from_projective_cocycle(S, lifts)


@pytest.mark.parametrize("n", [3, 4])
def test_pauli_twist_holonomy(n):
    S = meshes.torus2(n, n)
    g = from_projective_cocycle(S, pauli_lifts(S))
    hol = surface_holonomy(g, SimplicialMap.identity(S))
    assert abs(hol - (-1) ** (n * n)) < 1e-12
    if n % 2:
        with pytest.raises(NontrivialOnSubcomplex) as info:
            trivialize_over(g)
        assert abs(abs(info.value.report.flux) - np.pi) < 1e-9
    else:
        trivialize_over(g)


# ------------------------------------------------------------ curvature


def test_flat_gerbes_have_zero_curvature(t3, rng):
    assert np.all(tetra_curvature(DiscreteGerbe.trivial(t3)).values == 0)
    g = DiscreteGerbe(coboundary(Cochain.random(t3, 1, "phase", rng)))
    assert np.max(np.abs(tetra_curvature(g).values)) < 1e-12


def test_basic_gerbe_total_curvature_brute_force(t3, basic1):
    total = 0.0
    for row, sign in zip(t3.simplices[3].tolist(), t3.orientation.tolist()):
        a, b, c, d = row if sign > 0 else (row[1], row[0], row[2], row[3])
        W = basic1.phases.value
        # boundary of (abcd) = (bcd) - (acd) + (abd) - (abc)
        prod = W((b, c, d)) * np.conj(W((a, c, d))) * W((a, b, d)) * np.conj(W((a, b, c)))
        total += np.angle(prod)
    assert total == pytest.approx(2 * np.pi, abs=1e-9)
    curv = tetra_curvature(basic1)
    assert float(np.sum(curv.values * t3.orientation)) == pytest.approx(2 * np.pi, abs=1e-9)


# ------------------------------------------------------------------- DD


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
def test_dd_of_basic_gerbe(n, k):
    dd, residual = dd_flux(basic_gerbe(meshes.torus3(n, n, n), k))
    assert dd == k and residual < 1e-6


def test_basic_gerbe_k0_and_conjugation(t3, basic1):
    assert basic_gerbe(t3, 0).phases.is_neutral()
    minus = basic_gerbe(t3, -1)
    assert minus.phases.distance(basic1.phases.inverse()) == 0
    assert dd_number(minus) == -1


def test_dd_gauge_invariant(t3, rng):
    for k in (-2, 1):
        g = basic_gerbe(t3, k)
        for _ in range(10):
            assert dd_number(gauge_gerbe(g, Cochain.random(t3, 1, "phase", rng))) == k


def test_dd_negates_under_orientation_reversal(t3):
    R = reversed_complex(t3)
    for k in (1, 2):
        g = basic_gerbe(t3, k)
        assert dd_number(DiscreteGerbe(Cochain(R, 2, "phase", g.phases.values))) == -k


def test_dd_needs_closed_manifold():
    with pytest.raises(InvalidSurface):
        dd_number(DiscreteGerbe.trivial(meshes.torus2(3, 3)))


# --------------------------------------------------------- surface holonomy


def test_trivial_and_flat_gerbes_have_unit_holonomy(t3, rng):
    flat = DiscreteGerbe(coboundary(Cochain.random(t3, 1, "phase", rng)))
    for f in random_closed_surfaces(t3, rng, 10):
        assert surface_holonomy(DiscreteGerbe.trivial(t3), f) == 1
        assert abs(surface_holonomy(flat, f) - 1) < 1e-12


def test_xy_subtorus_holonomy_matches_brute_force(t3, basic1):
    hols = []
    for layer in range(3):
        f = subtorus_map(t3, axes=(0, 1), layer=layer)
        hols.append(surface_holonomy(basic1, f))
        assert abs(hols[-1] - brute_force_product(basic1.phases, f)) < 1e-12
    # the slab between two xy-layers holds the whole flux tube (2 pi)
    assert max(abs(h - hols[0]) for h in hols) < 1e-12


def test_yz_layers_differ_by_slab_flux(t3, basic1):
    # the tube runs along x, so one x-slab carries a third of its flux
    yz = [surface_holonomy(basic1, subtorus_map(t3, axes=(1, 2), layer=x)) for x in range(3)]
    steps = [yz[(x + 1) % 3] * np.conj(yz[x]) for x in range(3)]
    assert max(abs(s - steps[0]) for s in steps) < 1e-12
    assert abs(abs(np.angle(steps[0])) - 2 * np.pi / 3) < 1e-12


def test_product_and_trivialize_methods_agree(t3, rng):
    g = DiscreteGerbe.random(t3, rng)
    for f in random_closed_surfaces(t3, rng, 10):
        p = surface_holonomy(g, f, method="product")
        q = surface_holonomy(g, f, method="trivialize")
        assert abs(p - q) < 1e-12
        assert abs(p - brute_force_product(g.phases, f)) < 1e-12


def test_surface_holonomy_gauge_invariant(t3, rng):
    g = DiscreteGerbe.random(t3, rng)
    surfaces = random_closed_surfaces(t3, rng, 20)
    assert gauge_gerbe(g, Cochain.neutral(t3, 1)).phases.distance(g.phases) < 1e-15
    shifted = gauge_gerbe(g, Cochain.random(t3, 1, "phase", rng))
    for f in surfaces:
        assert abs(surface_holonomy(shifted, f) - surface_holonomy(g, f)) < 1e-12


def test_surface_holonomy_needs_closed_surface(t3, rng):
    f = meshes.random_torus_cylinder(t3, 2, 6, rng)
    with pytest.raises(InvalidSurface):
        surface_holonomy(DiscreteGerbe.trivial(t3), f)


# ------------------------------------------------------------ trivialize


def test_star_trivializes_on_surfaces(rng):
    S = meshes.torus2(4, 5)
    g = DiscreteGerbe.random(S, rng)
    for t in (0, 7, 30):
        star = S.star(tuple(S.simplices[2][t]))
        obj = trivialize_over(g, star)
        target = Cochain(star, 2, "phase", [g.phases.value(tr) for tr in star.simplices[2].tolist()])
        assert coboundary(obj.links).distance(target) < 1e-12


def test_star_trivializes_where_gerbe_is_flat(t3, rng, basic1):
    flat = DiscreteGerbe(coboundary(Cochain.random(t3, 1, "phase", rng)))
    curv = tetra_curvature(basic1).values
    for t in range(0, t3.count(2), 37):
        star = t3.star(tuple(t3.simplices[2][t]))
        trivialize_over(flat, star)
        tets = [t3.index(r)[0] for r in star.simplices[3].tolist()]
        if np.all(curv[tets] == 0):
            trivialize_over(basic1, star)


def test_curved_star_obstruction_is_its_curvature(t3, rng):
    # the discrete object has no curving: over a solid star the
    # trivialization exists only if the tetra curvature vanishes there
    g = DiscreteGerbe.random(t3, rng)
    star = t3.star(tuple(t3.simplices[2][5]))
    with pytest.raises(NontrivialOnSubcomplex) as info:
        trivialize_over(g, star)
    report = info.value.report
    assert report.flux is None  # a star is not closed
    assert coboundary(report.residual).distance(coboundary(report.target)) < 1e-12
    assert not coboundary(report.target).is_neutral(1e-6)


def test_cylinder_pullback_trivializes(t3, rng):
    g = DiscreteGerbe.random(t3, rng)
    f = meshes.random_torus_cylinder(t3, 8, 12, rng)
    obj = trivialize_over(pullback_gerbe(f, g))
    assert coboundary(obj.links).distance(pullback(f, g.phases)) < 1e-12


def test_whole_torus_obstruction(t3, basic1):
    with pytest.raises(NontrivialOnSubcomplex) as info:
        trivialize_over(basic1)
    assert info.value.report.flux == pytest.approx(2 * np.pi, abs=1e-9)


# ----------------------------------------------------------- cylinder


def test_cylinder_check_trivial(t3, rng):
    rec = cylinder_check(DiscreteGerbe.trivial(t3), meshes.random_torus_cylinder(t3, 3, 6, rng))
    assert rec.surface_phase == 1 and abs(rec.hol0 - 1) < 1e-15 and abs(rec.hol1 - 1) < 1e-15
    assert rec.residual < 1e-15


def test_cylinder_identity_random(t3, rng):
    for _ in range(30):
        g = DiscreteGerbe.random(t3, rng)
        f = meshes.random_torus_cylinder(t3, int(rng.integers(1, 9)), int(rng.integers(3, 13)), rng)
        rec = cylinder_check(g, f)
        assert rec.residual < 1e-9
        assert abs(rec.surface_phase - rec.hol0 * np.conj(rec.hol1)) < 1e-9


def test_cylinder_with_equal_ends(t3, rng):
    C = meshes.cylinder(4, 6)
    loop = [meshes.torus3_vertex(t3.params, *q) for q in
            [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0), (0, 1, 0), (0, 2, 0)]]
    f = SimplicialMap(C, t3, np.tile(loop, 5))
    rec = cylinder_check(DiscreteGerbe.random(t3, rng), f)
    assert abs(rec.surface_phase - 1) < 1e-9
    assert abs(rec.hol0 - rec.hol1) < 1e-9


def test_cylinder_check_after_gauge_shift(t3, rng):
    from gerbelab.bundle import LineBundle

    g = DiscreteGerbe.random(t3, rng)
    for _ in range(10):
        f = meshes.random_torus_cylinder(t3, 5, 9, rng)
        lam = Cochain.random(t3, 1, "phase", rng)
        r0, r1 = cylinder_check(g, f), cylinder_check(gauge_gerbe(g, lam), f)
        assert r1.residual < 1e-9
        # an open surface picks up the shift's holonomy around its boundary
        b = LineBundle(pullback(f, lam))
        h0 = loop_holonomy(b, meshes.cylinder_boundary(f.source, 0))
        h1 = loop_holonomy(b, meshes.cylinder_boundary(f.source, 1))
        assert abs(r1.surface_phase - r0.surface_phase * h0 * np.conj(h1)) < 1e-9


def test_cylinder_holonomy_matches_trivialization_by_hand(t3, rng):
    g = DiscreteGerbe.random(t3, rng)
    f = meshes.random_torus_cylinder(t3, 3, 7, rng)
    u = solve_coboundary(pullback(f, g.phases))
    from gerbelab.bundle import LineBundle

    rec = cylinder_check(g, f)
    b = LineBundle(u)
    ratio = loop_holonomy(b, meshes.cylinder_boundary(f.source, 0)) * np.conj(
        loop_holonomy(b, meshes.cylinder_boundary(f.source, 1)))
    assert abs(ratio - rec.surface_phase) < 1e-9


# ------------------------------------------------------------- pullback


def test_pullback_identity_and_constant(t3, rng):
    g = DiscreteGerbe.random(t3, rng)
    assert pullback_gerbe(SimplicialMap.identity(t3), g).phases.distance(g.phases) == 0
    S = meshes.torus2(3, 3)
    assert pullback_gerbe(SimplicialMap(S, t3, np.zeros(S.n_vertices, dtype=np.int64)), g).phases.is_neutral()


def test_tetra_curvature_naturality_under_translation(t3, rng):
    shape = t3.params
    vm = np.array([meshes.torus3_vertex(shape, i + 1, j + 2, k) for i in range(3) for j in range(3) for k in range(3)])
    f = SimplicialMap(t3, t3, vm)
    for g in (DiscreteGerbe.random(t3, rng), basic_gerbe(t3, 2)):
        lhs = tetra_curvature(pullback_gerbe(f, g))
        rhs = pullback(f, tetra_curvature(g))
        assert lhs.distance(rhs) < 1e-12
