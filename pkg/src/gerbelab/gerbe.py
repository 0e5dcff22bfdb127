"""Discrete U(1) gerbes with connective structure.

A gerbe is stored as one unit phase per oriented triangle: the surface
transport through that triangle.  The classifying cocycle, connection
1-forms and curvings of a Cech presentation only enter as inputs (see
:func:`from_projective_cocycle`); curvature, the Dixmier-Douady number,
surface holonomy and the cylinder identity are all functions of the
triangle phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .bundle import LineBundle, loop_holonomy, quantize
from .cochain import Cochain, coboundary, integrate, pullback, restrict, solve_coboundary
from .complex import Chain, SimplicialComplex, SimplicialMap
from .errors import (
    InvalidSpec,
    InvalidSurface,
    NontrivialOnSubcomplex,
    NotProjectiveCocycle,
    ObstructionError,
)
from .meshes import cylinder_boundary, torus3_vertex

SCALAR_TOL = 1e-8


@dataclass(frozen=True)
class DiscreteGerbe:
    phases: Cochain

    def __post_init__(self):
        if self.phases.degree != 2 or self.phases.kind != "phase":
            raise ValueError("gerbe data must be a degree-2 phase cochain")

    @property
    def base(self) -> SimplicialComplex:
        return self.phases.complex

    @classmethod
    def trivial(cls, base: SimplicialComplex) -> "DiscreteGerbe":
        return cls(Cochain.neutral(base, 2))

    @classmethod
    def random(cls, base: SimplicialComplex, rng: np.random.Generator) -> "DiscreteGerbe":
        return cls(Cochain.random(base, 2, "phase", rng))


@dataclass(frozen=True)
class TrivializationObject:
    """Edge phases ``u`` on a subcomplex with ``coboundary(u) == W|sub``.

    This is a global object of the restricted gerbe together with its
    connection: the loop holonomy of ``u`` is the admissible-connection
    holonomy on that object.
    """

    sub: SimplicialComplex
    links: Cochain

    def bundle(self) -> LineBundle:
        return LineBundle(self.links)


# ---------------------------------------------------------------- construction


def from_projective_cocycle(base: SimplicialComplex, lifts: dict) -> DiscreteGerbe:
    """Lifting obstruction of projective transition data.

    ``lifts`` maps each edge ``(v, w)`` (either order) to a unitary matrix
    ``g_vw``; the reverse edge carries its inverse.  On every triangle
    ``(a, b, c)`` the product ``g_ab g_bc g_ca`` must be a scalar; that
    scalar (normalized trace) is the triangle phase.
    """
    mats = {}
    for (v, w), g in lifts.items():
        g = np.asarray(g, dtype=complex)
        if v < w:
            mats[(v, w)] = g
        else:
            mats[(w, v)] = np.conj(g.T)
    missing = [tuple(e) for e in base.simplices[1].tolist() if tuple(e) not in mats]
    if missing:
        raise ValueError(f"no lift for edge {missing[0]}")

    out = np.empty(base.count(2), dtype=complex)
    for t, (a, b, c) in enumerate(base.simplices[2].tolist()):
        prod = mats[(a, b)] @ mats[(b, c)] @ np.conj(mats[(a, c)].T)
        n = prod.shape[0]
        scalar = np.trace(prod) / n
        dev = float(np.max(np.abs(prod - scalar * np.eye(n))))
        if dev > SCALAR_TOL or abs(abs(scalar) - 1) > SCALAR_TOL:
            raise NotProjectiveCocycle((a, b, c), dev)
        out[t] = scalar / abs(scalar)
    return DiscreteGerbe(Cochain(base, 2, "phase", out))


def basic_gerbe(base: SimplicialComplex, k: int) -> DiscreteGerbe:
    """Gerbe of Dixmier-Douady number ``k`` on a generated 3-torus.

    Total curvature ``2 pi k`` is spread evenly over the tetrahedra of the
    column of cubes at ``(y, z) = (0, 0)``; the triangle phases are obtained
    by solving the coboundary equation for that curvature, which is
    possible because the phases of the curvature multiply to one.
    Negative ``k`` is the conjugate of ``-k``.
    """
    if base.name != "torus3":
        raise InvalidSpec("basic_gerbe needs a generated torus3 base")
    if k == 0:
        return DiscreteGerbe.trivial(base)
    if k < 0:
        return DiscreteGerbe(basic_gerbe(base, -k).phases.inverse())
    shape = base.params
    in_column = np.zeros(base.count(3), dtype=bool)
    for i in range(shape[0]):
        for perm in permutations(range(3)):
            step = np.eye(3, dtype=np.int64)[list(perm)]
            corners = [(i, 0, 0), (i, 0, 0) + step[0], (i, 0, 0) + step[0] + step[1], (i + 1, 1, 1)]
            in_column[base.index([torus3_vertex(shape, *q) for q in corners])[0]] = True
    per_tet = 2 * np.pi * k / int(in_column.sum())
    curvature = np.where(in_column, per_tet * base.orientation, 0.0)
    phases = solve_coboundary(Cochain.from_angles(base, 3, curvature))
    return DiscreteGerbe(phases)


# ------------------------------------------------------------------ observables


def tetra_curvature(g: DiscreteGerbe) -> Cochain:
    """Real 3-cochain: principal argument of each tetrahedron's boundary product."""
    if g.base.dim < 3:
        raise ValueError("base has no tetrahedra")
    return Cochain(g.base, 3, "real", coboundary(g.phases).angles())


def _volume_chain(base: SimplicialComplex, manifold: Chain | None) -> Chain:
    if manifold is None:
        if base.dim != 3 or not base.is_closed:
            raise InvalidSurface("base is not a closed oriented 3-manifold; pass a 3-cycle")
        return base.fundamental_chain()
    if manifold.degree != 3 or not manifold.is_cycle:
        raise InvalidSurface("manifold must be a closed 3-chain")
    return manifold


def dd_flux(g: DiscreteGerbe, manifold: Chain | None = None) -> tuple[int, float]:
    """``(Dixmier-Douady number, quantization residual)``."""
    vol = _volume_chain(g.base, manifold)
    curv = tetra_curvature(g)
    return quantize(integrate(curv, vol), curv.values, np.nonzero(vol.coeffs)[0], "dixmier-douady")


def dd_number(g: DiscreteGerbe, manifold: Chain | None = None) -> int:
    return dd_flux(g, manifold)[0]


def gauge_gerbe(g: DiscreteGerbe, shift: Cochain) -> DiscreteGerbe:
    """W' = W * coboundary(shift) for a phase 1-cochain ``shift``."""
    if shift.degree != 1 or shift.kind != "phase" or shift.complex is not g.base:
        raise ValueError("shift must be a phase 1-cochain on the gerbe's base")
    return DiscreteGerbe(g.phases * coboundary(shift))


def pullback_gerbe(f: SimplicialMap, g: DiscreteGerbe) -> DiscreteGerbe:
    return DiscreteGerbe(pullback(f, g.phases))


def trivialize_over(g: DiscreteGerbe, sub: SimplicialComplex | None = None) -> TrivializationObject:
    """Edge phases ``u`` on ``sub`` with ``coboundary(u) = W|sub``.

    Raises :class:`NontrivialOnSubcomplex` carrying the obstruction report
    when the restricted gerbe admits no global object.
    """
    sub = g.base if sub is None else sub
    target = g.phases if sub is g.base else restrict(g.phases, sub)
    try:
        u = solve_coboundary(target)
    except ObstructionError as exc:
        raise NontrivialOnSubcomplex(exc.report, f"gerbe is nontrivial on the subcomplex: {exc}") from None
    return TrivializationObject(sub, u)


def _closed_surface(f: SimplicialMap) -> SimplicialComplex:
    S = f.source
    if S.dim != 2 or not S.is_closed:
        raise InvalidSurface("source must be a closed oriented surface")
    return S


def surface_holonomy(g: DiscreteGerbe, f: SimplicialMap, method: str = "product") -> complex:
    """Holonomy of ``g`` around the closed oriented surface ``f: S -> base``.

    ``method="product"`` multiplies the pulled-back triangle phases over
    the fundamental class.  ``method="trivialize"`` follows the
    trivialize-then-integrate recipe: drop one triangle ``t0``, trivialize
    the pullback on the rest (a surface with boundary, hence trivial),
    and read the holonomy off the residual concentrated on ``t0``.
    """
    S = _closed_surface(f)
    W = pullback(f, g.phases)
    if method == "product":
        return integrate(W, S.fundamental_chain())
    if method != "trivialize":
        raise ValueError(f"unknown method {method!r}")
    top = S.simplices[2]
    cells = []
    for row, sign in zip(top[1:].tolist(), S.orientation[1:].tolist()):
        cells.append(row if sign > 0 else [row[1], row[0], row[2]])
    punctured = S.subcomplex(cells)
    u = solve_coboundary(restrict(W, punctured))
    u_full = np.ones(S.count(1), dtype=complex)
    for e, val in zip(punctured.simplices[1].tolist(), u.values):
        u_full[S.index(e)[0]] = val
    du = coboundary(Cochain(S, 1, "phase", u_full))
    r = W.values[0] * np.conj(du.values[0])
    return complex(r if S.orientation[0] > 0 else np.conj(r))


@dataclass(frozen=True)
class CylinderRecord:
    surface_phase: complex
    hol0: complex
    hol1: complex
    residual: float


def cylinder_check(g: DiscreteGerbe, f: SimplicialMap) -> CylinderRecord:
    """Surface holonomy of a cylinder against its two boundary holonomies.

    The gerbe is pulled back to ``cylinder(n, m)`` and trivialized there
    once; ``hol_i`` is the holonomy of that trivialization along the
    boundary circle ``c_i`` (increasing ``j``).  The surface phase is the
    product of pulled-back triangle phases, computed independently of the
    trivialization.  The identity ``surface = hol0 / hol1`` is exact up to
    rounding.
    """
    C = f.source
    if C.name != "cylinder":
        raise InvalidSurface("source must be a generated cylinder")
    pulled = pullback_gerbe(f, g)
    triv = trivialize_over(pulled)
    b = triv.bundle()
    hol0 = loop_holonomy(b, cylinder_boundary(C, 0))
    hol1 = loop_holonomy(b, cylinder_boundary(C, 1))
    surface = integrate(pulled.phases, C.fundamental_chain())
    return CylinderRecord(surface, hol0, hol1, float(abs(surface - hol0 * np.conj(hol1))))
