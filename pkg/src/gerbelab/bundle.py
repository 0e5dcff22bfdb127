"""Discrete Hermitian line bundles with connection.

A bundle is one unit phase per oriented edge (a link variable).  This
fuses transition functions and local connection forms into a single
gauge-covariant datum; every observable below (loop holonomy, plaquette
curvature, Chern number) is gauge invariant.

Sign convention: curvature is the principal argument of the oriented
boundary product of a triangle, and the lower band of ``x . sigma`` over
the outward-oriented sphere has Chern number -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cochain import Cochain, coboundary, integrate, principal_angle
from .complex import Chain, SimplicialComplex
from .errors import BaseMismatch, InvalidLoop, InvalidSurface, QuantizationFailure

QUANTIZATION_TOL = 1e-6


@dataclass(frozen=True)
class LineBundle:
    links: Cochain

    def __post_init__(self):
        if self.links.degree != 1 or self.links.kind != "phase":
            raise ValueError("link field must be a degree-1 phase cochain")

    @property
    def base(self) -> SimplicialComplex:
        return self.links.complex

    @classmethod
    def trivial(cls, base: SimplicialComplex) -> "LineBundle":
        return cls(Cochain.neutral(base, 1))

    @classmethod
    def from_angles(cls, base: SimplicialComplex, angles) -> "LineBundle":
        return cls(Cochain.from_angles(base, 1, angles))

    def link(self, v: int, w: int) -> complex:
        return self.links.value((v, w))


def _loop_chain(base: SimplicialComplex, loop: Sequence[int]) -> Chain:
    loop = list(loop)
    if len(loop) < 2 or loop[0] != loop[-1]:
        raise InvalidLoop("loop must be a closed vertex path (first vertex repeated at the end)")
    try:
        return Chain.path(base, loop)
    except KeyError as exc:
        raise InvalidLoop(str(exc)) from exc


def loop_holonomy(b: LineBundle, loop: Sequence[int]) -> complex:
    """Ordered product of link phases along a closed vertex path."""
    loop = list(loop)
    _loop_chain(b.base, loop)
    total = 1.0 + 0j
    for v, w in zip(loop[:-1], loop[1:]):
        total *= b.link(v, w)
    return total / abs(total)


def plaquette_curvature(b: LineBundle) -> Cochain:
    """Real 2-cochain: principal argument of each triangle's boundary product."""
    if b.base.dim < 2:
        raise ValueError("base has no triangles")
    return Cochain(b.base, 2, "real", coboundary(b.links).angles())


def _surface_chain(base: SimplicialComplex, surface: Chain | None) -> Chain:
    if surface is None:
        if base.dim != 2 or not base.is_closed:
            raise InvalidSurface("base is not a closed oriented surface; pass a surface chain")
        return base.fundamental_chain()
    if surface.degree != 2 or not surface.is_cycle:
        raise InvalidSurface("surface must be a closed 2-chain")
    return surface


def quantize(total: float, curvature: np.ndarray, support: np.ndarray, what: str) -> tuple[int, float]:
    """Round ``total / 2pi``; refuse when a cell sits on the branch cut."""
    near_cut = np.abs(curvature[support]) > np.pi - QUANTIZATION_TOL
    if np.any(near_cut):
        raise QuantizationFailure(f"{what}: {int(near_cut.sum())} cell(s) within tolerance of the branch cut")
    raw = total / (2 * np.pi)
    value = int(round(raw))
    residual = abs(raw - value)
    if residual >= QUANTIZATION_TOL:
        raise QuantizationFailure(f"{what}: flux/2pi = {raw!r} is not an integer")
    return value, residual


def chern_flux(b: LineBundle, surface: Chain | None = None) -> tuple[int, float]:
    """``(chern number, quantization residual)`` over a closed oriented surface."""
    surf = _surface_chain(b.base, surface)
    curv = plaquette_curvature(b)
    return quantize(integrate(curv, surf), curv.values, np.nonzero(surf.coeffs)[0], "chern")


def chern_number(b: LineBundle, surface: Chain | None = None) -> int:
    return chern_flux(b, surface)[0]


def gauge_transform(b: LineBundle, g: Cochain) -> LineBundle:
    """U'(v -> w) = g(w) U(v -> w) conj(g(v))."""
    if g.degree != 0 or g.kind != "phase" or g.complex is not b.base:
        raise ValueError("gauge must be a phase 0-cochain on the bundle's base")
    return LineBundle(b.links * coboundary(g))


def tensor(b1: LineBundle, b2: LineBundle) -> LineBundle:
    if b1.base is not b2.base:
        raise BaseMismatch("bundles live on different bases")
    return LineBundle(b1.links * b2.links)


def dual(b: LineBundle) -> LineBundle:
    return LineBundle(b.links.inverse())


def pure_gauge(base: SimplicialComplex, g: Cochain) -> LineBundle:
    """Flat bundle whose links are the coboundary of vertex phases."""
    return gauge_transform(LineBundle.trivial(base), g)


def monopole_bundle(base: SimplicialComplex, charge: int = -1) -> LineBundle:
    """Bundle of given Chern number on a coordinate sphere, by tree gauge.

    Each triangle gets ``charge * 2pi * area / 4pi`` of flux using exact
    spherical areas; the curvature cochain is then integrated back into link
    phases with a spanning tree on the dual graph.  Used to exercise the
    obstruction reports independently of any Hamiltonian.
    """
    from .cochain import solve_coboundary

    c = base.coords
    tri = base.simplices[2]
    a, bb, cc = c[tri[:, 0]], c[tri[:, 1]], c[tri[:, 2]]
    num = np.einsum("ij,ij->i", a, np.cross(bb, cc))
    den = 1 + np.einsum("ij,ij->i", a, bb) + np.einsum("ij,ij->i", bb, cc) + np.einsum("ij,ij->i", cc, a)
    area = 2 * np.arctan2(num, den)  # signed spherical excess, sign = stored orientation
    flux = Cochain.from_angles(base, 2, charge * area / 2)
    return LineBundle(solve_coboundary(flux))
