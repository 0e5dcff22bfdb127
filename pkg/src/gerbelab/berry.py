"""Hamiltonian families, energy level bundles, Berry phases and adiabatic checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bundle import LineBundle, loop_holonomy
from .cochain import Cochain, principal_angle, wrap_angle
from .complex import SimplicialComplex
from .errors import DegenerateBand, GapClosure, IntegratorFailure, InvalidField, InvalidLoop, MeshTooCoarse

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-12
OVERLAP_TOL = 1e-6
NORM_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class HamiltonianFamily:
    """One Hermitian matrix per vertex of a parameter complex.

    ``gap_tol`` defaults to 1e-3 times the mean spectral spread.
    """

    base: SimplicialComplex
    matrices: np.ndarray
    band: int = 0
    gap_tol: float | None = None

    def __post_init__(self):
        H = np.asarray(self.matrices, dtype=complex)
        if H.ndim != 3 or H.shape[1] != H.shape[2] or H.shape[0] != self.base.n_vertices:
            raise ValueError("matrices must have shape (n_vertices, n, n)")
        dev = np.max(np.abs(H - np.conj(np.swapaxes(H, 1, 2))))
        if dev > HERMITIAN_TOL:
            raise ValueError(f"matrices are not Hermitian (deviation {dev:.2e})")
        if not 0 <= self.band < H.shape[1]:
            raise ValueError(f"band {self.band} out of range for {H.shape[1]}x{H.shape[1]} matrices")
        H = H.copy()
        H.setflags(write=False)
        object.__setattr__(self, "matrices", H)
        if self.gap_tol is None:
            ev = np.linalg.eigvalsh(H)
            object.__setattr__(self, "gap_tol", 1e-3 * float(np.mean(ev[:, -1] - ev[:, 0])))
        if not self.gap_tol > 0 and H.shape[1] > 1:
            raise ValueError("gap tolerance must be positive")

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]


@dataclass(frozen=True)
class EigenFrame:
    base: SimplicialComplex
    vectors: np.ndarray  # (n_vertices, n)
    energies: np.ndarray  # (n_vertices,)
    gaps: np.ndarray = field(repr=False, default=None)


def _band_gap(evals: np.ndarray, band: int) -> np.ndarray:
    n = evals.shape[-1]
    gaps = np.full(evals.shape[:-1], np.inf)
    if band > 0:
        gaps = np.minimum(gaps, evals[..., band] - evals[..., band - 1])
    if band < n - 1:
        gaps = np.minimum(gaps, evals[..., band + 1] - evals[..., band])
    return gaps


def _check_gaps(gaps: np.ndarray, scale: np.ndarray, tol: float, labels=None) -> None:
    for i in np.argsort(gaps, kind="stable")[:1]:
        label = int(i) if labels is None else labels[i]
        if gaps[i] <= DEGENERACY_TOL * max(1.0, float(scale[i])):
            raise DegenerateBand(label, float(gaps[i]), tol)
        if gaps[i] <= tol:
            raise GapClosure(label, float(gaps[i]), tol)


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each row so its largest-modulus component is real positive."""
    idx = np.argmax(np.abs(vectors), axis=-1)
    lead = np.take_along_axis(vectors, idx[..., None], axis=-1)
    return vectors * (np.conj(lead) / np.abs(lead))


def eigenbundle(h: HamiltonianFamily) -> EigenFrame:
    """Selected-band unit eigenvector and eigenvalue at every vertex."""
    evals, evecs = np.linalg.eigh(h.matrices)
    gaps = _band_gap(evals, h.band)
    _check_gaps(gaps, np.abs(evals).max(axis=1), h.gap_tol)
    vecs = fix_phase(evecs[:, :, h.band])
    return EigenFrame(h.base, vecs, evals[:, h.band].copy(), gaps)


def link_phases(frame: EigenFrame, overlap_tol: float = OVERLAP_TOL) -> LineBundle:
    """U(v -> w) = <phi_v|phi_w> / |<phi_v|phi_w>| on every edge."""
    edges = frame.base.simplices[1]
    ov = np.einsum("ei,ei->e", np.conj(frame.vectors[edges[:, 0]]), frame.vectors[edges[:, 1]])
    mags = np.abs(ov)
    bad = np.nonzero(mags <= overlap_tol)[0]
    if bad.size:
        e = bad[0]
        raise MeshTooCoarse(tuple(edges[e].tolist()), float(mags[e]))
    return LineBundle(Cochain(frame.base, 1, "phase", ov / mags))


def energy_bundle(h: HamiltonianFamily) -> LineBundle:
    return link_phases(eigenbundle(h))


def berry_phase(h: HamiltonianFamily, loop: Sequence[int]) -> float:
    """Principal argument of the link holonomy of the selected band around ``loop``."""
    return principal_angle(loop_holonomy(energy_bundle(h), loop))


def spin_half(base: SimplicialComplex, field, band: int = 0, gap_tol: float | None = None) -> HamiltonianFamily:
    """H(v) = field(v) . (sigma_x, sigma_y, sigma_z); spectrum +-|field(v)|."""
    field = np.asarray(field, dtype=float)
    if field.shape != (base.n_vertices, 3):
        raise InvalidField("field must give one 3-vector per vertex")
    norms = np.linalg.norm(field, axis=1)
    if np.any(norms == 0):
        # both levels coincide where the field vanishes
        raise DegenerateBand(int(np.argmin(norms)), 0.0, gap_tol or 0.0)
    H = np.einsum("va,aij->vij", field, PAULI)
    return HamiltonianFamily(base, H, band=band, gap_tol=gap_tol)


def radial_spin_half(base: SimplicialComplex, scale: float = 1.0, band: int = 0) -> HamiltonianFamily:
    """Spin-1/2 family whose field is the embedded vertex position."""
    return spin_half(base, scale * base.coords, band=band)


@dataclass(frozen=True)
class AdiabaticRecord:
    total_phase: float
    dynamical_phase: float
    geometric_residue: float
    norm_drift: float
    steps: int


def adiabatic_evolve(
    h: HamiltonianFamily,
    loop: Sequence[int],
    total_time: float,
    steps_per_edge: int | None = None,
) -> AdiabaticRecord:
    """Integrate i dPsi/dt = H Psi around ``loop`` in time ``total_time``.

    H is interpolated linearly along each edge, every edge taking the same
    time.  Each step applies the exact propagator of the midpoint
    Hamiltonian, which is unitary to rounding.  The start state is the
    selected eigenvector at ``loop[0]``.

    The geometric residue, total phase minus dynamical phase, is the phase
    actually acquired by the state.  Link phases are ``<phi_v|phi_w>``, so
    the residue converges to the conjugate of the link holonomy, i.e. to
    ``-berry_phase`` (mod 2pi); the two agree only when the phase is 0 or pi.
    """
    loop = list(loop)
    if len(loop) < 2 or loop[0] != loop[-1]:
        raise InvalidLoop("loop must be closed")
    for v, w in zip(loop[:-1], loop[1:]):
        if (v, w) not in h.base:
            raise InvalidLoop(f"({v}, {w}) is not an edge")
    if total_time <= 0:
        raise ValueError("total time must be positive")
    n_edges = len(loop) - 1
    dt_target = 0.05
    if steps_per_edge is None:
        steps_per_edge = max(100, int(np.ceil(total_time / n_edges / dt_target)))
    if steps_per_edge < 100:
        raise ValueError("need at least 100 steps per loop edge")
    dt = total_time / (n_edges * steps_per_edge)

    frame = eigenbundle(h)
    psi0 = frame.vectors[loop[0]].copy()
    s = (np.arange(steps_per_edge) + 0.5) / steps_per_edge
    psi = psi0.copy()
    dynamical = 0.0
    drift = 0.0
    for v, w in zip(loop[:-1], loop[1:]):
        Hm = (1 - s)[:, None, None] * h.matrices[v] + s[:, None, None] * h.matrices[w]
        evals, evecs = np.linalg.eigh(Hm)
        gaps = _band_gap(evals, h.band)
        _check_gaps(gaps, np.abs(evals).max(axis=1), h.gap_tol, labels=[v] * len(gaps))
        props = np.einsum("sij,sj,skj->sik", evecs, np.exp(-1j * evals * dt), np.conj(evecs))
        for U in props:
            psi = U @ psi
        dynamical -= float(np.sum(evals[:, h.band])) * dt
        drift = max(drift, abs(float(np.linalg.norm(psi)) - 1.0))
    if drift > NORM_DRIFT_TOL:
        raise IntegratorFailure(f"norm drift {drift:.2e}")
    total = principal_angle(np.vdot(psi0, psi))
    return AdiabaticRecord(total, dynamical, wrap_angle(total - dynamical), drift, n_edges * steps_per_edge)
