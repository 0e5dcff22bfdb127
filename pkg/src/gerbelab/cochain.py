"""Real and U(1)-valued simplicial cochains.

Values are stored per simplex id in the canonical (increasing-vertex)
orientation.  Reversing orientation negates a real value and conjugates a
phase value.  Phases are unit complex numbers; angles are only extracted
through the principal branch (-pi, pi].
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .complex import Chain, SimplicialComplex, SimplicialMap
from .errors import ObstructionError

Kind = Literal["real", "phase"]

PHASE_TOL = 1e-12

complex_ = complex  # the builtin; ``complex`` is used as an argument name below


def principal_angle(z):
    """Argument in (-pi, pi]. ``np.angle`` gives -pi for a -0.0 imaginary part."""
    ang = np.angle(z)
    ang = np.where(ang <= -np.pi, ang + 2 * np.pi, ang)
    return float(ang) if ang.ndim == 0 else ang


def wrap_angle(x: np.ndarray | float) -> np.ndarray | float:
    """Reduce real angles into (-pi, pi]."""
    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(y) if np.ndim(y) == 0 else y


class Cochain:
    """Degree-k cochain on a fixed complex. Immutable."""

    __slots__ = ("complex", "degree", "kind", "values")

    def __init__(self, complex: SimplicialComplex, degree: int, kind: Kind, values):
        if kind not in ("real", "phase"):
            raise ValueError(f"unknown cochain kind {kind!r}")
        if not 0 <= degree <= complex.dim:
            raise ValueError(f"degree {degree} outside 0..{complex.dim}")
        dtype = float if kind == "real" else complex_
        vals = np.array(values, dtype=dtype).reshape(-1)
        if vals.shape != (complex.count(degree),):
            raise ValueError(f"expected {complex.count(degree)} values, got {vals.shape[0]}")
        if kind == "phase" and vals.size and np.max(np.abs(np.abs(vals) - 1.0)) > PHASE_TOL:
            raise ValueError("phase values must have unit modulus")
        vals.setflags(write=False)
        object.__setattr__(self, "complex", complex)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("Cochain is immutable")

    # ------------------------------------------------------------ constructors
    @classmethod
    def neutral(cls, complex: SimplicialComplex, degree: int, kind: Kind = "phase") -> "Cochain":
        n = complex.count(degree)
        return cls(complex, degree, kind, np.ones(n) if kind == "phase" else np.zeros(n))

    @classmethod
    def from_angles(cls, complex: SimplicialComplex, degree: int, angles) -> "Cochain":
        return cls(complex, degree, "phase", np.exp(1j * np.asarray(angles, dtype=float)))

    @classmethod
    def random(cls, complex: SimplicialComplex, degree: int, kind: Kind, rng: np.random.Generator) -> "Cochain":
        n = complex.count(degree)
        if kind == "real":
            return cls(complex, degree, "real", rng.normal(size=n))
        return cls.from_angles(complex, degree, rng.uniform(-np.pi, np.pi, size=n))

    # ----------------------------------------------------------------- access
    def value(self, simplex: Sequence[int]):
        """Value on an oriented simplex given in any vertex order."""
        sid, sign = self.complex.index(simplex)
        v = self.values[sid]
        if sign > 0:
            return v
        return -v if self.kind == "real" else np.conj(v)

    def angles(self) -> np.ndarray:
        """Principal arguments (phase kind) or the raw values (real kind)."""
        return principal_angle(self.values) if self.kind == "phase" else self.values.copy()

    # ------------------------------------------------------------- arithmetic
    def _check(self, other: "Cochain") -> None:
        if other.complex is not self.complex or other.degree != self.degree or other.kind != self.kind:
            raise ValueError("incompatible cochains")

    def __mul__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        if self.kind != "phase":
            raise TypeError("use + for real cochains")
        return Cochain(self.complex, self.degree, "phase", self.values * other.values)

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        if self.kind != "real":
            raise TypeError("use * for phase cochains")
        return Cochain(self.complex, self.degree, "real", self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __neg__(self) -> "Cochain":
        if self.kind != "real":
            raise TypeError("use .inverse() for phase cochains")
        return Cochain(self.complex, self.degree, "real", -self.values)

    def inverse(self) -> "Cochain":
        """Group inverse: negation (real) or conjugation (phase)."""
        if self.kind == "real":
            return -self
        return Cochain(self.complex, self.degree, "phase", np.conj(self.values))

    def distance(self, other: "Cochain") -> float:
        """Max per-simplex deviation (absolute difference of values)."""
        self._check(other)
        if not self.values.size:
            return 0.0
        return float(np.max(np.abs(self.values - other.values)))

    def is_neutral(self, tol: float = PHASE_TOL) -> bool:
        target = 1.0 if self.kind == "phase" else 0.0
        return not self.values.size or float(np.max(np.abs(self.values - target))) <= tol

    def __repr__(self) -> str:
        return f"<Cochain degree={self.degree} kind={self.kind} n={self.values.size}>"


def coboundary(c: Cochain) -> Cochain:
    """Alternating face sum (real) or product with exponents +-1 (phase)."""
    K, k = c.complex, c.degree
    if k >= K.dim:
        raise ValueError(f"no {k + 1}-simplices in a {K.dim}-dimensional complex")
    faces = K.faces[k + 1]
    vals = c.values[faces]
    if c.kind == "real":
        signs = np.array([(-1) ** i for i in range(k + 2)], dtype=float)
        out = np.zeros(faces.shape[0])
        for i in range(k + 2):  # fixed accumulation order
            out += signs[i] * vals[:, i]
        return Cochain(K, k + 1, "real", out)
    out = np.ones(faces.shape[0], dtype=complex_)
    for i in range(k + 2):
        out *= vals[:, i] if i % 2 == 0 else np.conj(vals[:, i])
    out /= np.abs(out)
    return Cochain(K, k + 1, "phase", out)


def pullback(f: SimplicialMap, c: Cochain) -> Cochain:
    """Pull a cochain on ``f.target`` back to ``f.source``.

    Simplices with degenerate image get the neutral value.
    """
    if c.complex is not f.target:
        raise ValueError("cochain does not live on the map's target")
    k = c.degree
    if k > f.source.dim:
        raise ValueError("degree exceeds the source dimension")
    ids, signs, degen = f.image_ids[k], f.image_signs[k], f.degenerate[k]
    n = f.source.count(k)
    if c.kind == "real":
        out = np.zeros(n)
        out[~degen] = signs[~degen] * c.values[ids[~degen]]
    else:
        out = np.ones(n, dtype=complex_)
        v = c.values[ids[~degen]]
        out[~degen] = np.where(signs[~degen] > 0, v, np.conj(v))
    return Cochain(f.source, k, c.kind, out)


def restrict(c: Cochain, sub: SimplicialComplex) -> Cochain:
    """Restriction to a subcomplex sharing vertex labels."""
    return pullback(SimplicialMap.inclusion(sub, c.complex), c)


def integrate(c: Cochain, chain: Chain | Sequence) -> float | complex:
    """Pair a cochain with a chain: signed sum (real) or signed product (phase)."""
    if not isinstance(chain, Chain):
        items = list(chain)
        if not items:
            return 0.0 if c.kind == "real" else 1.0 + 0j
        chain = Chain.from_simplices(c.complex, items)
    if chain.complex is not c.complex or chain.degree != c.degree:
        raise ValueError("chain and cochain do not match")
    coeffs = chain.coeffs
    if c.kind == "real":
        total = 0.0
        for sid in np.nonzero(coeffs)[0]:
            total += coeffs[sid] * c.values[sid]
        return float(total)
    total = 1.0 + 0j
    for sid in np.nonzero(coeffs)[0]:
        v = c.values[sid] if coeffs[sid] > 0 else np.conj(c.values[sid])
        total *= v ** abs(int(coeffs[sid]))
    return complex_(total / abs(total))


# ---------------------------------------------------------------------------
# coboundary solver


@dataclass(frozen=True)
class Obstruction:
    """Witness that ``target`` is not a coboundary.

    ``residual`` is ``target`` divided by (or minus) the coboundary of the best
    candidate potential.  ``flux`` integrates the obstruction over the
    fundamental class when the complex is closed and oriented: the residual
    itself in top degree, its coboundary one degree below.  For a curvature
    field this is 2*pi times the Chern number, for a gerbe 2*pi times its
    Dixmier-Douady number.
    """

    target: Cochain
    potential: Cochain
    residual: Cochain
    max_residual: float
    flux: float | None


def _obstruction_flux(residual: Cochain) -> float | None:
    K = residual.complex
    if not K.is_closed:
        return None
    if residual.degree == K.dim:
        vals = residual.angles()
    elif residual.degree == K.dim - 1:
        vals = coboundary(residual).angles()
    else:
        return None
    total = 0.0
    for s, v in zip(K.orientation.tolist(), vals.tolist()):
        total += s * v
    return total


def spanning_forest(K: SimplicialComplex) -> list[tuple[int, int]]:
    """BFS spanning forest of the 1-skeleton as directed (parent, child) pairs.

    Roots are the lowest vertex id of each component, neighbours are visited
    in increasing id order, so the forest is a deterministic function of K.
    """
    adj: list[list[int]] = [[] for _ in range(K.n_vertices)]
    if K.dim >= 1:
        for a, b in K.simplices[1].tolist():
            adj[a].append(b)
            adj[b].append(a)
    for nbrs in adj:
        nbrs.sort()
    seen = np.zeros(K.n_vertices, dtype=bool)
    tree = []
    for root in range(K.n_vertices):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    tree.append((v, w))
                    queue.append(w)
    return tree


def _eliminate_mod_2pi(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``mat @ x = rhs (mod 2pi)`` over the reals-mod-2pi.

    Gauss-Jordan elimination restricted to unit pivots so every row operation
    is an integer combination, which is legitimate modulo 2pi.  Among the rows
    with a unit entry in the current column, the sparsest one is used; on a
    surface this peels leaf triangles of the dual graph first.  Free unknowns
    are set to zero.  Inconsistent rows are left for the caller's residual
    check.
    """
    A = mat.astype(np.int64, copy=True)
    b = np.asarray(rhs, dtype=float).copy()
    nrows, ncols = A.shape
    used = np.zeros(nrows, dtype=bool)
    pivots: list[tuple[int, int]] = []
    for col in range(ncols):
        cand = np.nonzero((np.abs(A[:, col]) == 1) & ~used)[0]
        if cand.size == 0:
            continue
        nnz = np.count_nonzero(A[cand], axis=1)
        r = int(cand[np.argmin(nnz)])
        if A[r, col] < 0:
            A[r] = -A[r]
            b[r] = -b[r]
        others = np.nonzero(A[:, col])[0]
        others = others[others != r]
        if others.size:
            m = A[others, col]
            A[others] -= np.outer(m, A[r])
            b[others] = wrap_angle(b[others] - m * b[r])
        used[r] = True
        pivots.append((r, col))
    x = np.zeros(ncols)
    for r, col in pivots:
        x[col] = b[r]
    return wrap_angle(x)


def _solve_phase(target: Cochain) -> Cochain:
    K, k = target.complex, target.degree
    if k == 1:
        g = np.ones(K.n_vertices, dtype=complex_)
        for v, w in spanning_forest(K):
            g[w] = target.value((v, w)) * g[v]
        return Cochain(K, 0, "phase", g)
    mat = K.coboundary_matrix(k - 1)
    free = np.ones(K.count(k - 1), dtype=bool)
    if k == 2:
        # tree gauge: forest edges carry the identity
        for v, w in spanning_forest(K):
            free[K.index((v, w))[0]] = False
    x = np.zeros(K.count(k - 1))
    x[free] = _eliminate_mod_2pi(mat[:, free], target.angles())
    return Cochain.from_angles(K, k - 1, x)


def _solve_real(target: Cochain) -> Cochain:
    K, k = target.complex, target.degree
    mat = K.coboundary_matrix(k - 1).astype(float)
    x, *_ = np.linalg.lstsq(mat, target.values, rcond=None)
    return Cochain(K, k - 1, "real", x)


def solve_coboundary(target: Cochain, tol: float = 1e-12) -> Cochain:
    """Find ``u`` with ``coboundary(u) == target``.

    Phase targets use a spanning-tree gauge followed by unit-pivot
    elimination; real targets use least squares.  Either way the result is
    checked simplex by simplex and :class:`ObstructionError` is raised with an
    :class:`Obstruction` report when the class does not vanish.
    """
    if target.degree < 1:
        raise ValueError("target must have degree >= 1")
    u = _solve_phase(target) if target.kind == "phase" else _solve_real(target)
    du = coboundary(u)
    residual = target * du.inverse() if target.kind == "phase" else target - du
    err = target.distance(du)
    if err > tol:
        report = Obstruction(target, u, residual, err, _obstruction_flux(residual))
        raise ObstructionError(report)
    return u
