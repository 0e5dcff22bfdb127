"""Oriented simplicial complexes, integer chains and simplicial maps.

A complex is built from its top-dimensional cells; every face is inferred.
Simplices are stored once per degree as strictly increasing vertex tuples,
so the vertex-star cover of a triangulation has the complex itself as its
nerve and Cech data on overlaps is indexed directly by simplices.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidComplex, InvalidMap


def permutation_parity(rows: np.ndarray) -> np.ndarray:
    """Sign (+1/-1) of the permutation sorting each row (rows of distinct ints)."""
    rows = np.asarray(rows)
    if rows.ndim == 1:
        rows = rows[None, :]
    inversions = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(rows.shape[1]):
        for j in range(i + 1, rows.shape[1]):
            inversions += rows[:, i] > rows[:, j]
    return np.where(inversions % 2 == 0, 1, -1)


class SimplicialComplex:
    """Pure oriented simplicial complex of dimension ``dim`` (0..3).

    ``cells`` are the top simplices; the vertex order of each cell fixes its
    orientation.  ``n_vertices`` may exceed the vertices actually used, which
    lets subcomplexes share vertex labels with their parent.
    """

    def __init__(
        self,
        cells: Iterable[Sequence[int]],
        n_vertices: int | None = None,
        coords: np.ndarray | None = None,
        name: str | None = None,
        params: tuple = (),
    ):
        cells = np.array([tuple(c) for c in cells], dtype=np.int64)
        if cells.ndim != 2 or cells.shape[0] == 0:
            raise InvalidComplex("need a nonempty list of equal-length cells")
        if cells.shape[1] > 4:
            raise InvalidComplex("dimension above 3 is not supported")
        if cells.min() < 0:
            raise InvalidComplex("vertex ids must be nonnegative")
        dim = cells.shape[1] - 1
        top = np.sort(cells, axis=1)
        if dim > 0 and np.any(top[:, 1:] == top[:, :-1]):
            raise InvalidComplex("cell with repeated vertex")
        order = np.lexsort(top.T[::-1])
        top, signs = top[order], permutation_parity(cells[order])
        if np.any(np.all(top[1:] == top[:-1], axis=1)):
            raise InvalidComplex("cell listed twice")

        self.dim = dim
        self.n_vertices = int(n_vertices if n_vertices is not None else cells.max() + 1)
        if self.n_vertices <= cells.max():
            raise InvalidComplex("n_vertices smaller than the largest vertex id")
        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        self.name = name
        self.params = tuple(params)

        simplices: list[np.ndarray] = []
        for k in range(dim):
            faces = {f for row in top for f in combinations(row.tolist(), k + 1)}
            if k == 0:
                faces = {(v,) for v in range(self.n_vertices)}
            simplices.append(np.array(sorted(faces), dtype=np.int64).reshape(-1, k + 1))
        if dim == 0:
            used = set(top[:, 0].tolist())
            simplices.append(np.array(sorted((v,) for v in range(self.n_vertices)), dtype=np.int64))
            signs = np.ones(self.n_vertices, dtype=np.int64)
            signs[[v for v in range(self.n_vertices) if v not in used]] = 0
        else:
            simplices.append(top)
        self.simplices: tuple[np.ndarray, ...] = tuple(simplices)
        for arr in self.simplices:
            arr.setflags(write=False)
        self._index = [
            {tuple(row): i for i, row in enumerate(arr.tolist())} for arr in self.simplices
        ]
        # faces[k][s, i] = id of the (k-1)-face of simplex s obtained by dropping vertex i
        self.faces: list[np.ndarray | None] = [None]
        for k in range(1, dim + 1):
            arr = self.simplices[k]
            idx = self._index[k - 1]
            f = np.empty(arr.shape, dtype=np.int64)
            for i in range(k + 1):
                sub = np.delete(arr, i, axis=1)
                f[:, i] = [idx[tuple(r)] for r in sub.tolist()]
            f.setflags(write=False)
            self.faces.append(f)
        self.orientation = np.asarray(signs, dtype=np.int64)
        self.orientation.setflags(write=False)

    # ------------------------------------------------------------------ lookup
    def count(self, k: int) -> int:
        return self.simplices[k].shape[0] if 0 <= k <= self.dim else 0

    def index(self, simplex: Sequence[int]) -> tuple[int, int]:
        """Return ``(id, sign)`` of an oriented simplex given in any vertex order."""
        key = tuple(sorted(simplex))
        k = len(key) - 1
        if k > self.dim or key not in self._index[k]:
            raise KeyError(f"{tuple(simplex)} is not a simplex of the complex")
        if len(set(key)) != len(key):
            raise KeyError(f"{tuple(simplex)} has repeated vertices")
        return self._index[k][key], int(permutation_parity(np.array(simplex))[0])

    def __contains__(self, simplex: Sequence[int]) -> bool:
        key = tuple(sorted(simplex))
        k = len(key) - 1
        return 0 <= k <= self.dim and key in self._index[k]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dim + 1))

    def coboundary_matrix(self, k: int) -> np.ndarray:
        """Dense integer matrix of the coboundary from degree ``k`` to ``k + 1``."""
        faces = self.faces[k + 1]
        mat = np.zeros((self.count(k + 1), self.count(k)), dtype=np.int64)
        rows = np.arange(faces.shape[0])
        for i in range(k + 2):
            np.add.at(mat, (rows, faces[:, i]), (-1) ** i)
        return mat

    # ---------------------------------------------------------- orientation audit
    def _facet_incidence(self) -> tuple[np.ndarray, np.ndarray]:
        faces = self.faces[self.dim]
        counts = np.zeros(self.count(self.dim - 1), dtype=np.int64)
        induced = np.zeros_like(counts)
        for i in range(self.dim + 1):
            np.add.at(counts, faces[:, i], 1)
            np.add.at(induced, faces[:, i], self.orientation * (-1) ** i)
        return counts, induced

    @property
    def is_oriented(self) -> bool:
        """Every facet lies in at most two cells, with opposite induced orientations."""
        if self.dim == 0:
            return True
        counts, induced = self._facet_incidence()
        return bool(np.all(counts <= 2) and np.all(induced[counts == 2] == 0))

    @property
    def is_closed(self) -> bool:
        """Closed oriented pseudomanifold test (the two-cofaces audit)."""
        if self.dim == 0:
            return False
        counts, induced = self._facet_incidence()
        return bool(np.all(counts == 2) and np.all(induced == 0))

    def fundamental_chain(self) -> "Chain":
        return Chain(self, self.dim, self.orientation.copy())

    def subcomplex(self, cells: Iterable[Sequence[int]], name: str | None = None) -> "SimplicialComplex":
        """Complex spanned by ``cells`` (simplices of this complex), same vertex labels."""
        cells = [tuple(c) for c in cells]
        for c in cells:
            if c not in self:
                raise InvalidComplex(f"{c} is not a simplex of the parent complex")
        return SimplicialComplex(cells, n_vertices=self.n_vertices, coords=self.coords, name=name)

    def star(self, simplex: Sequence[int]) -> "SimplicialComplex":
        """Closed star: all top cells containing ``simplex``, with their orientation."""
        s = set(simplex)
        top = self.simplices[self.dim]
        cells = []
        for row, sign in zip(top.tolist(), self.orientation.tolist()):
            if s.issubset(row):
                if sign < 0 and len(row) > 1:
                    row = [row[1], row[0], *row[2:]]
                cells.append(row)
        return self.subcomplex(cells, name="star")

    def __repr__(self) -> str:
        counts = ", ".join(str(self.count(k)) for k in range(self.dim + 1))
        label = self.name or "complex"
        return f"<SimplicialComplex {label}{self.params} dim={self.dim} counts=({counts})>"


class Chain:
    """Integer combination of oriented k-simplices (coefficients indexed by simplex id)."""

    def __init__(self, complex: SimplicialComplex, degree: int, coeffs: np.ndarray):
        self.complex = complex
        self.degree = degree
        self.coeffs = np.asarray(coeffs, dtype=np.int64)
        if self.coeffs.shape != (complex.count(degree),):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_simplices(cls, complex: SimplicialComplex, items: Iterable) -> "Chain":
        """Build from oriented simplices or ``(simplex, coefficient)`` pairs."""
        coeffs = None
        degree = None
        for item in items:
            if len(item) == 2 and not np.isscalar(item[0]):
                simplex, c = item
            else:
                simplex, c = item, 1
            sid, sign = complex.index(simplex)
            if degree is None:
                degree = len(simplex) - 1
                coeffs = np.zeros(complex.count(degree), dtype=np.int64)
            elif len(simplex) - 1 != degree:
                raise ValueError("mixed degrees in chain")
            coeffs[sid] += sign * int(c)
        if degree is None:
            raise ValueError("empty chain needs an explicit degree; use Chain.zero")
        return cls(complex, degree, coeffs)

    @classmethod
    def zero(cls, complex: SimplicialComplex, degree: int) -> "Chain":
        return cls(complex, degree, np.zeros(complex.count(degree), dtype=np.int64))

    @classmethod
    def path(cls, complex: SimplicialComplex, vertices: Sequence[int]) -> "Chain":
        """1-chain of the edge path through ``vertices``."""
        chain = cls.zero(complex, 1)
        for a, b in zip(vertices[:-1], vertices[1:]):
            sid, sign = complex.index((a, b))
            chain.coeffs[sid] += sign
        return chain

    def boundary(self) -> "Chain":
        if self.degree == 0:
            raise ValueError("0-chains have no boundary")
        out = np.zeros(self.complex.count(self.degree - 1), dtype=np.int64)
        faces = self.complex.faces[self.degree]
        for i in range(self.degree + 1):
            np.add.at(out, faces[:, i], self.coeffs * (-1) ** i)
        return Chain(self.complex, self.degree - 1, out)

    @property
    def is_cycle(self) -> bool:
        return self.degree == 0 or not np.any(self.boundary().coeffs)

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.degree, -self.coeffs)

    def __add__(self, other: "Chain") -> "Chain":
        if other.complex is not self.complex or other.degree != self.degree:
            raise ValueError("chains live on different complexes or degrees")
        return Chain(self.complex, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Chain)
            and other.complex is self.complex
            and other.degree == self.degree
            and np.array_equal(other.coeffs, self.coeffs)
        )

    def __repr__(self) -> str:
        return f"<Chain degree={self.degree} support={int(np.count_nonzero(self.coeffs))}>"


class SimplicialMap:
    """Vertex assignment between complexes that carries simplices to simplices.

    Images may be degenerate (repeated vertices); those collapses are kept in
    ``degenerate[k]`` as boolean masks over the source k-simplices.
    """

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Sequence[int]):
        vmap = np.asarray(vertex_map, dtype=np.int64)
        if vmap.shape != (source.n_vertices,):
            raise InvalidMap("vertex map must assign every source vertex")
        if vmap.min() < 0 or vmap.max() >= target.n_vertices:
            raise InvalidMap("vertex map leaves the target vertex set")
        self.source = source
        self.target = target
        self.vertex_map = vmap
        self.vertex_map.setflags(write=False)
        self.image_ids: list[np.ndarray] = []
        self.image_signs: list[np.ndarray] = []
        self.degenerate: list[np.ndarray] = []
        for k in range(source.dim + 1):
            img = vmap[source.simplices[k]]
            srt = np.sort(img, axis=1)
            degen = np.any(srt[:, 1:] == srt[:, :-1], axis=1) if k > 0 else np.zeros(len(img), bool)
            ids = np.full(len(img), -1, dtype=np.int64)
            signs = np.zeros(len(img), dtype=np.int64)
            lookup = target._index[k] if k <= target.dim else {}
            for s in np.nonzero(~degen)[0]:
                key = tuple(srt[s].tolist())
                if key not in lookup:
                    raise InvalidMap(f"image of {tuple(source.simplices[k][s])} is not a simplex of the target")
                ids[s] = lookup[key]
            if k > 0 and np.any(~degen):
                signs[~degen] = permutation_parity(img[~degen])
            elif k == 0:
                signs[:] = 1
            self.image_ids.append(ids)
            self.image_signs.append(signs)
            self.degenerate.append(degen)
        # degenerate images must still span a simplex of the target
        top = source.dim
        for s in np.nonzero(self.degenerate[top])[0]:
            key = tuple(sorted(set(vmap[source.simplices[top][s]].tolist())))
            if key not in target:
                raise InvalidMap(f"collapsed image {key} is not a simplex of the target")

    @classmethod
    def identity(cls, complex: SimplicialComplex) -> "SimplicialMap":
        return cls(complex, complex, np.arange(complex.n_vertices))

    @classmethod
    def inclusion(cls, sub: SimplicialComplex, parent: SimplicialComplex) -> "SimplicialMap":
        return cls(sub, parent, np.arange(sub.n_vertices))

    def push(self, chain: Chain) -> Chain:
        """Pushforward of an integer chain (degenerate images vanish)."""
        k = chain.degree
        out = np.zeros(self.target.count(k), dtype=np.int64)
        live = ~self.degenerate[k]
        np.add.at(out, self.image_ids[k][live], chain.coeffs[live] * self.image_signs[k][live])
        return Chain(self.target, k, out)
