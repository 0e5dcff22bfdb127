"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GerbeLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidSpec(GerbeLabError, ValueError):
    """Bad mesh generator name or resolution."""


class InvalidComplex(GerbeLabError, ValueError):
    pass


class InvalidMap(GerbeLabError, ValueError):
    """Vertex assignment does not send simplices to simplices."""


class InvalidLoop(GerbeLabError, ValueError):
    pass


class InvalidSurface(GerbeLabError, ValueError):
    pass


class BaseMismatch(GerbeLabError, ValueError):
    pass


class ObstructionError(GerbeLabError):
    """A coboundary equation has no solution.

    ``report`` is an :class:`gerbelab.cochain.Obstruction` carrying the
    residual cocycle; it witnesses a nontrivial class rather than a bug.
    """

    def __init__(self, report, message: str | None = None):
        self.report = report
        super().__init__(message or f"nonvanishing obstruction (flux={report.flux})")


class NontrivialOnSubcomplex(ObstructionError):
    pass


class QuantizationFailure(GerbeLabError, ArithmeticError):
    """An integer invariant could not be certified (refine the mesh)."""


class GapClosure(GerbeLabError):
    def __init__(self, vertex: int, gap: float, tol: float):
        self.vertex = vertex
        self.gap = gap
        self.tol = tol
        super().__init__(f"spectral gap {gap:.3e} <= tolerance {tol:.3e} at vertex {vertex}")


class DegenerateBand(GapClosure):
    pass


class InvalidField(GerbeLabError, ValueError):
    pass


class MeshTooCoarse(GerbeLabError):
    def __init__(self, edge: tuple[int, int], overlap: float):
        self.edge = edge
        self.overlap = overlap
        super().__init__(f"eigenvector overlap {overlap:.3e} too small on edge {edge}")


class IntegratorFailure(GerbeLabError, ArithmeticError):
    pass


class NotProjectiveCocycle(GerbeLabError, ValueError):
    def __init__(self, triangle: tuple[int, ...], deviation: float):
        self.triangle = triangle
        self.deviation = deviation
        super().__init__(f"triple product on triangle {triangle} is not scalar (deviation {deviation:.3e})")
