"""Exception types shared across the package."""


class SpecmatchError(Exception):
    """Base class for all package errors."""


class MeshParseError(SpecmatchError):
    """Raised when a mesh file cannot be parsed.

    Carries the 1-based line number at which parsing failed.
    """

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class DegenerateFaceError(SpecmatchError):
    """A face repeats a vertex index."""

    def __init__(self, face_index, face):
        self.face_index = face_index
        self.face = tuple(int(v) for v in face)
        super().__init__(f"face {face_index} is degenerate: {self.face}")


class DisconnectedGraphError(SpecmatchError):
    """The graph has more than one connected component."""

    def __init__(self, n_components):
        self.n_components = n_components
        super().__init__(
            f"graph is disconnected ({n_components} components); "
            "spectral analysis assumes a connected graph"
        )


class ZeroDegreeError(SpecmatchError):
    """A vertex has zero degree, so degree-normalized operators are undefined."""

    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} has zero degree")


class NonConvergenceError(SpecmatchError):
    """Iterative eigensolver failed to reach the requested residual tolerance."""

    def __init__(self, residuals, tol):
        self.residuals = residuals
        self.tol = tol
        super().__init__(
            f"eigensolver did not converge: worst residual {max(residuals):.3e} "
            f"exceeds tolerance {tol:.3e}"
        )


class DegenerateSpectrumError(SpecmatchError):
    """Adjacent eigenvalues are too close for a method that needs distinct ones."""


class PipelineError(SpecmatchError):
    """Wraps a module error with the pipeline stage at which it occurred."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.__cause__ = cause
        super().__init__(f"stage '{stage}': {cause}")
