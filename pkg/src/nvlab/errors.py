"""Exception types shared across the package."""


class NVLabError(Exception):
    """Base class for all nvlab errors."""


class ConfigurationError(NVLabError):
    """Invalid grid, scheme, or run parameters."""


class DivergenceError(NVLabError):
    """The time stepper blew up. Carries the offending step index."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class ComplexRootError(NVLabError):
    """The far-field cubic has complex roots (discriminant condition violated)."""


class ResonanceError(NVLabError):
    """Asymptotic g-formulas degenerate: some p_i^2 is too close to k^2."""


class TraceLostError(NVLabError):
    """Curve tracer could not re-acquire the zero set. Carries the last good point."""

    def __init__(self, message: str, last_point=None):
        super().__init__(message)
        self.last_point = last_point


class DegenerateShapeError(NVLabError):
    """Matching matrix has two near-zero singular values; null direction ambiguous."""


class OffCurveError(NVLabError):
    """Requested (k, gamma) is not on the zero curve of the mismatch determinant."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class DegenerateDirectionError(NVLabError):
    """Planar reduction at an angle where kappa = cos(3 alpha) vanishes."""
