"""Exception types raised across the package."""


class MapnetError(Exception):
    """Base class for all package errors."""


class SizeCapError(MapnetError):
    """An operator would exceed the configured materialization cap."""


class NotPSDError(MapnetError, ValueError):
    pass


class NotHermitianError(MapnetError, ValueError):
    pass


class InvalidStateError(MapnetError, ValueError):
    """A matrix failed the density-matrix invariants.

    ``prop`` names the violated property (``trace``, ``hermitian`` or ``psd``)
    and ``residue`` carries the offending numeric value.
    """

    def __init__(self, prop: str, residue: float, message: str = ""):
        self.prop = prop
        self.residue = residue
        super().__init__(message or f"state fails {prop} check (residue {residue:.3e})")


class DegenerateObservableError(MapnetError, ValueError):
    pass


class InconsistentPovmError(MapnetError, ValueError):
    pass


class InvalidVisibilityError(MapnetError, ValueError):
    pass


class ReconstructionError(MapnetError):
    """Polynomial roots were not real within tolerance."""

    def __init__(self, message: str, roots=None):
        self.roots = roots
        super().__init__(message)


class InvalidGammaError(MapnetError, ValueError):
    pass


class CriterionMisuseError(MapnetError, ValueError):
    pass
