"""Exception types raised by the library."""


class LoopFormsError(Exception):
    pass


class BranchCutError(LoopFormsError):
    """A matrix logarithm was requested too close to the eigenvalue -1."""


class BandLimitError(LoopFormsError):
    """Requested Fourier modes exceed the band limit N/4."""


class EndpointMismatch(LoopFormsError):
    """Paths do not share start and end points."""


class PlateauViolation(LoopFormsError):
    """A tangent field does not vanish on the sitting instants of its path."""


class GridError(LoopFormsError):
    """A shift is not grid-aligned and resampling is disabled."""


class StepUnderflow(LoopFormsError):
    """Finite-difference step below the supported floor."""


class ArityMismatch(LoopFormsError):
    """Configuration spaces of forms or maps do not match."""


class UnknownCheck(LoopFormsError):
    pass


class DegenerateInput(LoopFormsError):
    """A generated input violates the loop smoothness invariant."""
