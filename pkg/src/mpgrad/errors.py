"""Exception hierarchy shared by all modules.

Everything derives from :class:`MpgradError` so callers (the CLI in
particular) can separate data/invariant errors from programming errors.
"""


class MpgradError(ValueError):
    pass


# complex
class MissingFace(MpgradError):
    def __init__(self, simplex, face):
        self.simplex = tuple(simplex)
        self.face = tuple(face)
        super().__init__(f"simplex {self.simplex} is missing its face {self.face}")


class DuplicateSimplex(MpgradError):
    pass


class EmptySimplex(MpgradError):
    pass


class NotNested(MpgradError):
    pass


# filtrations
class NotMonotone(MpgradError):
    pass


class MissingVertexValue(MpgradError):
    pass


class NonpositiveBandwidth(MpgradError):
    pass


class LengthMismatch(MpgradError):
    pass


class DimensionMismatch(MpgradError):
    pass


# stratification
class NotSurjective(MpgradError):
    pass


class ComplexMismatch(MpgradError):
    pass


class SizeMismatch(MpgradError):
    pass


class NonIncreasing(MpgradError):
    pass


# transport
class GroundSpaceMismatch(MpgradError):
    pass


class InfiniteCost(MpgradError):
    pass


class ProblemTooLarge(MpgradError):
    pass


# autodiff / optimizer
class IncompatibleLoss(MpgradError):
    pass


class NonFiniteGradient(MpgradError):
    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)


class ConfigError(MpgradError):
    pass


class DegenerateEdge(UserWarning):
    """A maximal Rips edge of zero length; its gradient is set to zero."""


class NonSummableSchedule(UserWarning):
    """A step schedule whose squares are not summable."""
