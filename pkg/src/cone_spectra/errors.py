"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class ConeSpectraError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidInput(ConeSpectraError, ValueError):
    exit_code = 2


class GeometryError(ConeSpectraError):
    exit_code = 3


class NonRegularCurve(GeometryError):
    pass


class NonInjectiveCurve(GeometryError):
    pass


class FrameIdentityViolated(GeometryError):
    pass


class OrientationAmbiguous(GeometryError):
    pass


class WindowOverlap(InvalidInput):
    pass


class SpectralError(ConeSpectraError):
    exit_code = 4


class ConvergenceFailure(SpectralError):
    pass


class NearZeroEigenvalue(SpectralError):
    pass


class NoNegativeRoot(SpectralError):
    pass


class CountingError(ConeSpectraError):
    exit_code = 5


class StiffIntegration(CountingError):
    pass


class WallTooClose(CountingError):
    pass


class OracleDisagreement(CountingError):
    pass
