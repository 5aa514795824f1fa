"""Exception hierarchy shared by all ndof modules."""


class NdofError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(NdofError, ValueError):
    pass


class UnsupportedGeometry(NdofError, ValueError):
    pass


class UnsupportedConfiguration(NdofError, ValueError):
    pass


class SingularKernel(NdofError, ValueError):
    """A Green's function was requested at zero (or negative) distance."""


class RegionsOverlap(NdofError, ValueError):
    """Two regions come closer than the configured minimum distance."""


class NumericalFailure(NdofError, RuntimeError):
    pass


class DegenerateSpectrum(NdofError, ValueError):
    """Spectrum has no positive mass (all eigenvalues vanish)."""


class InsufficientSpectrum(NdofError, ValueError):
    pass


class ConfigError(NdofError, ValueError):
    """Scenario configuration could not be parsed or validated.

    ``field`` names the offending key path (``"receiver.radius"``) and
    ``line`` the 1-based line in the source file when it is known.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
