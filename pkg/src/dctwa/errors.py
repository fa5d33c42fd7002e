"""Exception types shared across the package.

Every error raised on a violated contract derives from :class:`Error`, so
callers can catch the package's failures with a single except clause while
tests pin down the specific subclass.
"""


class Error(Exception):
    """Base class for all errors raised by this package."""


class NormMismatch(Error):
    """A Cartesian spin vector does not lie on the radius-sqrt(3) sphere."""


class InvalidDensityMatrix(Error):
    """A matrix fails the Hermiticity/trace/positivity checks for a state."""


class NegativeWeight(Error):
    """A discrete quasi-probability distribution has negative entries and
    therefore cannot be sampled on the fixed phase-point set."""


class SingularRegion(Error):
    """A coordinate lies too close to a pole for the requested identity."""


class QuadratureFailure(Error):
    """Adaptive quadrature refinement did not converge below tolerance."""


class PoleError(Error):
    """The stereographic projection is undefined at the south pole."""


class DimensionTooLarge(Error):
    """The requested Hilbert-space dimension exceeds the dense-oracle cap."""


class DimensionMismatch(Error):
    """Operator and state dimensions are inconsistent."""


class AsymmetricCouplings(Error):
    """A coupling matrix is not symmetric with zero diagonal."""


class IntegratorDivergence(Error):
    """The master-equation integrator failed or produced non-finite values."""


class AllRatesZero(Error):
    """The closed-form steady state is undefined when every rate vanishes."""


class UnsupportedTerm(Error):
    """A Hamiltonian term is outside the set an engine can integrate."""


class UnsupportedChannel(Error):
    """A dissipation channel is outside the set an engine can integrate."""


class SingularCoordinate(Error):
    """An angular coordinate escaped the clamping band."""


class UnknownPreset(Error):
    """No model preset is registered under the requested name."""


class ConfigInvalid(Error):
    """A run configuration file is malformed; message carries diagnostics."""


class EngineChannelMismatch(Error):
    """A configured engine cannot integrate the model's channels."""


class GridMismatch(Error):
    """Two runs being compared do not share a time grid or observables."""
