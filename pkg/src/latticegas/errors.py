"""Exception types shared across the package."""


class LatticeGasError(Exception):
    """Base class for all package errors."""


class ConfigError(LatticeGasError):
    """A configuration violates a documented precondition or invariant."""


class DegenerateLatticeError(ConfigError):
    """Polarization angle at pi/2 leaves the lattice with zero contrast."""


class UnsupportedPolarizationError(ConfigError):
    """Operation only defined for linear trap-beam polarization."""


class SteadyStateAmbiguousError(LatticeGasError):
    """Rate matrix is reducible: stationary distribution is not unique."""


class ZeroRelativeVelocityError(LatticeGasError):
    """Unitarity cross section diverges at zero relative velocity."""


class MajorantOverflowError(LatticeGasError):
    """Observed pair rate exceeded the majorant bound during a DSMC step."""


class FitConvergenceError(LatticeGasError):
    """Nonlinear fit failed to converge; carries residual diagnostics."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NumericalError(LatticeGasError):
    """Integration or sampling failure with diagnostics."""
