"""Exception types raised by the spinchannel library."""


class SpinChainError(Exception):
    """Base class for all spinchannel errors."""


class SectorError(SpinChainError, ValueError):
    """Invalid magnetization sector (parity violation or out of range)."""


class DimensionError(SpinChainError, ValueError):
    """Operator/vector/sector dimension mismatch."""


class ConfigError(SpinChainError, ValueError):
    """Chain specification incompatible with the requested operation."""


class ConvergenceError(SpinChainError):
    """Iterative eigensolver failed to converge within the step budget."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class OrderingError(SpinChainError):
    """Spectrum ordering is not the expected singlet ground state below a
    threefold-degenerate triplet (e.g. degenerate ground state, or probe
    coupling too strong for the lowest excitation to be the end-spin triplet)."""


class NoThresholdError(SpinChainError, ValueError):
    """The two-probe state is separable already at zero temperature, so no
    threshold temperature exists."""


class UnsupportedRegimeError(SpinChainError, ValueError):
    """Closed-form result requested outside its regime of validity
    (e.g. the optimal-time formula away from the commensurate point)."""


class FlatCurveError(SpinChainError):
    """No interior maximum found when scanning a fidelity curve."""


class PropagationError(SpinChainError):
    """Krylov time stepping could not meet its per-step error budget."""


class InsufficientDataError(SpinChainError, ValueError):
    """Too few data points for a meaningful fit."""
