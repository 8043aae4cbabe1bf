"""Exception hierarchy shared by all fidsus modules.

Configuration-class errors (bad inputs the caller can fix) derive from
InvalidParams; numerical-class errors (the computation itself refused or
failed) derive from NumericalError.  The CLI maps the two classes to
distinct exit codes.
"""


class FidsusError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParams(FidsusError):
    """Model or operation parameters violate a documented precondition."""


class TooLarge(InvalidParams):
    """Requested system size exceeds the dense-diagonalization cap."""


class UnsupportedModel(InvalidParams):
    """Requested model/target is declared out of scope."""


class InvalidNu(InvalidParams):
    """Scaling relation evaluated with a vanishing correlation-length exponent."""


class ConfigError(InvalidParams):
    """CLI run configuration failed validation."""


class NumericalError(FidsusError):
    """A computation could not produce a trustworthy result."""


class NonHermitianInput(NumericalError):
    """Matrix handed to the spectral core is not Hermitian within tolerance."""


class NoConvergence(NumericalError):
    """Iterative procedure (eigensolver or extrapolation) failed to converge."""


class DegenerateGroundState(NumericalError):
    """Ground state is degenerate within tolerance; the fidelity
    susceptibility spectral sum is ill-defined.  Callers should restrict to a
    symmetry sector instead."""


class UnboundedIntegral(NumericalError):
    """Relevant excitation gap vanishes; the correlator time integral does
    not converge."""


class InfiniteGap(NumericalError):
    """Driving term couples to no excited state yet has nonzero variance;
    the inequality-chain bounds are inconsistent at the given tolerance."""


class PoleOnGrid(NumericalError):
    """A momentum-grid point sits exactly on a zero of the dispersion."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature did not reach the requested accuracy."""


class DegenerateFit(NumericalError):
    """Regression input collapses to a single abscissa after filtering."""


class AmbiguousScaling(NumericalError):
    """Neither the pure-power nor the log-corrected scaling model wins by
    the configured margin; classification is refused rather than guessed."""
