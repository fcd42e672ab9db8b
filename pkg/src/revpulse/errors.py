"""Exception types raised across the package.

Each error that maps onto a CLI exit code carries that mapping through its
base class, so the front end never needs a lookup table.
"""


class RevPulseError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class InfeasibleProtocol(RevPulseError):
    """The prescribed trajectory is unphysical somewhere on the window."""

    exit_code = 2


class InfeasibleAtOnset(InfeasibleProtocol):
    """The coherence would turn negative on the very first step (s(t0) < 0, u(t0) = 0)."""


class NegativeRadicand(InfeasibleProtocol):
    """Steady coherence squared is negative: no steady state for this target."""


class DegenerateNoiseless(RevPulseError):
    """Steady coherence is 0/0 because both environment rates vanish."""


class NumericalFailure(RevPulseError):
    exit_code = 3


class DivergentField(NumericalFailure):
    """Field amplitude blows up because the coherence reached zero with a finite numerator."""


class OutsideValidity(NumericalFailure):
    """Requested time lies outside the pulse's validity window."""


class PopulationNodeSingularity(NumericalFailure):
    """The direct envelope form was evaluated where 2 f(t) - 1 vanishes."""


class SingularSample(NumericalFailure):
    """Inverse-field sample taken where rho_gg = 1/2."""


class StepTooLarge(NumericalFailure):
    pass


class PositivityViolation(NumericalFailure):
    pass


class GridMismatch(NumericalFailure):
    pass


class NoFeasibleBaseline(InfeasibleProtocol):
    """The protocol is already infeasible at nbar = 0."""


class NonMonotoneBracket(NumericalFailure):
    """Feasibility in nbar was not monotone inside the bisection bracket."""
