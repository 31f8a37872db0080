"""Exception types raised across the library."""


class JumpSwitchError(Exception):
    """Base class for all library errors."""


class NegativeOffDiagonal(JumpSwitchError):
    """A generator matrix has a negative off-diagonal rate."""


class RowSumViolation(JumpSwitchError):
    """A generator matrix row does not sum to zero within tolerance."""


class Reducible(JumpSwitchError):
    """The regime chain is not irreducible; no unique stationary law exists."""


class InvalidStep(JumpSwitchError):
    """A nominal step size is outside (0, horizon]."""


class UnsortedJumps(JumpSwitchError):
    """Jump times are not strictly increasing inside (0, horizon]."""


class NonFinite(JumpSwitchError):
    """A simulated state became NaN or infinite (coefficient blow-up).

    ``step_index`` is the grid index at which the blow-up was detected,
    when known.
    """

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class NotRuinCertain(JumpSwitchError):
    """The net-profit condition fails (rho >= 0): ruin is not certain and
    the closed-form expected ruin times do not apply.

    Carries the offending ``eta`` and ``rho``.
    """

    def __init__(self, eta: float, rho: float):
        super().__init__(
            f"expected ruin time is infinite: eta={eta!r} gives rho={rho!r} >= 0"
        )
        self.eta = eta
        self.rho = rho


class RootCountViolation(JumpSwitchError):
    """The characteristic cubic does not have exactly one negative real root."""


class DenominatorZero(JumpSwitchError):
    """A closed-form denominator vanished for the supplied inputs."""


class SingularSystem(JumpSwitchError):
    """The coefficient linear system is singular or too ill-conditioned."""


class Empty(JumpSwitchError):
    """An aggregation was requested over an empty sample."""


class ConfigInvalid(JumpSwitchError):
    """A model configuration file is malformed or inconsistent."""


class IoFailure(JumpSwitchError):
    """An output file could not be written."""


#: Errors that indicate bad user input rather than a numerical failure.
VALIDATION_ERRORS = (
    NegativeOffDiagonal,
    RowSumViolation,
    Reducible,
    InvalidStep,
    UnsortedJumps,
    NotRuinCertain,
    ConfigInvalid,
    Empty,
)

#: Errors that indicate a runtime or numerical failure.
RUNTIME_ERRORS = (
    NonFinite,
    RootCountViolation,
    DenominatorZero,
    SingularSystem,
    IoFailure,
)
