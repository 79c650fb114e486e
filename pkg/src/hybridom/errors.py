"""Exception hierarchy shared across the package.

The CLI maps these to exit codes: ConfigError -> 2, NumericalError
(and subclasses) -> 3, OSError -> 4.
"""


class ConfigError(ValueError):
    """Bad or inconsistent configuration input."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or hit a degenerate case."""


class DegenerateInputError(NumericalError):
    """Denominator or normalization collapsed below its resolvable scale."""


class InternalConsistencyError(NumericalError):
    """Cross-checked quantities disagree beyond tolerance (solver bug guard)."""


class PoleProximityError(NumericalError):
    """Response function evaluated too close to an undamped pole."""


class DivergenceError(NumericalError):
    """Time integration produced a non-finite state.

    Attributes
    ----------
    last_state : MeanFieldState
        Last finite state before the blow-up.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
