"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when caller-supplied data has the wrong shape, size or value."""


class SimulationDiverged(RuntimeError):
    """A particle-flow step produced non-finite coordinates."""

    def __init__(self, step: int, indices):
        self.step = step
        self.indices = list(indices)
        super().__init__(
            f"non-finite coordinates at step {step} for sample indices {self.indices}"
        )


class TrainingDiverged(RuntimeError):
    """A training step produced a non-finite loss or non-finite parameters.

    ``last_state`` holds the most recent known-good training state so callers
    can persist a checkpoint before aborting.
    """

    def __init__(self, step: int, reason: str, last_state=None):
        self.step = step
        self.reason = reason
        self.last_state = last_state
        super().__init__(f"training diverged at step {step}: {reason}")
