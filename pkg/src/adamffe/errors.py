"""Exception types shared across the package."""


class SingularityError(ValueError):
    """Normal matrix too ill-conditioned for a direct least-squares solve."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"normal matrix is ill-conditioned (condition estimate {condition:.3e})")


class NumericFault(ArithmeticError):
    """A non-finite value appeared during training."""

    def __init__(self, message: str, iteration: int | None = None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)


class DivergenceError(NumericFault):
    """Training cost or error magnitude blew past the divergence guard."""


class StageError(RuntimeError):
    """Wraps an error raised inside one stage of the experiment chain."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
