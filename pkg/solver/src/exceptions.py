class DomainError(ValueError):
    pass


class AdmissibilityError(DomainError):
    def __init__(self, message: str, threshold_theta: float | None = None, lambda1: float | None = None) -> None:
        super().__init__(message)
        self.threshold_theta = threshold_theta
        self.lambda1 = lambda1


class NumericalFailureError(RuntimeError):
    def __init__(self, message: str, residual: float | None = None, iterations: int | None = None) -> None:
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class UsageError(ValueError):
    pass


class AccuracyWarning(UserWarning):
    pass
