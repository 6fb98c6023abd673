from typing import ClassVar, Optional, Sequence


class NisError(Exception):
    exit_code: ClassVar[int] = 1


class ConfigurationError(NisError):
    exit_code: ClassVar[int] = 2


class DimensionMismatchError(ConfigurationError, ValueError):
    def __init__(self, what: str, expected: int, got: Sequence[int]) -> None:
        self.what = what
        self.expected = expected
        self.got = tuple(got)
        super().__init__(f"{what}: expected last dimension {expected}, got shape {self.got}")


class NumericRangeError(NisError):
    exit_code: ClassVar[int] = 3

    def __init__(self, message: str, sample: Optional[int] = None) -> None:
        self.sample = sample
        super().__init__((f"(sample {sample}): " if sample is not None else "") + message)


class TrainingDivergedError(NumericRangeError):
    def __init__(self, epoch: int, step: int, learning_rate: float, clamp: float) -> None:
        self.epoch = epoch
        self.step = step
        super().__init__(
            f"loss became non-finite at epoch {epoch}, step {step}; "
            f"learning rate {learning_rate:g}, coupling scale clamp ±{clamp:g} - try a smaller learning rate"
        )


class DatasetError(NisError):
    exit_code: ClassVar[int] = 4


class IllConditionedWarning(UserWarning):
    pass
