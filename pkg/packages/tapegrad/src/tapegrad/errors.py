from typing import Sequence, Tuple


class TapegradError(Exception):
    pass


class OpError(TapegradError):
    def __init__(self, message: str, op: str) -> None:
        self.op = op
        super().__init__(f"({op}): {message}")


class ShapeMismatchError(OpError):
    def __init__(self, op: str, *shapes: Tuple[int, ...]) -> None:
        self.shapes = shapes
        super().__init__("shape mismatch " + " vs ".join(str(tuple(s)) for s in shapes), op)


class NonFiniteError(OpError):
    def __init__(self, op: str, count: int) -> None:
        self.count = count
        super().__init__(f"{count} non-finite value(s) produced from finite inputs", op)


class NonScalarRootError(TapegradError):
    def __init__(self, shape: Sequence[int]) -> None:
        self.shape = tuple(shape)
        super().__init__(f"backward needs a scalar root, got shape {self.shape}")
