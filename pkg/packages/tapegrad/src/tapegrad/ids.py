import itertools


class IdGenerator:
    def __init__(self) -> None:
        # next() on itertools.count is atomic under the GIL
        self._id_counter = itertools.count()

    def get_next_id(self) -> int:
        return next(self._id_counter)


TENSOR_IDS = IdGenerator()
