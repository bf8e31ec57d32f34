import numpy as np
import pytest


class CountingWindow:
    """Array wrapper that counts elements handed out through item access.

    Estimators address windows only via ``len`` and slicing, so wrapping
    their inputs in this class measures exactly how many samples each
    algorithm touches.
    """

    def __init__(self, data):
        self._data = np.asarray(data)
        self.elements_read = 0

    def __len__(self):
        return len(self._data)

    def __getitem__(self, key):
        out = self._data[key]
        self.elements_read += out.size if isinstance(out, np.ndarray) else 1
        return out


@pytest.fixture
def counting_window():
    return CountingWindow
