from __future__ import annotations
from typing import Callable, Hashable, Tuple, Union

import numpy as np


Label = Hashable
Point = Union[float, Label]
ArrayLike = Union[float, complex, np.ndarray]

# Vectorized function on the circle: angles in [0, 1) -> values
CircleFunction = Callable[[np.ndarray], np.ndarray]

Interval = Tuple[float, float]
