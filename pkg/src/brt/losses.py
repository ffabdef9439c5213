"""Regression loss interface.

Only least squares ships; the registry exists so the stage loop stays
loss-agnostic (value, negative gradient, optimal starting constant).
"""

from __future__ import annotations

import numpy as np


class LeastSquares:
    name = "least_squares"

    @staticmethod
    def value(y: np.ndarray, f: np.ndarray) -> float:
        d = y - f
        return float((d * d).sum()) / len(y)

    @staticmethod
    def negative_gradient(y: np.ndarray, f: np.ndarray) -> np.ndarray:
        return y - f

    @staticmethod
    def optimal_constant(y: np.ndarray) -> float:
        return float(y.sum()) / len(y)


LOSSES = {LeastSquares.name: LeastSquares}
