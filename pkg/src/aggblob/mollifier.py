"""Gaussian mollifier used to regularize diffusion (and singular kernels).

phi_eps(x) = (4 pi eps^2)^(-d/2) exp(-|x|^2 / (4 eps^2))

i.e. a Gaussian with variance 2 eps^2 per coordinate, unit mass in any
dimension.  All evaluation is vectorized over arrays whose last axis is the
spatial dimension.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Mollifier:
    epsilon: float
    d: int = 1

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise DomainError(f"mollifier width must be positive, got {self.epsilon}")
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")

    def eval(self, x: np.ndarray) -> np.ndarray:
        """phi_eps at points x, shape (..., d) -> (...)."""
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        eps = self.epsilon
        norm = (4.0 * np.pi * eps * eps) ** (-0.5 * self.d)
        return norm * np.exp(-r2 / (4.0 * eps * eps))

    def grad(self, x: np.ndarray) -> np.ndarray:
        """grad phi_eps, shape (..., d) -> (..., d)."""
        x = np.asarray(x, dtype=float)
        return -x / (2.0 * self.epsilon ** 2) * self.eval(x)[..., None]

    def grad_from_eval(self, x: np.ndarray, values: np.ndarray) -> np.ndarray:
        """grad phi_eps given precomputed eval(x); saves an exp in hot loops."""
        return -x / (2.0 * self.epsilon ** 2) * values[..., None]

    def curve_from_eval(self, x: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Second derivative phi_eps'' (1d only) given precomputed eval(x).

        x is the scalar separation here, shape matching values.
        """
        e2 = 2.0 * self.epsilon ** 2
        return (x * x / e2 - 1.0) / e2 * values


def epsilon_from_spacing(h: float, q: float) -> float:
    """Regularization width from particle spacing, eps = h**q.

    q in (0, 1] keeps the particle spacing below the mollifier width as the
    discretization refines.  h is expected to be a small positive spacing;
    h >= 1 is technically allowed but almost certainly a configuration slip,
    so it warns.
    """
    if not (h > 0):
        raise DomainError(f"spacing must be positive, got {h}")
    if not (0 < q <= 1):
        raise DomainError(f"spacing exponent must lie in (0, 1], got {q}")
    if h >= 1:
        warnings.warn(f"spacing h={h} >= 1: eps = h**q does not shrink", stacklevel=2)
    return float(h) ** float(q)
