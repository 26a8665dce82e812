"""Truncated Fourier series on the unit circle and the periodic ODE solve.

Elements of the truncated space are coefficient vectors of length 2N+1 over
the basis [1, cos_1, sin_1, ..., cos_N, sin_N], where cos_m(t) = cos(2*pi*m*t)
has period 1.  Differentiation is mode-diagonal in the (cos_m, sin_m) planes,
so truncation is exact per retained mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BackendError, DimensionMismatchError


@dataclass(frozen=True)
class FourierLayer:
    """Period-1 functions truncated to modes 0..N."""

    modes: int

    def __post_init__(self):
        if self.modes < 0:
            raise DimensionMismatchError("negative mode cutoff")

    @property
    def dim(self) -> int:
        return 2 * self.modes + 1

    @property
    def labels(self) -> tuple[str, ...]:
        out = ["1"]
        for m in range(1, self.modes + 1):
            out += [f"cos{m}", f"sin{m}"]
        return tuple(out)

    def derivative_matrix(self) -> np.ndarray:
        """d/dt on coefficients: cos_m -> -2*pi*m sin_m, sin_m -> 2*pi*m cos_m."""
        d = np.zeros((self.dim, self.dim))
        for m in range(1, self.modes + 1):
            c, s = 2 * m - 1, 2 * m
            d[s, c] = -2.0 * math.pi * m
            d[c, s] = 2.0 * math.pi * m
        return d

    def evaluate(self, coeffs: np.ndarray, t) -> np.ndarray:
        """Evaluate the truncated series at t (scalar or array)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise DimensionMismatchError(f"expected {self.dim} coefficients")
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, coeffs[0], dtype=float)
        for m in range(1, self.modes + 1):
            w = 2.0 * math.pi * m * t
            out = out + coeffs[2 * m - 1] * np.cos(w) + coeffs[2 * m] * np.sin(w)
        return out


def fourier_apply(mu: float, h: np.ndarray) -> np.ndarray:
    """The forward operator f -> f' + mu*f on coefficient vectors."""
    layer = layer_for(h)
    return layer.derivative_matrix().dot(np.asarray(h, dtype=float)) + mu * np.asarray(h, dtype=float)


def layer_for(coeffs: np.ndarray) -> FourierLayer:
    n = len(coeffs)
    if n % 2 != 1:
        raise DimensionMismatchError(f"coefficient vector of even length {n}")
    return FourierLayer((n - 1) // 2)


def fourier_solve(mu: float, h: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    """The unique periodic f with f' + mu*f = h, computed mode by mode.

    The constant mode gives f_0 = h_0/mu; mode m solves the 2x2 system
    [[mu, 2*pi*m], [-2*pi*m, mu]] (f_c, f_s) = (h_c, h_s), which is
    invertible for every m >= 1; invertibility overall needs mu != 0.
    """
    h = np.asarray(h, dtype=float)
    layer = layer_for(h)
    if abs(mu) <= atol:
        raise BackendError(f"forward operator not invertible: |mu|={abs(mu):g} <= {atol:g}")
    f = np.zeros_like(h)
    f[0] = h[0] / mu
    for m in range(1, layer.modes + 1):
        w = 2.0 * math.pi * m
        det = mu * mu + w * w
        hc, hs = h[2 * m - 1], h[2 * m]
        f[2 * m - 1] = (mu * hc - w * hs) / det
        f[2 * m] = (w * hc + mu * hs) / det
    return f
