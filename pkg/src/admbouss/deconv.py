"""Helmholtz filtering and Van Cittert deconvolution as Fourier multipliers.

The filter is the inverse Helmholtz operator (I - alpha^2 Laplacian)^-1
with symbol 1 / (1 + alpha^2 |k|^2).  Truncated Van Cittert deconvolution
of order N sums the first N + 1 powers of (I - filter), which telescopes
to the closed form

    deconv_hat(k) = (1 + alpha^2 |k|^2) * (1 - r(k)^(N+1)),
    r(k) = alpha^2 |k|^2 / (1 + alpha^2 |k|^2),

so 1 <= deconv_hat <= min(N + 1, inverse filter symbol), the symbol is
nondecreasing in N, and it tends to N + 1 as |k| grows.  The recovery
fraction deconv_hat / inv_filter_hat lies in (0, 1]; its square root is
the symbol of the bounded operator pairing a half power of the inverse
filter with a half power of the deconvolution.
"""

from __future__ import annotations

import numpy as np

from .spectral import TorusGrid, apply_multiplier

__all__ = [
    "filter_symbol",
    "inverse_filter_symbol",
    "deconv_symbol",
    "DeconvolutionSpec",
    "helmholtz_filter",
    "apply_inverse_filter",
    "deconvolve",
    "apply_half_powers",
]


def filter_symbol(alpha: float, k_sq) -> np.ndarray:
    """Symbol of the Helmholtz filter, 1 / (1 + alpha^2 |k|^2)."""
    return 1.0 / (1.0 + alpha * alpha * np.asarray(k_sq, dtype=np.float64))


def inverse_filter_symbol(alpha: float, k_sq) -> np.ndarray:
    """Symbol of I - alpha^2 Laplacian, the filter's inverse."""
    return 1.0 + alpha * alpha * np.asarray(k_sq, dtype=np.float64)


def deconv_symbol(alpha: float, order: int, k_sq) -> np.ndarray:
    """Closed-form truncated Van Cittert symbol of the given order."""
    x = alpha * alpha * np.asarray(k_sq, dtype=np.float64)
    lifted = 1.0 + x
    ratio = x / lifted
    return lifted * (1.0 - ratio ** (order + 1))


class DeconvolutionSpec:
    """Grid-bound symbol tables for one (alpha, order) pair.

    Attributes
    ----------
    filter_hat : ndarray
        Helmholtz filter symbol per mode.
    inv_filter_hat : ndarray
        Inverse filter symbol (1 + alpha^2 |k|^2).
    deconv_hat : ndarray
        Truncated Van Cittert symbol.
    recovery_hat : ndarray
        deconv_hat / inv_filter_hat, in (0, 1]; tends to 1 as the order
        grows on any fixed mode.
    half_weight_hat : ndarray
        sqrt(inv_filter_hat * deconv_hat), the energy-weight symbol.
    """

    def __init__(self, grid: TorusGrid, alpha: float, order: int):
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        if order != int(order) or order < 0:
            raise ValueError(f"order must be a nonnegative integer, got {order}")
        self.grid = grid
        self.alpha = float(alpha)
        self.order = int(order)

        self.filter_hat = filter_symbol(self.alpha, grid.k_sq)
        self.inv_filter_hat = inverse_filter_symbol(self.alpha, grid.k_sq)
        self.deconv_hat = deconv_symbol(self.alpha, self.order, grid.k_sq)
        self.recovery_hat = self.deconv_hat / self.inv_filter_hat
        self.half_weight_hat = np.sqrt(self.inv_filter_hat * self.deconv_hat)
        for arr in (self.filter_hat, self.inv_filter_hat, self.deconv_hat,
                    self.recovery_hat, self.half_weight_hat):
            arr.flags.writeable = False

    def validate(self, tol: float = 1e-12) -> None:
        """Assert the symbol sandwich 1 <= deconv_hat <= min(order+1, inv)."""
        d = self.deconv_hat
        if not np.all(d >= 1.0 - tol):
            raise AssertionError("deconvolution symbol dips below 1")
        cap = np.minimum(self.order + 1.0, self.inv_filter_hat)
        if not np.all(d <= cap + tol):
            raise AssertionError("deconvolution symbol exceeds min(N+1, inverse filter)")

    def __repr__(self):
        return (f"DeconvolutionSpec(alpha={self.alpha!r}, order={self.order}, "
                f"grid={self.grid!r})")


def helmholtz_filter(spec: DeconvolutionSpec, field):
    """Apply the Helmholtz filter; damps mode k by 1/(1 + alpha^2 |k|^2)."""
    return apply_multiplier(field, spec.filter_hat)


def apply_inverse_filter(spec: DeconvolutionSpec, field):
    """Apply I - alpha^2 Laplacian, undoing the filter exactly."""
    return apply_multiplier(field, spec.inv_filter_hat)


def deconvolve(spec: DeconvolutionSpec, field):
    """Apply the truncated Van Cittert deconvolution of the spec's order."""
    return apply_multiplier(field, spec.deconv_hat)


def apply_half_powers(spec: DeconvolutionSpec, field):
    """Apply the energy weight sqrt((I - alpha^2 Lap) . deconvolution)."""
    return apply_multiplier(field, spec.half_weight_hat)
