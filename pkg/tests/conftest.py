"""Shared fixtures and slow reference implementations.

The reference implementations here are deliberately naive: direct
mode-sum evaluation instead of FFTs, dictionary convolution instead of
padded products, and the fixed-point filter iteration instead of the
closed-form deconvolution symbol.  They are independent of the library
internals so agreement is meaningful.
"""

import numpy as np
import pytest

from admbouss import (
    DeconvolutionSpec,
    SpectralScalarField,
    SpectralVectorField,
    build_grid,
    helmholtz_filter,
    hermitize,
    leray_project,
    sobolev_norm,
)


@pytest.fixture
def grid8():
    return build_grid(2.0 * np.pi, 8)


@pytest.fixture
def grid16():
    return build_grid(2.0 * np.pi, 16)


def random_scalar(grid, seed, amplitude=1.0):
    rng = np.random.default_rng(seed)
    shape = (grid.modes_per_axis,) * 3
    c = hermitize(rng.normal(size=shape) + 1j * rng.normal(size=shape))
    f = SpectralScalarField(grid, c)
    return (amplitude / sobolev_norm(f)) * f


def random_vector(grid, seed, amplitude=1.0, solenoidal=True):
    rng = np.random.default_rng(seed)
    shape = (grid.modes_per_axis,) * 3
    c = np.stack([hermitize(rng.normal(size=shape) + 1j * rng.normal(size=shape))
                  for _ in range(3)])
    v = SpectralVectorField(grid, c)
    if solenoidal:
        v = leray_project(v)
    return (amplitude / sobolev_norm(v)) * v


def mode_dict(grid, coeffs):
    """Nonzero retained coefficients keyed by integer wavenumber."""
    out = {}
    for idx in np.argwhere(grid.mode_mask):
        value = coeffs[tuple(idx)]
        if value != 0:
            key = tuple(int(grid.k_index[a][tuple(idx)]) for a in range(3))
            out[key] = value
    return out


def dict_to_coeffs(grid, modes):
    n = grid.modes_per_axis
    c = np.zeros((n,) * 3, dtype=np.complex128)
    for key, value in modes.items():
        c[tuple(k % n for k in key)] = value
    return c


def convolve_dicts(grid, a, b):
    """Exact convolution of two mode dictionaries, Galerkin-truncated."""
    out = {}
    top = grid.max_index
    for ka, va in a.items():
        for kb, vb in b.items():
            k = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2])
            if max(abs(c) for c in k) > top:
                continue
            out[k] = out.get(k, 0.0) + va * vb
    return out


def naive_evaluate(grid, coeffs, points):
    """Direct mode sum sum_k c_k exp(i k.x) at the given (3, ...) points."""
    flat = points.reshape(3, -1)
    total = np.zeros(flat.shape[1], dtype=np.complex128)
    scale = 2.0 * np.pi / grid.box_length
    for key, value in mode_dict(grid, coeffs).items():
        phase = scale * (key[0] * flat[0] + key[1] * flat[1] + key[2] * flat[2])
        total += value * np.exp(1j * phase)
    return total.reshape(points.shape[1:])


def iterative_deconvolve(spec, field, order):
    """Fixed-point reconstruction: u_{n+1} = u_n + (field - filter u_n)."""
    u = field
    for _ in range(order):
        u = u + (field - helmholtz_filter(spec, u))
    return u


def oracle_momentum_nonlinear(grid, spec, w):
    """filter(div(deconv w tensor deconv w)) by dictionary convolution."""
    dw = [mode_dict(grid, spec.deconv_hat * w.coeffs[i]) for i in range(3)]
    scale = 2.0 * np.pi / grid.box_length
    out = np.zeros((3,) + (grid.modes_per_axis,) * 3, dtype=np.complex128)
    for i in range(3):
        acc = {}
        for j in range(3):
            prod = convolve_dicts(grid, dw[i], dw[j])
            for key, value in prod.items():
                acc[key] = acc.get(key, 0.0) + 1j * (scale * key[j]) * value
        out[i] = dict_to_coeffs(grid, acc)
    ghat = spec.filter_hat
    return SpectralVectorField(grid, ghat[None] * out)


def oracle_density_nonlinear(grid, spec, rho, w):
    """filter(div(deconv rho deconv w)) by dictionary convolution."""
    dr = mode_dict(grid, spec.deconv_hat * rho.coeffs)
    scale = 2.0 * np.pi / grid.box_length
    acc = {}
    for j in range(3):
        dwj = mode_dict(grid, spec.deconv_hat * w.coeffs[j])
        prod = convolve_dicts(grid, dr, dwj)
        for key, value in prod.items():
            acc[key] = acc.get(key, 0.0) + 1j * (scale * key[j]) * value
    return SpectralScalarField(
        grid, spec.filter_hat * dict_to_coeffs(grid, acc))


def make_spec(grid, alpha=1.0, order=3):
    return DeconvolutionSpec(grid, alpha=alpha, order=order)
