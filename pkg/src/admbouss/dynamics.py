"""Right-hand side of the deconvolution-regularized Boussinesq system.

The evolved variables are the filtered velocity w (divergence-free) and
the filtered density rho.  Writing D for the truncated Van Cittert
deconvolution and G for the Helmholtz filter, the tendencies are

    dw/dt   = rho e3 - G div(D w (x) D w) + nu Lap w - grad q,
    drho/dt = -G div(D rho . D w) + epsilon Lap rho,

with the buoyancy source rho e3 entering unfiltered and the pressure
gradient enforcing div w = 0.  Quadratic products are formed pointwise
on the 3/2-padded grid and projected back, so the discrete nonlinear
terms are the exact Galerkin projections of their continuous
counterparts and the trilinear energy cancellations hold to round-off.

Projection is available through two routes that agree to round-off: an
explicit pressure solve (Lap q = div f) and the algebraic Leray
projection applied mode by mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deconv import DeconvolutionSpec
from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    leray_project,
)

__all__ = [
    "ModelParams",
    "Tendency",
    "buoyancy_field",
    "padded_samples",
    "tensor_divergence",
    "flux_divergence",
    "momentum_nonlinear",
    "density_nonlinear",
    "pressure_solve",
    "assemble_tendency",
    "explicit_force",
]


@dataclass(frozen=True)
class ModelParams:
    """Physics bundle: deconvolution spec plus viscosities.

    include_nonlinear and include_buoyancy are in-process test hooks for
    isolating the linear dynamics; they are not reachable from run
    configuration files.
    """

    deconv: DeconvolutionSpec
    nu: float
    epsilon: float
    include_nonlinear: bool = True
    include_buoyancy: bool = True

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def grid(self):
        return self.deconv.grid


@dataclass(frozen=True)
class Tendency:
    """Assembled time derivatives and the pressure that enforced them."""

    dw: SpectralVectorField
    drho: SpectralScalarField
    pressure: SpectralScalarField


def buoyancy_field(rho: SpectralScalarField) -> SpectralVectorField:
    """rho e3 as a vector field; the source enters unfiltered."""
    g = rho.grid
    c = np.zeros((3,) + rho.coeffs.shape, dtype=np.complex128)
    c[2] = rho.coeffs
    return SpectralVectorField(g, c, copy=False)


def padded_samples(grid, weight: np.ndarray, *coeff_cubes) -> list[np.ndarray]:
    """Padded-grid samples of weight-multiplied coefficient cubes."""
    return [grid.pad_to_physical(weight * c) for c in coeff_cubes]


def tensor_divergence(grid, filter_hat: np.ndarray,
                      ux: list[np.ndarray]) -> np.ndarray:
    """Coefficients of G div(u (x) u) from padded samples of u."""
    prods = {}
    for i in range(3):
        for j in range(i, 3):
            prods[i, j] = grid.pad_from_physical(ux[i] * ux[j])
    out = np.empty((3,) + (grid.modes_per_axis,) * 3, dtype=np.complex128)
    for i in range(3):
        acc = np.zeros((grid.modes_per_axis,) * 3, dtype=np.complex128)
        for j in range(3):
            acc += grid.k[j] * prods[(i, j) if i <= j else (j, i)]
        out[i] = 1j * acc
    return out * filter_hat[None]


def flux_divergence(grid, filter_hat: np.ndarray, sx: np.ndarray,
                    ux: list[np.ndarray]) -> np.ndarray:
    """Coefficients of G div(s u) from padded samples of scalar s and u."""
    acc = np.zeros((grid.modes_per_axis,) * 3, dtype=np.complex128)
    for j in range(3):
        acc += grid.k[j] * grid.pad_from_physical(sx * ux[j])
    return 1j * acc * filter_hat


def momentum_nonlinear(params: ModelParams, w: SpectralVectorField) -> SpectralVectorField:
    """G div(D w (x) D w); vanishes when the advecting field cannot shear."""
    dec = params.deconv
    ux = padded_samples(params.grid, dec.deconv_hat, *w.coeffs)
    return SpectralVectorField(
        params.grid, tensor_divergence(params.grid, dec.filter_hat, ux),
        copy=False)


def density_nonlinear(params: ModelParams, rho: SpectralScalarField,
                      w: SpectralVectorField) -> SpectralScalarField:
    """G div(D rho . D w), the filtered advective density flux divergence."""
    dec = params.deconv
    ux = padded_samples(params.grid, dec.deconv_hat, *w.coeffs, rho.coeffs)
    c = flux_divergence(params.grid, dec.filter_hat, ux[3], ux[:3])
    return SpectralScalarField(params.grid, c, copy=False)


def _nondiffusive_force(params: ModelParams, w: SpectralVectorField,
                        rho: SpectralScalarField) -> SpectralVectorField:
    """Unprojected momentum force rho e3 - G div(D w (x) D w)."""
    g = params.grid
    c = np.zeros((3,) + (g.modes_per_axis,) * 3, dtype=np.complex128)
    if params.include_buoyancy:
        c[2] = rho.coeffs
    if params.include_nonlinear:
        dec = params.deconv
        ux = padded_samples(g, dec.deconv_hat, *w.coeffs)
        c -= tensor_divergence(g, dec.filter_hat, ux)
    return SpectralVectorField(g, c, copy=False)


def pressure_solve(params: ModelParams, rho: SpectralScalarField,
                   w: SpectralVectorField) -> SpectralScalarField:
    """Solve Lap q = div(rho e3 - G div(D w (x) D w)) mode by mode."""
    g = params.grid
    f = _nondiffusive_force(params, w, rho)
    k_dot_f = (g.k * f.coeffs).sum(axis=0)
    return SpectralScalarField(g, -1j * k_dot_f * g.inv_k_sq, copy=False)


def explicit_force(params: ModelParams, w: SpectralVectorField,
                   rho: SpectralScalarField):
    """Projected nondiffusive tendencies (dw part, drho part).

    This is the integrand handed to the explicit time stepper; diffusion
    is handled there by exact integrating factors.  The deconvolved
    physical samples are shared between the tensor and flux products.
    """
    g = params.grid
    shape = (g.modes_per_axis,) * 3
    fw_c = np.zeros((3,) + shape, dtype=np.complex128)
    fr_c = np.zeros(shape, dtype=np.complex128)
    if params.include_buoyancy:
        fw_c[2] = rho.coeffs
    if params.include_nonlinear:
        dec = params.deconv
        ux = padded_samples(g, dec.deconv_hat, *w.coeffs, rho.coeffs)
        fw_c -= tensor_divergence(g, dec.filter_hat, ux[:3])
        fr_c = -flux_divergence(g, dec.filter_hat, ux[3], ux[:3])
    fw = leray_project(SpectralVectorField(g, fw_c, copy=False))
    return fw, SpectralScalarField(g, fr_c, copy=False)


def assemble_tendency(params: ModelParams, w: SpectralVectorField,
                      rho: SpectralScalarField) -> Tendency:
    """Full tendencies via the pressure route, with a Leray cleanup pass.

    The pressure route subtracts grad q with q from the spectral Poisson
    solve; the final Leray projection only scrubs round-off, so the two
    routes agree to machine precision.
    """
    g = params.grid
    f = _nondiffusive_force(params, w, rho)
    k_dot_f = (g.k * f.coeffs).sum(axis=0)
    q = SpectralScalarField(g, -1j * k_dot_f * g.inv_k_sq, copy=False)
    dw = leray_project(SpectralVectorField(
        g, f.coeffs - 1j * g.k * q.coeffs[None], copy=False))
    dw = SpectralVectorField(g, dw.coeffs - params.nu * g.k_sq[None] * w.coeffs,
                             divergence_free=True, copy=False)
    if params.include_nonlinear:
        drho_c = -density_nonlinear(params, rho, w).coeffs - \
            params.epsilon * g.k_sq * rho.coeffs
    else:
        drho_c = -params.epsilon * g.k_sq * rho.coeffs
    return Tendency(dw=dw, drho=SpectralScalarField(g, drho_c, copy=False),
                    pressure=q)
