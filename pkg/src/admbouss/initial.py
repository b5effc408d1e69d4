"""Initial-condition presets: vortex, seeded random band, quiescent."""

from __future__ import annotations

import numpy as np

from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    TorusGrid,
    hermitize,
    leray_project,
    scalar_from_physical,
    sobolev_norm,
    vector_from_physical,
    zero_scalar,
    zero_vector,
)

__all__ = [
    "taylor_green",
    "single_mode_scalar",
    "random_band_vector",
    "random_band_scalar",
    "make_initial",
    "PRESETS",
]


def taylor_green(grid: TorusGrid, amplitude: float = 1.0) -> SpectralVectorField:
    """Planar vortex array (sin qx cos qy, -cos qx sin qy, 0), q = 2 pi / L."""
    x = grid.points
    q = 2.0 * np.pi / grid.box_length
    u = np.stack([
        amplitude * np.sin(q * x[0]) * np.cos(q * x[1]),
        -amplitude * np.cos(q * x[0]) * np.sin(q * x[1]),
        np.zeros_like(x[0]),
    ])
    return leray_project(vector_from_physical(grid, u))


def single_mode_scalar(grid: TorusGrid, amplitude: float = 1.0,
                       axis: int = 2) -> SpectralScalarField:
    """cos of the smallest wavenumber along one axis."""
    x = grid.points
    q = 2.0 * np.pi / grid.box_length
    return scalar_from_physical(grid, amplitude * np.cos(q * x[axis]))


def _band_coeffs(grid: TorusGrid, rng, k_min: int, k_max: int) -> np.ndarray:
    n = grid.modes_per_axis
    c = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    band = (grid.index_sq >= k_min * k_min) & (grid.index_sq <= k_max * k_max)
    return hermitize(c) * band


def random_band_scalar(grid: TorusGrid, k_min: int, k_max: int,
                       amplitude: float, seed: int) -> SpectralScalarField:
    """Seeded random field supported on k_min <= |k| <= k_max, L2 norm set."""
    rng = np.random.default_rng(seed)
    f = SpectralScalarField(grid, _band_coeffs(grid, rng, k_min, k_max),
                            copy=False)
    scale = sobolev_norm(f)
    if scale == 0.0:
        raise ValueError("requested band holds no modes")
    return (amplitude / scale) * f


def random_band_vector(grid: TorusGrid, k_min: int, k_max: int,
                       amplitude: float, seed: int) -> SpectralVectorField:
    """Seeded divergence-free random field on the band, L2 norm set."""
    rng = np.random.default_rng(seed)
    c = np.stack([_band_coeffs(grid, rng, k_min, k_max) for _ in range(3)])
    f = leray_project(SpectralVectorField(grid, c, copy=False))
    scale = sobolev_norm(f)
    if scale == 0.0:
        raise ValueError("requested band holds no modes")
    return (amplitude / scale) * f


PRESETS = {
    "taylor-green": {"amplitude": 1.0, "theta_amplitude": 0.5},
    "random-band": {"amplitude": 0.3, "theta_amplitude": 0.3,
                    "k_min": 1, "k_max": 4, "seed": 0},
    "zero": {},
}


def make_initial(grid: TorusGrid, preset: str, options: dict | None = None):
    """Build (u0, theta0) from a named preset; unknown keys are rejected."""
    if preset not in PRESETS:
        raise ValueError(
            f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    opts = dict(PRESETS[preset])
    for key, value in (options or {}).items():
        if key not in opts:
            raise ValueError(f"preset {preset!r} does not accept option {key!r}")
        opts[key] = value

    if preset == "taylor-green":
        u0 = taylor_green(grid, opts["amplitude"])
        theta0 = single_mode_scalar(grid, opts["theta_amplitude"])
    elif preset == "random-band":
        u0 = random_band_vector(grid, opts["k_min"], opts["k_max"],
                                opts["amplitude"], opts["seed"])
        theta0 = random_band_scalar(grid, opts["k_min"], opts["k_max"],
                                    opts["theta_amplitude"], opts["seed"] + 1)
    else:
        u0 = zero_vector(grid)
        theta0 = zero_scalar(grid)
    return u0, theta0
