"""Spectral core for real zero-mean fields on a periodic box.

Fields are stored as full-cube Fourier coefficient arrays in numpy FFT
layout.  Conventions used throughout the package:

* expansion v(x) = sum_k vhat_k exp(i k.x) with k = (2*pi/L) * integer
  index, so physical samples come from ifftn scaled by n**3;
* the retained lattice is the symmetric cube of integer indices
  |k_i| <= n/2 - 1 (the unpaired Nyquist line is never populated),
  optionally intersected with a sharp radial cutoff;
* every field constructor zeroes the mean mode and masks unretained
  modes, so fields stay zero-mean trigonometric polynomials;
* norms use the normalized measure: ||v||_s^2 = sum_k |k|^(2s) |vhat_k|^2,
  which for s = 0 equals the mean square of the physical samples.

Quadratic products are formed on a 3/2-padded companion grid and
truncated back, which makes them exact Galerkin projections of the
pointwise product (no aliasing error).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralScalarField",
    "SpectralVectorField",
    "build_grid",
    "to_physical",
    "scalar_from_physical",
    "vector_from_physical",
    "zero_scalar",
    "zero_vector",
    "apply_multiplier",
    "gradient",
    "divergence",
    "laplacian",
    "leray_project",
    "truncate",
    "sobolev_norm",
    "inner_product",
]


def _conj_reflect(coeffs: np.ndarray) -> np.ndarray:
    """Return the array with entry at k replaced by conj of the entry at -k."""
    flipped = coeffs[::-1, ::-1, ::-1]
    return np.conj(np.roll(flipped, 1, axis=(0, 1, 2)))


def hermitize(coeffs: np.ndarray) -> np.ndarray:
    """Symmetrize so the coefficient at -k is exactly conj of the one at k."""
    return 0.5 * (coeffs + _conj_reflect(coeffs))


class TorusGrid:
    """Periodic box discretization with a symmetric integer mode cube.

    Parameters
    ----------
    box_length : float
        Side length L of the periodic box.
    modes_per_axis : int
        FFT points per axis; even and at least 4.  The retained integer
        indices per axis are -(n/2 - 1) .. n/2 - 1, an odd-symmetric set.
    truncation_radius : int, optional
        If given, additionally exclude modes with integer |k| above it.
    """

    def __init__(self, box_length: float, modes_per_axis: int,
                 truncation_radius: int | None = None):
        if box_length <= 0:
            raise ValueError(f"box_length must be positive, got {box_length}")
        if modes_per_axis < 4 or modes_per_axis % 2 != 0:
            raise ValueError(
                f"modes_per_axis must be even and >= 4, got {modes_per_axis}")
        n = int(modes_per_axis)
        self.box_length = float(box_length)
        self.modes_per_axis = n
        self.max_index = n // 2 - 1

        axis = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
        self.k_index = np.array(np.meshgrid(axis, axis, axis, indexing="ij"))
        self.index_sq = (self.k_index ** 2).sum(axis=0)

        scale = 2.0 * np.pi / self.box_length
        self.k = scale * self.k_index.astype(np.float64)
        self.k_sq = (self.k ** 2).sum(axis=0)
        safe = np.where(self.k_sq > 0.0, self.k_sq, 1.0)
        self.inv_k_sq = np.where(self.k_sq > 0.0, 1.0 / safe, 0.0)

        mask = (np.abs(self.k_index) <= self.max_index).all(axis=0)
        if truncation_radius is not None:
            radius = int(truncation_radius)
            if radius < 0:
                raise ValueError("truncation_radius must be nonnegative")
            mask &= self.index_sq <= radius * radius
            self.truncation_radius = radius
        else:
            self.truncation_radius = None
        mask[0, 0, 0] = False  # zero-mean: the mean mode never carries energy
        self.mode_mask = mask

        # 3/2-padded companion grid for dealiased quadratic products.
        self.pad_modes = 3 * n // 2
        keep = self.max_index + 1
        self._pad_src = np.r_[0:keep, n - self.max_index:n]
        self._pad_dst = np.r_[0:keep, self.pad_modes - self.max_index:self.pad_modes]

        for arr in (self.k_index, self.index_sq, self.k, self.k_sq,
                    self.inv_k_sq, self.mode_mask):
            arr.flags.writeable = False

    @property
    def spacing(self) -> float:
        """Physical spacing of the companion collocation grid."""
        return self.box_length / self.modes_per_axis

    @property
    def shape(self) -> tuple:
        """Shape of one coefficient cube."""
        return (self.modes_per_axis,) * 3

    @property
    def points(self) -> np.ndarray:
        """Collocation coordinates, shape (3, n, n, n)."""
        x = self.box_length * np.arange(self.modes_per_axis) / self.modes_per_axis
        return np.array(np.meshgrid(x, x, x, indexing="ij"))

    def pad_to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        """Evaluate a coefficient cube on the 3/2-padded collocation grid."""
        big = np.zeros((self.pad_modes,) * 3, dtype=np.complex128)
        sl = np.ix_(self._pad_src, self._pad_src, self._pad_src)
        dl = np.ix_(self._pad_dst, self._pad_dst, self._pad_dst)
        big[dl] = coeffs[sl]
        return np.fft.ifftn(big).real * self.pad_modes ** 3

    def pad_from_physical(self, samples: np.ndarray) -> np.ndarray:
        """Project padded-grid samples back onto the retained mode cube."""
        big = np.fft.fftn(samples) / self.pad_modes ** 3
        out = np.zeros((self.modes_per_axis,) * 3, dtype=np.complex128)
        sl = np.ix_(self._pad_src, self._pad_src, self._pad_src)
        dl = np.ix_(self._pad_dst, self._pad_dst, self._pad_dst)
        out[sl] = big[dl]
        return hermitize(out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TorusGrid)
                and self.box_length == other.box_length
                and self.modes_per_axis == other.modes_per_axis
                and self.truncation_radius == other.truncation_radius)

    def __hash__(self):
        return hash((self.box_length, self.modes_per_axis, self.truncation_radius))

    def __repr__(self):
        return (f"TorusGrid(box_length={self.box_length!r}, "
                f"modes_per_axis={self.modes_per_axis}, "
                f"truncation_radius={self.truncation_radius})")


def build_grid(box_length: float, modes_per_axis: int,
               truncation_radius: int | None = None) -> TorusGrid:
    """Construct a TorusGrid; rejects odd or too-small mode counts."""
    return TorusGrid(box_length, modes_per_axis, truncation_radius)


def _require_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


class SpectralScalarField:
    """Zero-mean scalar field held as masked Fourier coefficients."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray, copy: bool = True):
        c = np.array(coeffs, dtype=np.complex128, copy=copy)
        if c.shape != (grid.modes_per_axis,) * 3:
            raise ValueError(f"coefficient shape {c.shape} does not match grid")
        c *= grid.mode_mask
        c.flags.writeable = False
        self.grid = grid
        self.coeffs = c

    def hermitian_defect(self) -> float:
        """Max deviation from conjugate symmetry; zero for real fields."""
        return float(np.abs(self.coeffs - _conj_reflect(self.coeffs)).max())

    def validate(self, tol: float = 1e-12) -> None:
        """Assert finiteness, zero mean, masking, and conjugate symmetry."""
        if not np.isfinite(self.coeffs).all():
            raise AssertionError("non-finite coefficients")
        if self.coeffs[0, 0, 0] != 0:
            raise AssertionError("mean mode not zero")
        if np.any(self.coeffs[~self.grid.mode_mask] != 0):
            raise AssertionError("energy outside the retained mode set")
        scale = float(np.abs(self.coeffs).max())
        if self.hermitian_defect() > tol * max(scale, 1.0):
            raise AssertionError("Hermitian symmetry violated")

    def __add__(self, other):
        _require_same_grid(self, other)
        return SpectralScalarField(self.grid, self.coeffs + other.coeffs, copy=False)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return SpectralScalarField(self.grid, self.coeffs - other.coeffs, copy=False)

    def __mul__(self, factor: float):
        return SpectralScalarField(self.grid, self.coeffs * factor, copy=False)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralScalarField(self.grid, -self.coeffs, copy=False)


class SpectralVectorField:
    """Zero-mean 3-component vector field; componentwise coefficients."""

    __slots__ = ("grid", "coeffs", "divergence_free")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray,
                 divergence_free: bool = False, copy: bool = True):
        c = np.array(coeffs, dtype=np.complex128, copy=copy)
        if c.shape != (3,) + (grid.modes_per_axis,) * 3:
            raise ValueError(f"coefficient shape {c.shape} does not match grid")
        c *= grid.mode_mask
        c.flags.writeable = False
        self.grid = grid
        self.coeffs = c
        self.divergence_free = bool(divergence_free)

    def component(self, i: int) -> SpectralScalarField:
        return SpectralScalarField(self.grid, self.coeffs[i])

    def hermitian_defect(self) -> float:
        return max(float(np.abs(self.coeffs[i] - _conj_reflect(self.coeffs[i])).max())
                   for i in range(3))

    def validate(self, tol: float = 1e-12) -> None:
        if not np.isfinite(self.coeffs).all():
            raise AssertionError("non-finite coefficients")
        if np.any(self.coeffs[:, 0, 0, 0] != 0):
            raise AssertionError("mean mode not zero")
        if np.any(self.coeffs[:, ~self.grid.mode_mask] != 0):
            raise AssertionError("energy outside the retained mode set")
        scale = float(np.abs(self.coeffs).max())
        if self.hermitian_defect() > tol * max(scale, 1.0):
            raise AssertionError("Hermitian symmetry violated")
        if self.divergence_free:
            div = (self.grid.k * self.coeffs).sum(axis=0)
            if float(np.abs(div).max()) > tol * max(scale, 1.0) * max(
                    float(self.grid.k.max()), 1.0):
                raise AssertionError("divergence-free flag violated")

    def __add__(self, other):
        _require_same_grid(self, other)
        return SpectralVectorField(
            self.grid, self.coeffs + other.coeffs,
            divergence_free=self.divergence_free and other.divergence_free,
            copy=False)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return SpectralVectorField(
            self.grid, self.coeffs - other.coeffs,
            divergence_free=self.divergence_free and other.divergence_free,
            copy=False)

    def __mul__(self, factor: float):
        return SpectralVectorField(self.grid, self.coeffs * factor,
                                   divergence_free=self.divergence_free, copy=False)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralVectorField(self.grid, -self.coeffs,
                                   divergence_free=self.divergence_free, copy=False)


def zero_scalar(grid: TorusGrid) -> SpectralScalarField:
    return SpectralScalarField(grid, np.zeros((grid.modes_per_axis,) * 3,
                                              dtype=np.complex128), copy=False)


def zero_vector(grid: TorusGrid) -> SpectralVectorField:
    return SpectralVectorField(grid, np.zeros((3,) + (grid.modes_per_axis,) * 3,
                                              dtype=np.complex128),
                               divergence_free=True, copy=False)


def to_physical(field) -> np.ndarray:
    """Collocation samples on the companion grid; real array."""
    n3 = field.grid.modes_per_axis ** 3
    if isinstance(field, SpectralScalarField):
        return np.fft.ifftn(field.coeffs).real * n3
    return np.stack([np.fft.ifftn(field.coeffs[i]).real * n3 for i in range(3)])


def scalar_from_physical(grid: TorusGrid, samples: np.ndarray) -> SpectralScalarField:
    """Forward transform of real samples; masks and symmetrizes."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.modes_per_axis,) * 3:
        raise ValueError(f"sample shape {samples.shape} does not match grid")
    c = hermitize(np.fft.fftn(samples) / grid.modes_per_axis ** 3)
    return SpectralScalarField(grid, c, copy=False)


def vector_from_physical(grid: TorusGrid, samples: np.ndarray) -> SpectralVectorField:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (3,) + (grid.modes_per_axis,) * 3:
        raise ValueError(f"sample shape {samples.shape} does not match grid")
    c = np.stack([hermitize(np.fft.fftn(samples[i]) / grid.modes_per_axis ** 3)
                  for i in range(3)])
    return SpectralVectorField(grid, c, copy=False)


def apply_multiplier(field, weights: np.ndarray):
    """Apply a real radial Fourier multiplier; preserves the field kind."""
    if isinstance(field, SpectralScalarField):
        return SpectralScalarField(field.grid, field.coeffs * weights, copy=False)
    return SpectralVectorField(field.grid, field.coeffs * weights[None],
                               divergence_free=field.divergence_free, copy=False)


def gradient(field: SpectralScalarField) -> SpectralVectorField:
    """Componentwise i k_j multiplication."""
    return SpectralVectorField(field.grid, 1j * field.grid.k * field.coeffs[None],
                               copy=False)


def divergence(field: SpectralVectorField) -> SpectralScalarField:
    """i k . vhat per mode."""
    c = 1j * (field.grid.k * field.coeffs).sum(axis=0)
    return SpectralScalarField(field.grid, c, copy=False)


def laplacian(field):
    """Multiply by -|k|^2; works for scalars and vectors."""
    return apply_multiplier(field, -field.grid.k_sq)


def leray_project(field: SpectralVectorField) -> SpectralVectorField:
    """Remove the gradient part: vhat - k (k.vhat)/|k|^2 per mode."""
    g = field.grid
    k_dot = (g.k * field.coeffs).sum(axis=0)
    c = field.coeffs - g.k * (k_dot * g.inv_k_sq)[None]
    return SpectralVectorField(g, c, divergence_free=True, copy=False)


def truncate(field, cutoff: float):
    """Zero all modes with integer-index |k| above the sharp cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    keep = field.grid.index_sq <= float(cutoff) ** 2
    if isinstance(field, SpectralScalarField):
        return SpectralScalarField(field.grid, field.coeffs * keep, copy=False)
    return SpectralVectorField(field.grid, field.coeffs * keep[None],
                               divergence_free=field.divergence_free, copy=False)


def _sq_amplitudes(field) -> np.ndarray:
    if isinstance(field, SpectralScalarField):
        return (field.coeffs.real ** 2 + field.coeffs.imag ** 2)
    return (field.coeffs.real ** 2 + field.coeffs.imag ** 2).sum(axis=0)


def sobolev_norm(field, s: float = 0.0) -> float:
    """Homogeneous H^s norm sqrt(sum |k|^(2s) |vhat|^2); s may be negative."""
    g = field.grid
    amp = _sq_amplitudes(field)[g.mode_mask]
    if s == 0.0:
        return float(np.sqrt(amp.sum()))
    weights = g.k_sq[g.mode_mask] ** s
    return float(np.sqrt((weights * amp).sum()))


def inner_product(a, b, s: float = 0.0) -> float:
    """Real H^s pairing sum |k|^(2s) ahat conj(bhat) of same-kind fields."""
    _require_same_grid(a, b)
    if type(a) is not type(b):
        raise TypeError("inner_product requires fields of the same kind")
    g = a.grid
    prod = a.coeffs * np.conj(b.coeffs)
    if isinstance(a, SpectralVectorField):
        prod = prod.sum(axis=0)
    if s != 0.0:
        weights = np.where(g.mode_mask, g.k_sq, 1.0) ** s
        prod = prod * weights
    return float(prod[g.mode_mask].sum().real)
