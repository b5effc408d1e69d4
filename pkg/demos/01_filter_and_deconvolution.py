"""Filter, inverse, and deconvolution multipliers on a small grid.

Prints the per-wavenumber symbol table, demonstrates the two-sided
bound 1 <= deconv <= min(N+1, inverse), and shows the geometric
approach of the deconvolution operator to the inverse filter: on the
unit shell each extra order halves the remaining gap.
"""

import numpy as np

from admbouss import (
    DeconvolutionSpec,
    SpectralScalarField,
    build_grid,
    check_symbols,
    deconvolve,
    helmholtz_filter,
    hermitize,
    operator_convergence,
)


def main():
    lines, ok = check_symbols(alpha=1.0, order=4, modes=8)
    print("\n".join(lines))
    print()

    grid = build_grid(2.0 * np.pi, 16)
    spec = DeconvolutionSpec(grid, alpha=1.0, order=4)
    rng = np.random.default_rng(3)
    c = np.zeros(grid.shape, dtype=np.complex128)
    c[1, 2, 0] = rng.normal() + 1j * rng.normal()
    probe = SpectralScalarField(grid, hermitize(c))

    blurred = helmholtz_filter(spec, probe)
    sharpened = deconvolve(spec, blurred)
    print("single mode |k|^2 = 5, alpha = 1:")
    print(f"  |probe|     = {np.abs(probe.coeffs[1, 2, 0]):.6f}")
    print(f"  |filtered|  = {np.abs(blurred.coeffs[1, 2, 0]):.6f}  (x 1/6)")
    print(f"  |recovered| = {np.abs(sharpened.coeffs[1, 2, 0]):.6f}  "
          f"(deconvolution of order 4 recovers most of the loss)")
    print()

    c = np.zeros(grid.shape, dtype=np.complex128)
    c[0, 0, 1] = 0.5
    c[0, 0, -1] = 0.5
    shell = SpectralScalarField(grid, c)
    errors = operator_convergence(shell, alpha=1.0, orders=range(8))
    print("unit-shell distance from the exact inverse, order by order:")
    for order, err in enumerate(errors):
        print(f"  N = {order}: {err:.8f}")
    ratios = [b / a for a, b in zip(errors, errors[1:])]
    print(f"consecutive ratios: {', '.join(f'{r:.3f}' for r in ratios)} "
          f"(alpha^2|k|^2 / (1 + alpha^2|k|^2) = 1/2 on this shell)")


if __name__ == "__main__":
    main()
