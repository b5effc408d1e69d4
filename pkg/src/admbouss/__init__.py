"""Spectral solver for a deconvolution-regularized Boussinesq system.

The package provides, bottom up: truncated Fourier representations on
the periodic box with dealiased products (`spectral`), the Helmholtz
filter and its van Cittert deconvolution (`deconv`), the regularized
Boussinesq tendencies (`dynamics`), a low-storage RK3 integrator with
exact diffusion factors (`stepping`), energy ledgers and norm tables
(`diagnostics`), order-family convergence studies (`convergence`), and
an experiment layer of configs, snapshots, and a CLI (`config`,
`snapshot`, `runner`, `cli`).
"""

__version__ = "0.1.0"

from .spectral import (
    TorusGrid,
    SpectralScalarField,
    SpectralVectorField,
    build_grid,
    hermitize,
    zero_scalar,
    zero_vector,
    to_physical,
    scalar_from_physical,
    vector_from_physical,
    apply_multiplier,
    gradient,
    divergence,
    laplacian,
    leray_project,
    truncate,
    sobolev_norm,
    inner_product,
)
from .deconv import (
    DeconvolutionSpec,
    filter_symbol,
    inverse_filter_symbol,
    deconv_symbol,
    helmholtz_filter,
    apply_inverse_filter,
    deconvolve,
    apply_half_powers,
)
from .dynamics import (
    ModelParams,
    Tendency,
    momentum_nonlinear,
    density_nonlinear,
    pressure_solve,
    buoyancy_field,
    explicit_force,
    assemble_tendency,
)
from .stepping import (
    SolverState,
    StepControl,
    CflError,
    init_state,
    cfl_limit,
    step,
    integrate,
)
from .diagnostics import (
    EnergyRecord,
    energy_record,
    energy_balance_residual,
    attach_balance_residuals,
    a_priori_bound,
    limit_energy_inequality,
    mean_equation_residual,
    NormTable,
    norm_table,
)
from .convergence import (
    FamilyPlan,
    MemberRun,
    ConvergenceReport,
    operator_convergence,
    run_family,
    cauchy_check,
)
from .initial import (
    PRESETS,
    taylor_green,
    single_mode_scalar,
    random_band_scalar,
    random_band_vector,
    make_initial,
)
from .config import ConfigError, RunConfig, parse_config, load_config
from .snapshot import SnapshotFormatError, write_snapshot, read_snapshot
from .runner import (
    OutputError,
    FamilyError,
    run,
    family,
    resume,
    check_symbols,
)

__all__ = [
    "__version__",
    # spectral
    "TorusGrid", "SpectralScalarField", "SpectralVectorField", "build_grid",
    "hermitize", "zero_scalar", "zero_vector", "to_physical",
    "scalar_from_physical", "vector_from_physical", "apply_multiplier",
    "gradient", "divergence", "laplacian", "leray_project", "truncate",
    "sobolev_norm", "inner_product",
    # deconv
    "DeconvolutionSpec", "filter_symbol", "inverse_filter_symbol",
    "deconv_symbol", "helmholtz_filter", "apply_inverse_filter",
    "deconvolve", "apply_half_powers",
    # dynamics
    "ModelParams", "Tendency", "momentum_nonlinear", "density_nonlinear",
    "pressure_solve", "buoyancy_field", "explicit_force", "assemble_tendency",
    # stepping
    "SolverState", "StepControl", "CflError", "init_state", "cfl_limit",
    "step", "integrate",
    # diagnostics
    "EnergyRecord", "energy_record", "energy_balance_residual",
    "attach_balance_residuals", "a_priori_bound", "limit_energy_inequality",
    "mean_equation_residual", "NormTable", "norm_table",
    # convergence
    "FamilyPlan", "MemberRun", "ConvergenceReport", "operator_convergence",
    "run_family", "cauchy_check",
    # initial data
    "PRESETS", "taylor_green", "single_mode_scalar", "random_band_scalar",
    "random_band_vector", "make_initial",
    # experiments
    "ConfigError", "RunConfig", "parse_config", "load_config",
    "SnapshotFormatError", "write_snapshot", "read_snapshot",
    "OutputError", "FamilyError", "run", "family", "resume", "check_symbols",
]
