"""Energy ledger and verification diagnostics.

All quantities are spectral sums, so every norm here agrees with
physical-space quadrature to round-off.  The central object is the
weighted energy

    E = 1/2 (||W w||^2 + ||W rho||^2),   W = sqrt((I - a^2 Lap) D),

whose exact budget for the regularized system is

    dE/dt = -nu ||grad W w||^2 - eps ||grad W rho||^2 + (W rho e3, W w).

The density half of the budget has no source, so ||W rho||^2 decays
monotonically.  Discrete residuals of these identities are formed with
centered differences over uniformly spaced records (second-order
one-sided stencils at the ends), so a ledger refined in dt shrinks its
residual at second order or better.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .deconv import deconvolve
from .dynamics import (
    assemble_tendency,
    flux_divergence,
    padded_samples,
    tensor_divergence,
)
from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    apply_multiplier,
    sobolev_norm,
)

__all__ = [
    "EnergyRecord",
    "NormTable",
    "energy_record",
    "energy_balance_residual",
    "attach_balance_residuals",
    "a_priori_bound",
    "limit_energy_inequality",
    "mean_equation_residual",
    "norm_table",
]


@dataclass(frozen=True)
class EnergyRecord:
    """One ledger row; balance_residual is filled once a series exists."""

    time: float
    energy: float
    visc_dissipation: float
    dens_dissipation: float
    buoyancy_flux: float
    balance_residual: float = 0.0

    CSV_FIELDS = ("time", "energy", "visc_dissipation", "dens_dissipation",
                  "buoyancy_flux", "balance_residual")


def _weighted(state) -> tuple[SpectralVectorField, SpectralScalarField]:
    weight = state.params.deconv.half_weight_hat
    return (apply_multiplier(state.w, weight),
            apply_multiplier(state.rho, weight))


def energy_record(state) -> EnergyRecord:
    """Instantaneous energy, dissipation rates, and buoyancy flux."""
    ww, wr = _weighted(state)
    energy = 0.5 * (sobolev_norm(ww) ** 2 + sobolev_norm(wr) ** 2)
    visc = state.params.nu * sobolev_norm(ww, 1.0) ** 2
    dens = state.params.epsilon * sobolev_norm(wr, 1.0) ** 2
    flux = float((wr.coeffs * np.conj(ww.coeffs[2]))[state.params.grid.mode_mask]
                 .sum().real)
    return EnergyRecord(time=state.time, energy=energy, visc_dissipation=visc,
                        dens_dissipation=dens, buoyancy_flux=flux)


def _uniform_spacing(times: np.ndarray) -> float:
    gaps = np.diff(times)
    if len(gaps) < 2:
        raise ValueError("need at least 3 records to form balance residuals")
    h = float(gaps[0])
    if not np.allclose(gaps, h, rtol=1e-9, atol=0.0):
        raise ValueError("records are not uniformly spaced in time")
    return h


def _series_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order derivative estimates: centered inside, one-sided at ends."""
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    d[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    return d


def energy_balance_residual(records) -> np.ndarray:
    """Residual dE/dt + dissipations - flux per record; needs >= 3 records."""
    times = np.array([r.time for r in records])
    h = _uniform_spacing(times)
    energy = np.array([r.energy for r in records])
    dissipation = np.array([r.visc_dissipation + r.dens_dissipation
                            for r in records])
    flux = np.array([r.buoyancy_flux for r in records])
    return _series_derivative(energy, h) + dissipation - flux


def attach_balance_residuals(records) -> list:
    """Return records with their balance_residual fields populated."""
    residuals = energy_balance_residual(records)
    return [replace(r, balance_residual=float(res))
            for r, res in zip(records, residuals)]


def a_priori_bound(records, u0_norm: float, theta0_norm: float,
                   nu: float, epsilon: float):
    """Monitored energy history against the data-only ceiling.

    Returns (monitored, ceiling) arrays over the record times, where
    monitored(t) accumulates the weighted energies plus the viscous and
    twice the density dissipation integrals (trapezoid rule), and the
    ceiling is ||u0||^2 + (1 + t/nu) ||theta0||^2.
    """
    times = np.array([r.time for r in records])
    visc = np.array([r.visc_dissipation for r in records])
    dens = np.array([r.dens_dissipation for r in records])

    def running_trapezoid(y):
        out = np.zeros_like(y)
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(times))
        return out

    monitored = (2.0 * np.array([r.energy for r in records])
                 + running_trapezoid(visc) + 2.0 * running_trapezoid(dens))
    ceiling = u0_norm ** 2 + (1.0 + (times - times[0]) / nu) * theta0_norm ** 2
    return monitored, ceiling


def limit_energy_inequality(states, nu: float, tolerance: float = 0.0):
    """Slack of the unregularized-limit energy inequality per sample.

    With A the inverse filter, the limit solution satisfies
    d/dt (||A w||^2 + ||A rho||^2)/2 + nu ||grad A w||^2 <= (A rho e3, A w).
    Returns (slack array, fraction of samples with slack >= -tolerance).
    """
    times = np.array([s.time for s in states])
    h = _uniform_spacing(times)
    lifted_energy = np.empty(len(states))
    grad_sq = np.empty(len(states))
    flux = np.empty(len(states))
    for i, s in enumerate(states):
        lift = s.params.deconv.inv_filter_hat
        aw = apply_multiplier(s.w, lift)
        ar = apply_multiplier(s.rho, lift)
        lifted_energy[i] = 0.5 * (sobolev_norm(aw) ** 2 + sobolev_norm(ar) ** 2)
        grad_sq[i] = sobolev_norm(aw, 1.0) ** 2
        flux[i] = float((ar.coeffs * np.conj(aw.coeffs[2]))
                        [s.params.grid.mode_mask].sum().real)
    slack = flux - _series_derivative(lifted_energy, h) - nu * grad_sq
    fraction = float(np.mean(slack >= -tolerance))
    return slack, fraction


def mean_equation_residual(state, pressure: SpectralScalarField):
    """Dual-norm distance of a snapshot from the unregularized limit system.

    Substitutes the state into the limit equations, with the time
    derivatives taken from the regularized tendency assembler and the
    advective terms built from the lifted fields A w and A rho:

        r_w   = dw/dt + G div(A w (x) A w) - nu Lap w + grad q - rho e3,
        r_rho = drho/dt + G div(A rho . A w).

    Returns (||r_w||_{H^-1}, ||r_rho||_{H^-1}).
    """
    params = state.params
    g = params.grid
    dec = params.deconv
    tend = assemble_tendency(params, state.w, state.rho)

    # Advective terms of the limit system, built from the lifted fields.
    ax = padded_samples(g, dec.inv_filter_hat, *state.w.coeffs,
                        state.rho.coeffs)
    adv_w = tensor_divergence(g, dec.filter_hat, ax[:3])
    adv_r = flux_divergence(g, dec.filter_hat, ax[3], ax[:3])

    r_w = (tend.dw.coeffs + adv_w
           + params.nu * g.k_sq[None] * state.w.coeffs
           + 1j * g.k * pressure.coeffs[None])
    r_w[2] = r_w[2] - state.rho.coeffs
    r_rho = tend.drho.coeffs + adv_r

    rw_field = SpectralVectorField(g, r_w, copy=False)
    rr_field = SpectralScalarField(g, r_rho, copy=False)
    return sobolev_norm(rw_field, -1.0), sobolev_norm(rr_field, -1.0)


NORM_TABLE_TAGS = {
    ("w", "Linf_H0"): "O(1)",
    ("w", "L2_H1"): "O(1)",
    ("w", "Linf_H1"): "O(1/alpha)",
    ("w", "L2_H2"): "O(1/alpha)",
    ("deconv_w", "Linf_H0"): "O(1)",
    ("deconv_w", "L2_H1"): "O(1)",
    ("deconv_w", "Linf_H1"): "O(sqrt(N+1)/alpha)",
    ("deconv_w", "L2_H2"): "O(sqrt(N+1)/alpha)",
    ("dt_w", "L2_H0"): "O(1/alpha)",
    ("dt_deconv_w", "L4/3_Hneg1"): "O(1)",
    ("rho", "Linf_H0"): "O(1)",
    ("rho", "L2_H1"): "O(1/sqrt(eps))",
    ("rho", "Linf_H1"): "O(1/alpha)",
    ("rho", "L2_H2"): "O(1/(alpha sqrt(eps)))",
    ("deconv_rho", "Linf_H0"): "O(1)",
    ("deconv_rho", "L2_H1"): "O(1/sqrt(eps))",
    ("deconv_rho", "Linf_H1"): "O(sqrt(N+1)/alpha)",
    ("deconv_rho", "L2_H2"): "O(sqrt(N+1)/(alpha sqrt(eps)))",
    ("dt_rho", "L2_H0"): "O(1/alpha)",
    ("dt_deconv_rho", "L2_Hneg2"): "O(1)",
    ("half_weighted_w", "Linf_H0"): "O(1)",
    ("half_weighted_w", "L2_H1"): "O(1)",
    ("half_weighted_rho", "Linf_H0"): "O(1)",
    ("half_weighted_rho", "L2_H1"): "O(1)",
}


@dataclass
class NormTable:
    """Aggregated space-time norms with their predicted scaling tags.

    The tags are the a-priori ceilings implied by the energy estimates;
    they are annotations for the report, not asserted bounds.  The
    L4/3-in-time entry for the deconvolved momentum tendency is reported
    without any threshold.
    """

    entries: dict
    order_tags: dict

    def rows(self):
        """Deterministic (variable, norm, value, order) rows for CSV."""
        return [(var, norm, self.entries[(var, norm)],
                 self.order_tags.get((var, norm), ""))
                for (var, norm) in self.entries]


def _lp_time(times: np.ndarray, values: np.ndarray, p: float) -> float:
    return float(np.trapezoid(values ** p, times) ** (1.0 / p))


def norm_table(states, spec=None) -> NormTable:
    """Build the space-time norm table from a state series.

    Instantaneous Sobolev norms are recorded per sample, then reduced in
    time: Linf as the running max, L2 and L4/3 by trapezoid quadrature.
    Tendencies come from the assembler, so no finite differencing enters.
    """
    if not states:
        raise ValueError("norm_table needs at least one state")
    if spec is None:
        spec = states[0].params.deconv
    times = np.array([s.time for s in states])

    series = {key: np.empty(len(states)) for key in (
        ("w", 0.0), ("w", 1.0), ("w", 2.0),
        ("dw", 0.0), ("dw", 1.0), ("dw", 2.0),
        ("rho", 0.0), ("rho", 1.0), ("rho", 2.0),
        ("drho", 0.0), ("drho", 1.0), ("drho", 2.0),
        ("hw", 0.0), ("hw", 1.0), ("hr", 0.0), ("hr", 1.0),
        ("dt_w", 0.0), ("dt_dw", -1.0), ("dt_rho", 0.0), ("dt_drho", -2.0),
    )}
    for i, state in enumerate(states):
        fields = {
            "w": state.w, "rho": state.rho,
            "dw": deconvolve(spec, state.w),
            "drho": deconvolve(spec, state.rho),
            "hw": apply_multiplier(state.w, spec.half_weight_hat),
            "hr": apply_multiplier(state.rho, spec.half_weight_hat),
        }
        tend = assemble_tendency(state.params, state.w, state.rho)
        fields["dt_w"] = tend.dw
        fields["dt_rho"] = tend.drho
        fields["dt_dw"] = deconvolve(spec, tend.dw)
        fields["dt_drho"] = deconvolve(spec, tend.drho)
        for (name, s) in series:
            series[(name, s)][i] = sobolev_norm(fields[name], s)

    entries = {}
    for public, key in (("w", "w"), ("deconv_w", "dw"),
                        ("rho", "rho"), ("deconv_rho", "drho")):
        entries[(public, "Linf_H0")] = float(series[(key, 0.0)].max())
        entries[(public, "L2_H1")] = _lp_time(times, series[(key, 1.0)], 2.0)
        entries[(public, "Linf_H1")] = float(series[(key, 1.0)].max())
        entries[(public, "L2_H2")] = _lp_time(times, series[(key, 2.0)], 2.0)
    entries[("dt_w", "L2_H0")] = _lp_time(times, series[("dt_w", 0.0)], 2.0)
    entries[("dt_deconv_w", "L4/3_Hneg1")] = _lp_time(
        times, series[("dt_dw", -1.0)], 4.0 / 3.0)
    entries[("dt_rho", "L2_H0")] = _lp_time(times, series[("dt_rho", 0.0)], 2.0)
    entries[("dt_deconv_rho", "L2_Hneg2")] = _lp_time(
        times, series[("dt_drho", -2.0)], 2.0)
    entries[("half_weighted_w", "Linf_H0")] = float(series[("hw", 0.0)].max())
    entries[("half_weighted_w", "L2_H1")] = _lp_time(times, series[("hw", 1.0)], 2.0)
    entries[("half_weighted_rho", "Linf_H0")] = float(series[("hr", 0.0)].max())
    entries[("half_weighted_rho", "L2_H1")] = _lp_time(times, series[("hr", 1.0)], 2.0)

    return NormTable(entries=entries, order_tags=dict(NORM_TABLE_TAGS))
