"""Joint-limit verification: operator probes and solution families.

The regularized system approaches the unfiltered Boussinesq system when
the deconvolution order N grows while the density diffusivity epsilon
shrinks.  This module drives that program numerically: it runs a family
of solves over increasing N with epsilon tied to N by a decreasing rule
(default epsilon0 / (N + 1)), measures trajectory differences against
the largest-N member as reference, and aggregates the dual-norm
residuals of the limit equations per member.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .deconv import DeconvolutionSpec, deconv_symbol
from .diagnostics import mean_equation_residual
from .dynamics import ModelParams, pressure_solve
from .spectral import (
    SpectralScalarField,
    SpectralVectorField,
    apply_multiplier,
    sobolev_norm,
)
from .stepping import StepControl, init_state, integrate

__all__ = [
    "FamilyPlan",
    "MemberRun",
    "ConvergenceReport",
    "operator_convergence",
    "run_family",
    "cauchy_check",
]


def operator_convergence(probe, alpha: float, orders, s: float = 1.0):
    """Relative H^s distance of each deconvolution order from the lift.

    For every order N returns ||D_N probe - A probe||_s / ||A probe||_s,
    where A is the inverse filter; on a single mode consecutive errors
    shrink by exactly alpha^2 |k|^2 / (1 + alpha^2 |k|^2).
    """
    g = probe.grid
    lift = 1.0 + alpha * alpha * g.k_sq
    denom = sobolev_norm(apply_multiplier(probe, lift), s)
    if denom == 0.0:
        raise ValueError("probe field is zero")
    errors = []
    for order in orders:
        gap = lift - deconv_symbol(alpha, int(order), g.k_sq)
        errors.append(sobolev_norm(apply_multiplier(probe, gap), s) / denom)
    return tuple(errors)


@dataclass(frozen=True)
class FamilyPlan:
    """Shared data and schedule for a family of solves over orders.

    epsilon follows epsilon_coefficient / (N + 1), which is strictly
    decreasing in N and stays inside (0, 1) whenever the coefficient
    does.  allow_degenerate permits repeated orders (used to check that
    identical members produce bit-identical results).
    """

    u0: SpectralVectorField
    theta0: SpectralScalarField
    alpha: float
    nu: float
    orders: tuple
    control: StepControl
    epsilon_coefficient: float = 0.5
    allow_degenerate: bool = False
    max_workers: int = 1

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        if not self.allow_degenerate:
            if len(orders) < 3:
                raise ValueError("a family needs at least 3 orders")
            if any(b <= a for a, b in zip(orders, orders[1:])):
                raise ValueError(f"orders must be strictly increasing, got {orders}")
        if not 0 < self.epsilon_coefficient < 1:
            raise ValueError("epsilon_coefficient must lie in (0, 1)")
        if self.max_workers < 1:
            raise ValueError("max_workers must be at least 1")

    def epsilon_of(self, order: int) -> float:
        return self.epsilon_coefficient / (order + 1)


@dataclass(frozen=True)
class MemberRun:
    """One family member: sampled trajectory and limit residuals."""

    order: int
    epsilon: float
    times: np.ndarray
    states: tuple
    records: tuple
    residual_w: np.ndarray
    residual_rho: np.ndarray


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-member aggregates of the family run.

    Differences are against the largest-order member; its own row holds
    zeros.  Residual columns are L2-in-time aggregates of the dual-norm
    limit-equation residuals.  An incomplete report keeps whatever
    members finished and leaves the difference columns as None.
    """

    orders: tuple
    epsilons: tuple
    operator_errors: tuple
    residual_w: tuple
    residual_rho: tuple
    residual_total: tuple
    diff_w_l2_h1: tuple | None
    diff_w_linf_h1: tuple | None
    diff_w_l4_h1: tuple | None
    diff_rho_l2_l2: tuple | None
    reference_order: int | None
    complete: bool
    failure: str | None = None

    CSV_FIELDS = ("order", "epsilon", "operator_error", "residual_w",
                  "residual_rho", "residual_total", "diff_w_l2_h1",
                  "diff_w_linf_h1", "diff_w_l4_h1", "diff_rho_l2_l2")

    def rows(self):
        out = []
        for i, order in enumerate(self.orders):
            def col(t):
                return t[i] if t is not None else ""
            out.append((order, self.epsilons[i], self.operator_errors[i],
                        self.residual_w[i], self.residual_rho[i],
                        self.residual_total[i], col(self.diff_w_l2_h1),
                        col(self.diff_w_linf_h1), col(self.diff_w_l4_h1),
                        col(self.diff_rho_l2_l2)))
        return out


def _run_member(plan: FamilyPlan, order: int) -> MemberRun:
    grid = plan.u0.grid
    spec = DeconvolutionSpec(grid, plan.alpha, order)
    params = ModelParams(deconv=spec, nu=plan.nu,
                         epsilon=plan.epsilon_of(order))
    state = init_state(params, plan.u0, plan.theta0)

    samples = []
    _, records = integrate(state, plan.control, observers=(samples.append,))

    res_w = np.empty(len(samples))
    res_r = np.empty(len(samples))
    for i, s in enumerate(samples):
        q = pressure_solve(params, s.rho, s.w)
        res_w[i], res_r[i] = mean_equation_residual(s, q)
    times = np.array([s.time for s in samples])
    return MemberRun(order=order, epsilon=params.epsilon, times=times,
                     states=tuple(samples), records=tuple(records),
                     residual_w=res_w, residual_rho=res_r)


def _l2_time(times, values):
    return float(np.sqrt(np.trapezoid(np.asarray(values) ** 2, times)))


def _trajectory_differences(member: MemberRun, reference: MemberRun):
    if not np.array_equal(member.times, reference.times):
        raise ValueError("family members sampled at different times")
    h1 = np.array([sobolev_norm(a.w - b.w, 1.0)
                   for a, b in zip(member.states, reference.states)])
    l2 = np.array([sobolev_norm(a.rho - b.rho, 0.0)
                   for a, b in zip(member.states, reference.states)])
    t = member.times
    return {
        "w_l2_h1": _l2_time(t, h1),
        "w_linf_h1": float(h1.max()),
        "w_l4_h1": float(np.trapezoid(h1 ** 4, t) ** 0.25),
        "rho_l2_l2": _l2_time(t, l2),
    }


def run_family(plan: FamilyPlan, keep_members: bool = False):
    """Run one solve per order and assemble the convergence report.

    Members are independent and may run on a bounded worker pool; the
    report is assembled in plan order either way, so the result is
    deterministic.  A failed member yields an incomplete report holding
    the members that did finish.

    Returns the report, or (report, members) when keep_members is set.
    """
    outcomes = {}
    if plan.max_workers > 1:
        with ThreadPoolExecutor(max_workers=plan.max_workers) as pool:
            futures = {order: pool.submit(_run_member, plan, order)
                       for order in plan.orders}
            for order, fut in futures.items():
                try:
                    outcomes[order] = fut.result()
                except Exception as exc:
                    outcomes[order] = exc
    else:
        for order in plan.orders:
            try:
                outcomes[order] = _run_member(plan, order)
            except Exception as exc:
                outcomes[order] = exc
                break

    members = []
    failure = None
    for order in plan.orders:
        got = outcomes.get(order)
        if isinstance(got, MemberRun):
            members.append(got)
        else:
            failure = f"order {order}: {got!r}" if got is not None else \
                f"order {order}: not run"
            break
    complete = failure is None

    done_orders = tuple(m.order for m in members)
    operator_errors = operator_convergence(plan.u0, plan.alpha, done_orders) \
        if done_orders else ()
    residual_w = tuple(_l2_time(m.times, m.residual_w) for m in members)
    residual_rho = tuple(_l2_time(m.times, m.residual_rho) for m in members)
    residual_total = tuple(
        float(np.sqrt(np.trapezoid(m.residual_w ** 2 + m.residual_rho ** 2,
                                   m.times)))
        for m in members)

    diffs = {"w_l2_h1": None, "w_linf_h1": None, "w_l4_h1": None,
             "rho_l2_l2": None}
    reference_order = None
    if complete and members:
        reference = members[-1]
        reference_order = reference.order
        cols = [_trajectory_differences(m, reference) for m in members]
        diffs = {key: tuple(c[key] for c in cols) for key in cols[0]}

    report = ConvergenceReport(
        orders=done_orders,
        epsilons=tuple(m.epsilon for m in members),
        operator_errors=operator_errors,
        residual_w=residual_w,
        residual_rho=residual_rho,
        residual_total=residual_total,
        diff_w_l2_h1=diffs["w_l2_h1"],
        diff_w_linf_h1=diffs["w_linf_h1"],
        diff_w_l4_h1=diffs["w_l4_h1"],
        diff_rho_l2_l2=diffs["rho_l2_l2"],
        reference_order=reference_order,
        complete=complete,
        failure=failure)
    if keep_members:
        return report, members
    return report


def cauchy_check(report: ConvergenceReport, tol_w: float = 1e-2,
                 tol_rho: float = 1e-2):
    """Monotone-approach check against the reference member.

    Passes when the velocity L2(I;H1) and density L2(I;L2) differences
    are strictly decreasing over the non-reference members and the last
    of each sits below its tolerance.  Raises on incomplete reports.
    """
    if not report.complete:
        raise ValueError(f"report is incomplete: {report.failure}")
    if len(report.orders) < 3:
        raise ValueError("cauchy check needs at least 3 members")
    dw = report.diff_w_l2_h1[:-1]
    dr = report.diff_rho_l2_l2[:-1]
    monotone_w = all(b < a for a, b in zip(dw, dw[1:]))
    monotone_rho = all(b < a for a, b in zip(dr, dr[1:]))
    small_w = dw[-1] < tol_w
    small_rho = dr[-1] < tol_rho
    ok = monotone_w and monotone_rho and small_w and small_rho
    summary = (f"w differences {'decrease' if monotone_w else 'DO NOT decrease'}"
               f" to {dw[-1]:.3e} (tol {tol_w:g});"
               f" rho differences {'decrease' if monotone_rho else 'DO NOT decrease'}"
               f" to {dr[-1]:.3e} (tol {tol_rho:g})")
    return ok, summary
