"""Acceptance suite: one test per advertised guarantee.

Run `python3 -m pytest tests/test_acceptance.py -v` to get a pass/fail
line per criterion; every test also prints its measured margins, which
pytest shows on failure (or with -s).
"""

import numpy as np
import pytest

from admbouss import (
    DeconvolutionSpec,
    FamilyPlan,
    ModelParams,
    StepControl,
    a_priori_bound,
    apply_multiplier,
    assemble_tendency,
    attach_balance_residuals,
    build_grid,
    check_symbols,
    deconvolve,
    explicit_force,
    init_state,
    inner_product,
    integrate,
    limit_energy_inequality,
    make_initial,
    parse_config,
    resume,
    run,
    run_family,
    sobolev_norm,
)
from conftest import iterative_deconvolve, random_scalar, random_vector


@pytest.fixture(scope="module")
def grid16():
    return build_grid(2.0 * np.pi, 16)


@pytest.fixture(scope="module")
def vortex_study(grid16):
    """Planar-vortex decay marched to t=1 at dt, dt/2, dt/4.

    Returns the per-dt ledger residual maxima plus, for the finest dt,
    the full records and the weighted density energy history.
    """
    spec = DeconvolutionSpec(grid16, alpha=1.0, order=5)
    params = ModelParams(deconv=spec, nu=0.1, epsilon=0.1)
    u0, theta0 = make_initial(grid16, "taylor-green", {})
    maxima = []
    for dt in (0.01, 0.005, 0.0025):
        dens = []

        def track(state):
            weighted = apply_multiplier(state.rho,
                                        state.params.deconv.half_weight_hat)
            dens.append(0.5 * sobolev_norm(weighted) ** 2)

        control = StepControl(dt=dt, t_end=1.0, observer_cadence=1)
        _, records = integrate(init_state(params, u0, theta0), control,
                               observers=(track,))
        records = attach_balance_residuals(records)
        maxima.append(max(abs(r.balance_residual) for r in records))
    return params, u0, theta0, maxima, records, np.array(dens)


@pytest.fixture(scope="module")
def family_study(grid16):
    """Order family on band-limited data with epsilon = 0.5/(N+1)."""
    u0, theta0 = make_initial(grid16, "random-band", {})
    plan = FamilyPlan(u0=u0, theta0=theta0, alpha=1.0, nu=0.1,
                      orders=(2, 5, 10, 20, 40),
                      control=StepControl(dt=0.0125, t_end=0.5,
                                          observer_cadence=1),
                      epsilon_coefficient=0.5)
    return run_family(plan, keep_members=True)


def test_01_symbol_bounds():
    grid = build_grid(2.0 * np.pi, 32)
    mask = grid.mode_mask
    worst = 0.0
    for alpha in (0.1, 1.0, 2.0):
        for order in (0, 1, 5, 20):
            spec = DeconvolutionSpec(grid, alpha=alpha, order=order)
            spec.validate()
            d = spec.deconv_hat[mask]
            cap = np.minimum(order + 1.0, spec.inv_filter_hat[mask])
            assert d.min() >= 1.0 - 1e-12
            assert (d - cap).max() <= 1e-12
            worst = max(worst, 1.0 - d.min(), (d - cap).max())
            _, ok = check_symbols(alpha, order, modes=8)
            assert ok
    print(f"symbol bounds: 12 (alpha, order) pairs on 32^3, "
          f"worst violation {worst:.1e}")


def test_02_closed_form_matches_iteration(grid16):
    f = random_scalar(grid16, seed=11)
    v = random_vector(grid16, seed=12)
    worst = 0.0
    for order in range(21):
        spec = DeconvolutionSpec(grid16, alpha=0.7, order=order)
        for field in (f, v):
            fast = deconvolve(spec, field)
            slow = iterative_deconvolve(spec, field, order)
            err = np.abs(fast.coeffs - slow.coeffs).max()
            scale = np.abs(slow.coeffs).max()
            assert err <= 1e-12 * scale
            worst = max(worst, err / scale)
    print(f"closed form vs iteration: orders 0..20, worst rel {worst:.1e}")


def test_03_operator_limit_halves_per_order():
    from admbouss import SpectralScalarField, operator_convergence
    grid = build_grid(2.0 * np.pi, 8)
    c = np.zeros((8, 8, 8), dtype=np.complex128)
    c[1, 0, 0] = 0.5
    c[-1, 0, 0] = 0.5
    probe = SpectralScalarField(grid, c)
    errors = operator_convergence(probe, alpha=1.0, orders=range(31))
    ratios = np.array(errors[1:]) / np.array(errors[:-1])
    assert np.abs(ratios - 0.5).max() <= 1e-10
    print(f"operator limit: 30 consecutive ratios, worst |ratio-1/2| "
          f"{np.abs(ratios - 0.5).max():.1e}")


def test_04_trilinear_cancellations(grid16):
    from admbouss import density_nonlinear, momentum_nonlinear
    spec = DeconvolutionSpec(grid16, alpha=0.8, order=4)
    params = ModelParams(deconv=spec, nu=0.05, epsilon=0.1)
    pairing = spec.inv_filter_hat * spec.deconv_hat
    worst = 0.0
    for seed in range(10):
        w = random_vector(grid16, seed=100 + seed)
        rho = random_scalar(grid16, seed=200 + seed)
        nl_w = momentum_nonlinear(params, w)
        test_w = apply_multiplier(w, pairing)
        rel_w = abs(inner_product(nl_w, test_w)) / (
            sobolev_norm(nl_w) * sobolev_norm(test_w))
        nl_r = density_nonlinear(params, rho, w)
        test_r = apply_multiplier(rho, pairing)
        rel_r = abs(inner_product(nl_r, test_r)) / (
            sobolev_norm(nl_r) * sobolev_norm(test_r))
        assert rel_w <= 1e-10
        assert rel_r <= 1e-10
        worst = max(worst, rel_w, rel_r)
    print(f"trilinear cancellations: 10 states, worst rel {worst:.1e}")


def test_05_energy_ledger_second_order(vortex_study):
    _, _, _, maxima, records, _ = vortex_study
    e0 = records[0].energy
    orders = [float(np.log2(a / b)) for a, b in zip(maxima, maxima[1:])]
    print(f"energy ledger: residual maxima {[f'{m:.3e}' for m in maxima]}, "
          f"orders {[f'{o:.3f}' for o in orders]}, "
          f"finest/E0 {maxima[-1] / e0:.2e} (need <= 1e-6)")
    assert all(o >= 1.9 for o in orders)
    assert maxima[-1] <= 1e-6 * e0


def test_06_a_priori_ceiling(vortex_study):
    params, u0, theta0, _, records, _ = vortex_study
    monitored, ceiling = a_priori_bound(records, sobolev_norm(u0),
                                        sobolev_norm(theta0),
                                        params.nu, params.epsilon)
    ratio = float((monitored / ceiling).max())
    print(f"a priori ceiling: max monitored/ceiling {ratio:.4f} "
          f"(need <= 0.99)")
    assert ratio <= 0.99


def test_07_density_energy_never_increases(vortex_study):
    _, _, _, _, _, dens = vortex_study
    rises = np.diff(dens)
    print(f"density energy: {dens.size} samples, largest rise "
          f"{rises.max():.2e} vs 1e-8*initial {1e-8 * dens[0]:.2e}")
    assert rises.max() <= 1e-8 * dens[0]


def test_08_family_convergence_program(family_study):
    report, members = family_study
    assert report.complete
    assert report.reference_order == 40

    op = report.operator_errors
    assert all(b < a for a, b in zip(op, op[1:]))
    res = report.residual_total
    assert all(b < a for a, b in zip(res, res[1:]))
    diff = report.diff_w_l2_h1
    assert diff[-1] == 0.0
    assert all(b < a for a, b in zip(diff, diff[1:]))

    reference = members[-1]
    e0 = reference.records[0].energy
    slack, fraction = limit_energy_inequality(reference.states, nu=0.1,
                                              tolerance=1e-6 * e0)
    print(f"family program: orders {report.orders}, "
          f"diff_w_l2_h1 {[f'{d:.3e}' for d in diff]}, "
          f"residual_total {[f'{r:.3e}' for r in res]}, "
          f"slack min {slack.min():.3e} vs floor {-1e-6 * e0:.1e}")
    assert slack.min() >= -1e-6 * e0
    assert fraction == 1.0


DETERMINISM_CONFIG = """
[grid]
modes_per_axis = 16

[physics]
nu = 0.1
alpha = 1.0
epsilon = 0.1
order = 5

[time]
dt = 0.01
t_end = 0.06
observer_cadence = 2

[initial]
preset = "random-band"

[output]
directory = "%s"
snapshot_interval = 1
"""


def test_09_determinism_and_bit_exact_resume(tmp_path):
    out_a = run(parse_config(DETERMINISM_CONFIG % "a"), out_root=tmp_path)
    out_b = run(parse_config(DETERMINISM_CONFIG % "b"), out_root=tmp_path)
    for name in ("energy.csv", "norms.csv", "snapshots/final.admb"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    mid = out_a / "snapshots" / "snap_000001.admb"
    out_c = resume(mid, parse_config(DETERMINISM_CONFIG % "c"),
                   out_root=tmp_path)
    final_a = (out_a / "snapshots" / "final.admb").read_bytes()
    final_c = (out_c / "snapshots" / "final.admb").read_bytes()
    assert final_a == final_c
    print("determinism: ledgers and final snapshots byte-identical; "
          "resume bit-exact")


def test_10_pressure_route_matches_projection(grid16):
    spec = DeconvolutionSpec(grid16, alpha=1.0, order=5)
    params = ModelParams(deconv=spec, nu=0.1, epsilon=0.1)
    ksq = grid16.k_sq
    worst = 0.0
    for seed in range(3):
        w = random_vector(grid16, seed=300 + seed)
        rho = random_scalar(grid16, seed=400 + seed)
        tend = assemble_tendency(params, w, rho)
        fw, fr = explicit_force(params, w, rho)
        via_pressure = tend.dw.coeffs + params.nu * ksq[None] * w.coeffs
        err = np.abs(via_pressure - fw.coeffs).max()
        scale = np.abs(fw.coeffs).max()
        assert err <= 1e-12 * scale
        worst = max(worst, err / scale)
        via_assemble = tend.drho.coeffs + params.epsilon * ksq * rho.coeffs
        assert np.abs(via_assemble - fr.coeffs).max() <= 1e-12 * scale
    print(f"pressure vs projection: 3 states, worst rel {worst:.1e}")
