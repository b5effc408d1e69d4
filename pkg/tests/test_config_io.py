"""Config parsing, snapshot format, run trees, and the CLI surface."""

import json
import textwrap

import numpy as np
import pytest

from admbouss import (
    ConfigError,
    DeconvolutionSpec,
    ModelParams,
    OutputError,
    build_grid,
    init_state,
    make_initial,
    parse_config,
    read_snapshot,
    run,
    family,
    resume,
    check_symbols,
    write_snapshot,
)
from admbouss.cli import main
from admbouss.snapshot import MAGIC, SnapshotFormatError

BASE = """
[grid]
modes_per_axis = 8

[physics]
nu = 0.1
alpha = 1.0
epsilon = 0.1
order = 3

[time]
dt = 0.01
t_end = 0.05

[initial]
preset = "taylor-green"

[output]
directory = "out"
"""


def tweak(**sections):
    """BASE with whole sections replaced (section = full TOML block body)."""
    doc = {
        "grid": 'modes_per_axis = 8',
        "physics": 'nu = 0.1\nalpha = 1.0\nepsilon = 0.1\norder = 3',
        "time": 'dt = 0.01\nt_end = 0.05',
        "initial": 'preset = "taylor-green"',
        "output": 'directory = "out"',
    }
    doc.update(sections)
    return "\n".join(f"[{name}]\n{body}\n" for name, body in doc.items())


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config(BASE)
        assert cfg.box_length == pytest.approx(2 * np.pi)
        assert cfg.modes_per_axis == 8
        assert cfg.truncation_radius is None
        assert cfg.cfl_safety == 0.5
        assert cfg.observer_cadence == 10
        assert cfg.snapshot_interval == 0
        assert cfg.max_workers == 1
        assert cfg.preset == "taylor-green"
        assert cfg.preset_options == {}

    def test_syntax_error_names_source(self):
        with pytest.raises(ConfigError, match="my.toml"):
            parse_config("[grid\nmodes_per_axis = 8", source="my.toml")

    @pytest.mark.parametrize("text,needle", [
        (tweak(grid=""), "grid.modes_per_axis"),
        (tweak(physics='alpha = 1.0\nepsilon = 0.1\norder = 3'), "physics.nu"),
        (tweak(grid='modes_per_axis = 8\ncolor = 3'), "grid.color"),
        (BASE + "\n[extras]\nx = 1\n", "extras"),
        (tweak(grid='modes_per_axis = 7'), "even"),
        (tweak(grid='modes_per_axis = 8\nbox_length = -1.0'), "box_length"),
        (tweak(physics='nu = 0.0\nalpha = 1.0\nepsilon = 0.1\norder = 3'),
         "physics.nu"),
        (tweak(physics='nu = 0.1\nalpha = 0.0\nepsilon = 0.1\norder = 3'),
         "physics.alpha"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon = 1.5\norder = 3'),
         "physics.epsilon"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\norder = 3'), "epsilon"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon = 0.1\n'
                       'epsilon_rule = 0.5\norder = 3'), "epsilon"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon = 0.1'), "order"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon = 0.1\norder = 3\n'
                       'orders = [1, 2, 3]'), "order"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon = 0.1\n'
                       'orders = []'), "orders"),
        (tweak(physics='nu = 0.1\nalpha = 1.0\nepsilon_rule = 0.5\n'
                       'order = 3'), "orders"),
        (tweak(time='dt = 0.0\nt_end = 0.05'), "time.dt"),
        (tweak(time='dt = 0.01\nt_end = -0.05'), "time.t_end"),
        (tweak(time='dt = 0.01\nt_end = 0.05\nobserver_cadence = 0'),
         "observer_cadence"),
        (tweak(initial='preset = "vortex-sheet"'), "preset"),
        (tweak(initial='preset = "taylor-green"\nseed = 1'), "initial.seed"),
        (tweak(initial='preset = "random-band"\namplitude = "big"'),
         "amplitude"),
        (tweak(output='directory = "out"\nsnapshot_interval = -1'),
         "snapshot_interval"),
        (tweak(physics='nu = true\nalpha = 1.0\nepsilon = 0.1\norder = 3'),
         "physics.nu"),
    ])
    def test_violations_name_their_key(self, text, needle):
        with pytest.raises(ConfigError, match=needle):
            parse_config(text)

    def test_orders_and_rule(self):
        cfg = parse_config(tweak(
            physics='nu = 0.1\nalpha = 1.0\nepsilon_rule = 0.5\n'
                    'orders = [2, 5, 10]'))
        assert cfg.orders == (2, 5, 10)
        assert cfg.epsilon_coefficient == 0.5
        assert cfg.epsilon is None
        assert cfg.order is None

    def test_preset_options_collected(self):
        cfg = parse_config(tweak(
            initial='preset = "random-band"\namplitude = 0.7\nseed = 4'))
        assert cfg.preset_options == {"amplitude": 0.7, "seed": 4}


def small_state(grid=None, time=0.375):
    grid = grid or build_grid(2 * np.pi, 8)
    spec = DeconvolutionSpec(grid, alpha=1.0, order=3)
    params = ModelParams(deconv=spec, nu=0.1, epsilon=0.1)
    u0, th0 = make_initial(grid, "random-band", {"seed": 7})
    state = init_state(params, u0, th0)
    return type(state)(w=state.w, rho=state.rho, time=time, params=params)


class TestSnapshot:
    def test_round_trip_is_bit_exact(self, tmp_path):
        state = small_state()
        path = tmp_path / "state.admb"
        write_snapshot(path, state)
        back = read_snapshot(path)
        assert np.array_equal(back.w.coeffs, state.w.coeffs)
        assert np.array_equal(back.rho.coeffs, state.rho.coeffs)
        assert back.time == state.time
        assert back.params.nu == state.params.nu
        assert back.params.epsilon == state.params.epsilon
        assert back.params.deconv.alpha == state.params.deconv.alpha
        assert back.params.deconv.order == state.params.deconv.order
        assert back.w.grid == state.w.grid
        assert back.w.divergence_free

    def test_writes_are_deterministic(self, tmp_path):
        state = small_state()
        write_snapshot(tmp_path / "a.admb", state)
        write_snapshot(tmp_path / "b.admb", state)
        assert (tmp_path / "a.admb").read_bytes() == \
            (tmp_path / "b.admb").read_bytes()

    def test_rejects_corruption(self, tmp_path):
        state = small_state()
        path = tmp_path / "state.admb"
        write_snapshot(path, state)
        blob = path.read_bytes()

        bad_magic = tmp_path / "magic.admb"
        bad_magic.write_bytes(b"NOPE!" + blob[5:])
        with pytest.raises(SnapshotFormatError):
            read_snapshot(bad_magic)

        truncated = tmp_path / "short.admb"
        truncated.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(SnapshotFormatError):
            read_snapshot(truncated)

        assert blob[: len(MAGIC)] == MAGIC


def write_config(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


class TestRunner:
    def test_run_tree(self, tmp_path):
        cfg = parse_config(BASE)
        outdir = run(cfg, out_root=tmp_path)
        assert (outdir / "manifest.json").exists()
        assert (outdir / "energy.csv").exists()
        assert (outdir / "norms.csv").exists()
        assert (outdir / "snapshots" / "final.admb").exists()
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["status"] == "ok"
        assert manifest["command"] == "run"
        assert manifest["a_priori_max_ratio"] < 1.0
        header = (outdir / "energy.csv").read_text().splitlines()[0]
        assert header == ("time,energy,visc_dissipation,dens_dissipation,"
                          "buoyancy_flux,balance_residual")

    def test_refuses_non_empty_directory(self, tmp_path):
        cfg = parse_config(BASE)
        run(cfg, out_root=tmp_path)
        with pytest.raises(OutputError):
            run(cfg, out_root=tmp_path)

    def test_env_var_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ADMBOUSS_OUTPUT_ROOT", str(tmp_path / "droot"))
        cfg = parse_config(BASE)
        outdir = run(cfg)
        assert outdir == tmp_path / "droot" / "out"
        assert (outdir / "energy.csv").exists()

    def test_command_config_cross_checks(self, tmp_path):
        family_cfg = parse_config(tweak(
            physics='nu = 0.1\nalpha = 1.0\nepsilon_rule = 0.5\n'
                    'orders = [1, 3, 7]'))
        with pytest.raises(ConfigError):
            run(family_cfg, out_root=tmp_path)
        single_cfg = parse_config(BASE)
        with pytest.raises(ConfigError):
            family(single_cfg, out_root=tmp_path)

    def test_identical_runs_are_byte_identical(self, tmp_path):
        cfg_a = parse_config(tweak(output='directory = "a"\n'
                                          'snapshot_interval = 2'))
        cfg_b = parse_config(tweak(output='directory = "b"\n'
                                          'snapshot_interval = 2'))
        out_a = run(cfg_a, out_root=tmp_path)
        out_b = run(cfg_b, out_root=tmp_path)
        for name in ("energy.csv", "norms.csv", "snapshots/final.admb",
                     "snapshots/snap_000000.admb"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_resume_continues_bit_exactly(self, tmp_path):
        full_cfg = parse_config(tweak(
            time='dt = 0.01\nt_end = 0.08\nobserver_cadence = 2',
            output='directory = "full"\nsnapshot_interval = 2'))
        out_full = run(full_cfg, out_root=tmp_path)
        mid = out_full / "snapshots" / "snap_000002.admb"
        assert mid.exists()

        resume_cfg = parse_config(tweak(
            time='dt = 0.01\nt_end = 0.08\nobserver_cadence = 2',
            output='directory = "cont"'))
        out_cont = resume(mid, resume_cfg, out_root=tmp_path)
        assert (out_full / "snapshots" / "final.admb").read_bytes() == \
            (out_cont / "snapshots" / "final.admb").read_bytes()

    def test_resume_rejects_mismatched_physics(self, tmp_path):
        cfg = parse_config(tweak(output='directory = "full"\n'
                                        'snapshot_interval = 2'))
        out_full = run(cfg, out_root=tmp_path)
        other = parse_config(tweak(
            physics='nu = 0.2\nalpha = 1.0\nepsilon = 0.1\norder = 3',
            output='directory = "cont"'))
        with pytest.raises(ConfigError, match="nu"):
            resume(out_full / "snapshots" / "snap_000000.admb", other,
                   out_root=tmp_path)

    def test_family_tree(self, tmp_path):
        cfg = parse_config(tweak(
            physics='nu = 0.1\nalpha = 1.0\nepsilon_rule = 0.5\n'
                    'orders = [1, 3, 7]',
            initial='preset = "random-band"',
            time='dt = 0.02\nt_end = 0.1\nobserver_cadence = 1',
            output='directory = "fam"'))
        outdir = family(cfg, out_root=tmp_path)
        lines = (outdir / "convergence.csv").read_text().splitlines()
        assert len(lines) == 4
        assert lines[0].startswith("order,epsilon,operator_error")
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["complete"] is True
        assert manifest["reference_order"] == 7

    def test_failed_run_leaves_failed_manifest(self, tmp_path):
        cfg = parse_config(tweak(
            initial='preset = "random-band"\namplitude = 50.0',
            time='dt = 0.05\nt_end = 1.0'))
        from admbouss import CflError
        with pytest.raises(CflError):
            run(cfg, out_root=tmp_path)
        outdir = tmp_path / "out"
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["status"].startswith("failed: CflError")
        assert (outdir / "energy.csv").exists()
        assert (outdir / "snapshots" / "abort.admb").exists()

    def test_check_symbols_table(self):
        lines, ok = check_symbols(alpha=1.0, order=4, modes=8)
        assert ok
        assert "satisfy" in lines[-1]
        grid = build_grid(2 * np.pi, 8)
        distinct = np.unique(grid.index_sq[grid.mode_mask]).size
        assert len(lines) == distinct + 3  # title, header, verdict


class TestCli:
    def test_run_prints_output_directory(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE)
        code = main(["run", str(cfg), "--output-root", str(tmp_path)])
        assert code == 0
        printed = capsys.readouterr().out.strip()
        assert printed == str(tmp_path / "out")

    def test_exit_codes(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "missing.toml")]) == 4
        bad = write_config(tmp_path, "[grid\nbroken", name="bad.toml")
        assert main(["run", str(bad)]) == 2
        cfl = write_config(tmp_path, tweak(
            initial='preset = "random-band"\namplitude = 50.0',
            time='dt = 0.05\nt_end = 1.0'), name="cfl.toml")
        assert main(["run", str(cfl), "--output-root",
                     str(tmp_path / "r1")]) == 3
        capsys.readouterr()

    def test_non_empty_output_is_io_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE)
        assert main(["run", str(cfg), "--output-root", str(tmp_path)]) == 0
        assert main(["run", str(cfg), "--output-root", str(tmp_path)]) == 4
        err = capsys.readouterr().err
        assert "non-empty" in err

    def test_check_symbols_command(self, capsys):
        code = main(["check-symbols", "--alpha", "1.0", "--order", "3",
                     "--modes", "8"])
        assert code == 0
        out = capsys.readouterr().out
        assert "satisfy" in out

    def test_family_and_resume_commands(self, tmp_path, capsys):
        fam = write_config(tmp_path, tweak(
            physics='nu = 0.1\nalpha = 1.0\nepsilon_rule = 0.5\n'
                    'orders = [1, 3, 7]',
            initial='preset = "random-band"',
            time='dt = 0.02\nt_end = 0.1\nobserver_cadence = 1',
            output='directory = "fam"'), name="fam.toml")
        assert main(["family", str(fam), "--output-root", str(tmp_path)]) == 0

        base = write_config(tmp_path, tweak(
            output='directory = "full"\nsnapshot_interval = 2'),
            name="base.toml")
        assert main(["run", str(base), "--output-root", str(tmp_path)]) == 0
        cont = write_config(tmp_path, tweak(output='directory = "cont"'),
                            name="cont.toml")
        snap = tmp_path / "full" / "snapshots" / "snap_000000.admb"
        assert main(["resume", str(snap), str(cont),
                     "--output-root", str(tmp_path)]) == 0
        capsys.readouterr()

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        from admbouss import __version__
        assert __version__ in capsys.readouterr().out
