import csv
import subprocess
import sys

import numpy as np
import pytest

import cgl1d.harness as harness
from cgl1d.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, load_config_file, main
from cgl1d.errors import ConfigError, NoExactSolution, NonPhysical, UnknownProblem
from cgl1d.harness import (CSV_HEADER, ConvergenceRow, RunConfig, compare_to_reference, convergence_rows,
                           convergence_table, error_norms, format_table, read_fields_csv, run_simulation,
                           total_variation, write_fields_csv)
from cgl1d.problems import exact_solution, zone_centres, get_problem
from cgl1d.state import prim_to_cons_grid


def short_rp1(tmp_path, **kw):
    opts = dict(problem="rp1", order=5, solver="hll", n=60, t_end=0.02, out=str(tmp_path))
    opts.update(kw)
    return RunConfig(**opts)


class TestRunConfig:
    @pytest.mark.parametrize("kw", [{"order": 4}, {"solver": "roe"}, {"n": 5}, {"cfl": 0.0}, {"cfl": 2.0},
                                    {"t_end": -1.0}, {"tau": 0.0}, {"dump_every": -1},
                                    {"convergence": []}, {"convergence": [5, 10]}])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            RunConfig(**kw)

    def test_unknown_problem(self):
        with pytest.raises(UnknownProblem):
            RunConfig(problem="nope")

    def test_resolution(self):
        cfg = RunConfig(problem="rp2")
        assert (cfg.resolved_n(), cfg.resolved_t_end(), cfg.resolved_cfl()) == (800, 0.2, 0.8)
        assert cfg.resolved_tau() is None
        assert RunConfig(problem="rp2", tau=1e-8).resolved_tau() == 1e-8

    def test_solver_case(self):
        assert RunConfig(solver="HLLI").solver == "hlli"


class TestCSV:
    def test_round_trip(self, tmp_path):
        g = get_problem("alfven")
        x = zone_centres(g, 16)
        U = prim_to_cons_grid(exact_solution(g, x, 0.0), g.Bx)
        path = write_fields_csv(tmp_path / "f.csv", x, U, g.Bx)
        with path.open() as fh:
            assert tuple(next(csv.reader(fh))) == CSV_HEADER
        cols = read_fields_csv(path)
        np.testing.assert_array_equal(cols["x"], x)
        np.testing.assert_array_equal(cols["E"], U[:, 5])
        np.testing.assert_array_equal(cols["dp"], U[:, 4])
        np.testing.assert_array_equal(cols["By"], U[:, 6])

    def test_tag_column(self, tmp_path):
        path = write_fields_csv(tmp_path / "f.csv", np.zeros(3), prim_to_cons_grid(
            np.tile([1.0, 0, 0, 0, 1, 1, 1, 0], (3, 1)), 1.0), 1.0, tag="oracle")
        cols = read_fields_csv(path)
        assert cols["tag"].tolist() == ["oracle"] * 3


class TestRun:
    def test_outputs(self, tmp_path):
        res = run_simulation(short_rp1(tmp_path))
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["fields_t0.000000.csv", "fields_t0.020000.csv", "summary.txt"]
        assert res.t == pytest.approx(0.02)
        assert len(read_fields_csv(tmp_path / "fields_t0.020000.csv")["rho"]) == 60
        text = (tmp_path / "summary.txt").read_text()
        for key in ("steps", "min_rho", "outside_omega", "wall_time_s", "problem = rp1"):
            assert key in text

    def test_counters_consistent(self, tmp_path):
        s = run_simulation(short_rp1(tmp_path), write=False).summary()
        assert s["steps"] * s["stages_per_step"] == s["rhs_evaluations"]
        s = run_simulation(short_rp1(tmp_path, tau=1e-3), write=False).summary()
        assert s["steps"] * s["stages_per_step"] == s["rhs_evaluations"]

    def test_dumps(self, tmp_path):
        res = run_simulation(short_rp1(tmp_path, dump_every=2))
        csvs = [p for p in res.files if p.suffix == ".csv"]
        assert len(csvs) == 2 + (res.steps - 1) // 2

    def test_deterministic(self, tmp_path):
        run_simulation(short_rp1(tmp_path / "a", solver="hlli"))
        run_simulation(short_rp1(tmp_path / "b", solver="hlli"))
        name = "fields_t0.020000.csv"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_oracle_run(self, tmp_path):
        res = run_simulation(short_rp1(tmp_path, solver="rusanov"))
        s = res.summary()
        assert res.W[:, 0].min() > 0
        cols = read_fields_csv(res.files[0])
        assert set(cols["tag"]) == {"oracle"}
        assert "stages_per_step = 2" in (tmp_path / "summary.txt").read_text()
        assert s["rhs_evaluations"] == 2 * s["steps"]

    def test_positivity_failure_reported(self, tmp_path, monkeypatch):
        def broken(U, Bx):
            raise NonPhysical("unphysical state in zone 7", index=7)

        monkeypatch.setattr(harness, "max_signal_speed", broken)
        monkeypatch.setattr(harness, "compute_dt", lambda *a, **k: 1e-3)
        with pytest.raises(NonPhysical) as exc:
            run_simulation(short_rp1(tmp_path))
        assert exc.value.index == 7 and exc.value.time == 0.0

    def test_mass_conserved_periodic(self, tmp_path):
        res = run_simulation(RunConfig(problem="alfven", n=32, t_end=0.05), write=False)
        g = get_problem("alfven")
        U0 = prim_to_cons_grid(exact_solution(g, res.x, 0.0), g.Bx)
        for k in (0, 1, 2, 3, 5, 6, 7):
            assert abs(res.U[:, k].sum() - U0[:, k].sum()) < 1e-11 * (1 + np.abs(U0[:, k]).sum())


class TestNorms:
    def test_exact_is_zero(self):
        spec = get_problem("accuracy")
        x = zone_centres(spec, 20)
        assert error_norms(exact_solution(spec, x, 0.7), x, spec, 0.7) == (0.0, 0.0, 0.0)

    def test_values(self):
        spec = get_problem("accuracy")
        x = zone_centres(spec, 10)
        W = exact_solution(spec, x, 0.0)
        W[3, 0] += 0.5
        n = error_norms(W, x, spec, 0.0)
        assert n.l1 == pytest.approx(0.05) and n.linf == pytest.approx(0.5) and n.linf_scaled == pytest.approx(0.05)

    def test_no_exact(self):
        with pytest.raises(NoExactSolution):
            error_norms(np.ones((4, 8)), np.zeros(4), "rp1", 0.0)

    def test_orders(self):
        rows = convergence_rows([(10, 4e-2, 1e-1, 1e-2), (20, 1e-2, 2.5e-2, 1.25e-3), (40, 2.5e-3, 0.0, 1e-4)])
        assert rows[0].l1_order is None
        assert rows[1].l1_order == pytest.approx(2.0)
        assert rows[1].linf_scaled_order == pytest.approx(3.0)
        assert rows[2].linf_order is None  # undefined for a zero error

    def test_table_text(self):
        text = format_table([ConvergenceRow(10, 1e-3, 2e-3, 2e-4), ConvergenceRow(20, 1e-4, 2e-4, 1e-5, 3.32, 3.32, 4.32)],
                            "demo")
        lines = text.splitlines()
        assert lines[0] == "demo" and "L1 order" in lines[1]
        assert "3.3200" in lines[-1] and lines[-2].split()[2] == "-"

    def test_total_variation(self):
        assert total_variation(np.array([1.0, 3.0, 2.0, 2.0])) == 3.0

    def test_compare_to_reference(self):
        xr = np.linspace(0, 1, 1001)
        x = np.linspace(0.05, 0.95, 10)
        assert compare_to_reference(x, 2 * x, xr, 2 * xr) == pytest.approx(0.0, abs=1e-14)
        assert compare_to_reference(x, 2 * x + 0.1, xr, 2 * xr) == pytest.approx(0.1)


class TestConvergenceTable:
    def test_accuracy_order5(self, tmp_path):
        rows, text = convergence_table(RunConfig(problem="accuracy", order=5, t_end=0.5, out=str(tmp_path)),
                                       meshes=(10, 20, 40))
        assert [r.n for r in rows] == [10, 20, 40]
        assert rows[-1].l1_order > 4.0
        assert (tmp_path / "convergence.csv").exists()
        assert text in (tmp_path / "convergence.txt").read_text()

    def test_needs_meshes(self):
        with pytest.raises(ConfigError):
            convergence_table(RunConfig(problem="accuracy"))

    def test_needs_exact_solution(self):
        with pytest.raises(NoExactSolution):
            convergence_table(RunConfig(problem="rp1"), meshes=(10, 20))

    def test_not_for_oracle(self):
        with pytest.raises(ConfigError):
            convergence_table(RunConfig(problem="accuracy", solver="rusanov"), meshes=(10, 20))


class TestCLI:
    def test_run(self, tmp_path, capsys):
        code = main(["run", "--problem", "rp1", "--n", "40", "--t-end", "0.01", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "rp1" in capsys.readouterr().out
        assert (tmp_path / "fields_t0.010000.csv").exists()

    def test_config_file(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(f"[run]\nproblem = accuracy\norder = 5\nt_end = 0.2\nout = {tmp_path / 'o'}\n"
                       "tau = none\n\n[convergence]\nmeshes = 10,20\n")
        assert load_config_file(ini)["convergence"] == (10, 20)
        assert main(["run", "--config", str(ini)]) == EXIT_OK
        assert (tmp_path / "o" / "convergence.csv").exists()

    def test_flags_override_file(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[run]\nproblem = rp1\nn = 20\n")
        from cgl1d.cli import build_parser, config_from_args
        cfg = config_from_args(build_parser().parse_args(["run", "--config", str(ini), "--n", "30", "--tau", "1e-6"]))
        assert cfg.n == 30 and cfg.problem == "rp1" and cfg.tau == 1e-6

    @pytest.mark.parametrize("argv", [
        ["run", "--problem", "nope"],
        ["run", "--problem", "rp1", "--order", "4"],
        ["run", "--problem", "rp1", "--solver", "roe"],
        ["run", "--problem", "rp1", "--n", "3"],
        ["run", "--problem", "rp1", "--tau", "1e-8", "--no-source"],
        ["run", "--problem", "rp1", "--tau", "soon"],
        ["run", "--problem", "rp1", "--convergence", "10,20"],
        ["run", "--config", "/nonexistent.ini"],
    ])
    def test_config_errors(self, argv, capsys):
        try:
            code = main(argv)
        except SystemExit as exc:
            code = exc.code
        assert code == EXIT_CONFIG

    @pytest.mark.parametrize("text", ["[run]\ncolour = red\n", "[output]\ndir = x\n", "[run]\norder = five\n",
                                      "[convergence]\nsizes = 1\n"])
    def test_bad_config_files(self, tmp_path, text):
        ini = tmp_path / "bad.ini"
        ini.write_text(text)
        assert main(["run", "--config", str(ini)]) == EXIT_CONFIG

    def test_numerical_failure(self, tmp_path, monkeypatch, capsys):
        import cgl1d.cli as cli

        def fail(cfg):
            err = NonPhysical("unphysical state in zone 12", index=12)
            err.time = 0.5
            raise err

        monkeypatch.setattr(cli, "run_simulation", fail)
        assert main(["run", "--problem", "rp1", "--out", str(tmp_path)]) == EXIT_NUMERICAL
        assert "zone 12" in capsys.readouterr().err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "cgl1d", "run", "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "--convergence" in proc.stdout
