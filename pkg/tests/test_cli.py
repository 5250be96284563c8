"""Command-line behaviour: outputs, file artifacts, exit codes."""

import json

import numpy as np
import pytest

from bntrace import cli
from bntrace.attack import read_curve_dat
from bntrace.bn import load_model, sample, save_model
from bntrace.dataset import load_csv, write_csv


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, strong_generator):
    """Model JSON plus population/pool/reference/non-member CSVs."""
    root = tmp_path_factory.mktemp("cli")
    generator = strong_generator(8, 2, 10, seed=1)
    save_model(generator, root / "generator.json")
    population = sample(generator, 1500, seed=2)
    write_csv(population, root / "population.csv")
    write_csv(population.take(range(150)), root / "pool.csv")
    write_csv(population.take(range(150, 650)), root / "reference.csv")
    write_csv(population.take(range(650, 1150)), root / "nonmembers.csv")
    return root


class TestComplexity:
    def test_prints_parameter_count(self, workspace, capsys):
        assert cli.main(["complexity", "--model", str(workspace / "generator.json")]) == 0
        out = capsys.readouterr().out.strip()
        model = load_model(workspace / "generator.json")
        from bntrace.bn import complexity

        assert out == str(complexity(model.structure))

    def test_missing_model_is_a_usage_error(self, workspace, capsys):
        assert cli.main(["complexity", "--model", str(workspace / "nope.json")]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestBound:
    def test_prints_auc(self, capsys):
        assert cli.main(["bound", "--complexity", "446", "--pool-size", "3000"]) == 0
        out = capsys.readouterr().out
        assert "theoretical AUC: 0.607436" in out

    def test_writes_curve_and_figure(self, tmp_path, capsys):
        out = tmp_path / "bound.dat"
        code = cli.main(
            ["bound", "--complexity", "50", "--pool-size", "1000", "--out", str(out)]
        )
        assert code == 0
        alphas, betas = read_curve_dat(out)
        assert alphas.size == 200  # the default logarithmic grid
        assert alphas[0] == pytest.approx(0.001) and alphas[-1] == 1.0
        assert np.all(np.diff(alphas) >= 0)
        assert (tmp_path / "bound.png").exists()
        stdout = capsys.readouterr().out
        assert f"wrote {out}" in stdout

    def test_no_figure_flag(self, tmp_path, capsys):
        out = tmp_path / "bound.dat"
        code = cli.main(
            ["bound", "--complexity", "50", "--pool-size", "1000",
             "--out", str(out), "--no-figure"]
        )
        assert code == 0
        assert out.exists()
        assert not (tmp_path / "bound.png").exists()

    def test_gdp_cap_reported(self, capsys):
        code = cli.main(
            ["bound", "--complexity", "400", "--pool-size", "100", "--gdp-mu", "1.0"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "gdp_mu: 1" in out
        # Capped separation min(2, 1) = 1 gives Phi(1/sqrt(2)).
        assert "theoretical AUC: 0.760250" in out

    def test_negative_complexity_rejected(self, capsys):
        assert cli.main(["bound", "--complexity", "-1", "--pool-size", "10"]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestLearn:
    def test_learns_and_saves_model(self, workspace, tmp_path, capsys):
        out = tmp_path / "released.json"
        code = cli.main(
            ["learn", "--data", str(workspace / "pool.csv"), "--eta", "2",
             "--out", str(out)]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "complexity:" in stdout and f"wrote {out}" in stdout
        model = load_model(out)
        data = load_csv(workspace / "pool.csv")
        assert model.names == data.attribute_names

    def test_low_support_warning_on_stderr(self, workspace, tmp_path, capsys):
        out = tmp_path / "released.json"
        code = cli.main(
            ["learn", "--data", str(workspace / "pool.csv"), "--eta", "2",
             "--min-support", "1000", "--out", str(out)]
        )
        assert code == 0
        assert "support below 1000" in capsys.readouterr().err

    def test_schema_widens_value_space(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        data.write_text("a,b\n0,0\n1,1\n0,1\n1,0\n")
        schema = tmp_path / "wide.schema"
        schema.write_text("b 3\n")
        out = tmp_path / "m.json"
        code = cli.main(
            ["learn", "--data", str(data), "--eta", "0", "--schema", str(schema),
             "--out", str(out)]
        )
        assert code == 0
        assert load_model(out).structure.cardinalities == (2, 3)


class TestSynthesize:
    def test_writes_rows_and_schema_sidecar(self, workspace, tmp_path, capsys):
        out = tmp_path / "synthetic.csv"
        code = cli.main(
            ["synthesize", "--data", str(workspace / "population.csv"),
             "--eta", "2", "--count", "120", "--seed", "9", "--out", str(out)]
        )
        assert code == 0
        assert "wrote 120 synthetic records" in capsys.readouterr().out
        synthetic = load_csv(out)
        assert synthetic.row_count == 120
        assert (tmp_path / "synthetic.csv.schema").exists()
        source = load_csv(workspace / "population.csv")
        assert synthetic.cardinalities == source.cardinalities


class TestAttack:
    def release(self, workspace, tmp_path):
        out = tmp_path / "released.json"
        assert cli.main(
            ["learn", "--data", str(workspace / "pool.csv"), "--eta", "2",
             "--out", str(out)]
        ) == 0
        return out

    def test_reports_auc_and_writes_roc(self, workspace, tmp_path, capsys):
        released = self.release(workspace, tmp_path)
        roc = tmp_path / "roc.dat"
        code = cli.main(
            ["attack", "--released", str(released),
             "--pool", str(workspace / "pool.csv"),
             "--reference", str(workspace / "reference.csv"),
             "--nonmembers", str(workspace / "nonmembers.csv"),
             "--out", str(roc)]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "members: 150  non-members: 500" in stdout
        assert "empirical AUC: 0." in stdout
        alphas, betas = read_curve_dat(roc)
        assert alphas[0] == 0.0 and alphas[-1] == 1.0
        assert (tmp_path / "roc.png").exists()
        auc_line = next(l for l in stdout.splitlines() if "empirical AUC" in l)
        assert float(auc_line.split()[-1]) > 0.5

    def test_no_figure(self, workspace, tmp_path, capsys):
        released = self.release(workspace, tmp_path)
        roc = tmp_path / "roc.dat"
        code = cli.main(
            ["attack", "--released", str(released),
             "--pool", str(workspace / "pool.csv"),
             "--reference", str(workspace / "reference.csv"),
             "--nonmembers", str(workspace / "nonmembers.csv"),
             "--out", str(roc), "--no-figure"]
        )
        assert code == 0
        assert roc.exists() and not (tmp_path / "roc.png").exists()


class TestExperiment:
    def config_file(self, workspace, tmp_path, **extra):
        lines = [
            f"data = {workspace / 'population.csv'}",
            "pool_size = 150",
            "reference_size = 500",
            "eta_released = 2",
            "splits = 2",
            "seed = 3",
        ]
        lines += [f"{k} = {v}" for k, v in extra.items()]
        path = tmp_path / "run.cfg"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_writes_report_bundle(self, workspace, tmp_path, capsys):
        config = self.config_file(workspace, tmp_path)
        out_dir = tmp_path / "report"
        code = cli.main(
            ["experiment", "--config", str(config), "--out-dir", str(out_dir),
             "--no-figure"]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "mean empirical AUC:" in stdout
        assert "theoretical AUC:" in stdout
        for name in ("power_mean.dat", "bound.dat", "splits.csv", "table.csv",
                     "summary.txt", "report.json"):
            assert (out_dir / name).exists()
        assert not (out_dir / "power_vs_error.png").exists()

    def test_default_out_dir_and_figure(self, workspace, tmp_path, capsys, monkeypatch):
        config = self.config_file(workspace, tmp_path)
        monkeypatch.chdir(tmp_path)
        assert cli.main(["experiment", "--config", str(config)]) == 0
        out_dir = tmp_path / "run_out"
        assert (out_dir / "report.json").exists()
        assert (out_dir / "power_vs_error.png").exists()

    def test_report_json_matches_config(self, workspace, tmp_path, capsys):
        config = self.config_file(workspace, tmp_path, control="true")
        out_dir = tmp_path / "ctrl"
        assert cli.main(
            ["experiment", "--config", str(config), "--out-dir", str(out_dir),
             "--no-figure"]
        ) == 0
        payload = json.loads((out_dir / "report.json").read_text())
        assert payload["config"]["control"] is True
        assert payload["mean_auc"] == pytest.approx(0.5, abs=1e-12)


class TestNbVariance:
    def test_known_value(self, capsys):
        code = cli.main(
            ["nb-variance", "--attributes", "10", "--pool-size", "100", "--p1", "0.25"]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "0.193333333"

    def test_domain_error(self, capsys):
        code = cli.main(
            ["nb-variance", "--attributes", "10", "--pool-size", "100", "--p1", "0"]
        )
        assert code == 2


class TestExitCodes:
    def test_no_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main([])
        assert err.value.code == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main(["bound", "--complexity", "1", "--pool-size", "1", "--wat"])
        assert err.value.code == 2

    def test_runtime_failures_map_to_three(self, workspace, tmp_path, capsys, monkeypatch):
        config = tmp_path / "run.cfg"
        config.write_text(
            f"data = {workspace / 'population.csv'}\npool_size = 10\n"
            "reference_size = 10\neta_released = 1\nseed = 0\n"
        )
        def boom(_):
            raise RuntimeError("split 1 failed: disk on fire")

        monkeypatch.setattr(cli, "run_experiment", boom)
        code = cli.main(["experiment", "--config", str(config), "--no-figure"])
        assert code == 3
        assert capsys.readouterr().err.startswith("failure: split 1 failed")

    def test_entrypoint_exits_with_status(self, capsys, monkeypatch):
        monkeypatch.setattr(
            "sys.argv",
            ["bntrace", "nb-variance", "--attributes", "3", "--pool-size", "10",
             "--p1", "0.5"],
        )
        with pytest.raises(SystemExit) as err:
            cli.entrypoint()
        assert err.value.code == 0
