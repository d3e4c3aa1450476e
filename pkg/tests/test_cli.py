"""CLI: dispatch, exit codes, config merging, golden help text."""

from pathlib import Path

import pytest

from onebitcs.cli import build_parser, parse_and_dispatch

DATA = Path(__file__).parent / "data"


class TestHelpGolden:
    def test_main_help(self):
        assert build_parser().format_help() == (DATA / "help_main.txt").read_text()

    @pytest.mark.parametrize("name", ["recover", "sweep", "probe", "theory", "selftest"])
    def test_subcommand_help(self, name):
        parser = build_parser()
        sub = [a for a in parser._actions if hasattr(a, "choices") and a.choices][0]
        assert sub.choices[name].format_help() == (DATA / f"help_{name}.txt").read_text()

    def test_help_flag_exits_zero(self, capsys):
        assert parse_and_dispatch(["--help"]) == 0
        assert "recover" in capsys.readouterr().out


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert parse_and_dispatch(["bogus"]) == 1
        err = capsys.readouterr().err
        assert "usage:" in err and "invalid choice" in err

    def test_unknown_flag(self, capsys):
        assert parse_and_dispatch(["recover", "--frobnicate", "3"]) == 1
        assert "usage:" in capsys.readouterr().err

    def test_no_subcommand(self, capsys):
        assert parse_and_dispatch([]) == 1
        assert "usage:" in capsys.readouterr().err

    def test_missing_config_file_names_path(self, capsys):
        assert parse_and_dispatch(["sweep", "--config", "missing.cfg", "--seed", "1"]) == 1
        assert "missing.cfg" in capsys.readouterr().err

    def test_missing_seed(self, capsys):
        assert parse_and_dispatch(["recover", "--n", "16", "--s", "2", "--m", "32"]) == 1
        assert "seed" in capsys.readouterr().err

    def test_invalid_argument_is_validation_error(self, capsys):
        assert parse_and_dispatch(
            ["recover", "--n", "4", "--s", "9", "--m", "16", "--seed", "1"]
        ) == 1

    def test_runtime_failure_exits_two(self, capsys, monkeypatch):
        import onebitcs.cli as cli
        from onebitcs import DegenerateIterateError

        def boom(*args, **kwargs):
            raise DegenerateIterateError("synthetic collapse")

        monkeypatch.setattr(cli, "one_shot_estimate", boom)
        code = parse_and_dispatch(
            ["recover", "--n", "16", "--s", "2", "--m", "32", "--algo", "one_shot", "--seed", "1"]
        )
        assert code == 2
        assert "runtime failure" in capsys.readouterr().err


class TestRecover:
    ARGS = ["recover", "--n", "64", "--s", "3", "--m", "512", "--algo", "nbiht", "--seed", "11"]

    def test_prints_error_and_iterations(self, capsys):
        assert parse_and_dispatch(self.ARGS) == 0
        out = capsys.readouterr().out
        assert "final_l2_error = " in out and "iterations_used = " in out
        assert "stop_reason = " in out

    def test_deterministic_output(self, capsys):
        args = ["recover", "--n", "512", "--s", "4", "--m", "4096", "--algo", "nbiht", "--seed", "11"]
        parse_and_dispatch(args)
        first = capsys.readouterr().out
        parse_and_dispatch(args)
        second = capsys.readouterr().out
        assert first == second
        assert "final_l2_error = " in first

    @pytest.mark.parametrize("algo", ["biht", "iht", "one_shot"])
    def test_other_algorithms_run(self, algo, capsys):
        args = list(self.ARGS)
        args[args.index("nbiht")] = algo
        assert parse_and_dispatch(args) == 0
        assert "final_l2_error" in capsys.readouterr().out


class TestSweep:
    def test_end_to_end_writes_report_files(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = parse_and_dispatch(
            [
                "sweep", "--n", "32", "--s", "3", "--m-grid", "64,128,256",
                "--algo", "nbiht,one_shot", "--trials", "3", "--max-iters", "40",
                "--seed", "5", "--workers", "1", "--out-dir", str(out),
            ]
        )
        assert code == 0
        assert (out / "records.csv").exists()
        assert (out / "manifest.txt").exists()
        assert (out / "plot.svg").exists()
        stdout = capsys.readouterr().out
        assert "slope" in stdout

    def test_theory_overlay_flag(self, tmp_path):
        out = tmp_path / "overlay"
        code = parse_and_dispatch(
            [
                "sweep", "--n", "32", "--s", "3", "--m-grid", "64,128,256",
                "--algo", "one_shot", "--trials", "2", "--seed", "5",
                "--workers", "1", "--out-dir", str(out), "--theory-overlay",
            ]
        )
        assert code == 0
        assert 'id="series-theory"' in (out / "plot.svg").read_text()


class TestConfigFile:
    def test_config_supplies_values_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[recover]\nn = 64\ns = 3\nm = 512\nalgo = one_shot\nseed = 11\n")
        assert parse_and_dispatch(["recover", "--config", str(cfg)]) == 0
        out1 = capsys.readouterr().out
        assert "algorithm = one_shot" in out1 and "m = 512" in out1
        assert parse_and_dispatch(["recover", "--config", str(cfg), "--m", "256"]) == 0
        assert "m = 256" in capsys.readouterr().out

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[recover]\nwarp_speed = 9\nseed = 1\n")
        assert parse_and_dispatch(["recover", "--config", str(cfg)]) == 1
        assert "warp_speed" in capsys.readouterr().err

    def test_seed_from_config_satisfies_requirement(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[recover]\nseed = 3\nn = 32\ns = 2\nm = 128\n")
        assert parse_and_dispatch(["recover", "--config", str(cfg)]) == 0


class TestProbeAndTheory:
    def test_probe_projection(self, capsys):
        code = parse_and_dispatch(
            ["probe", "projection", "--n", "16", "--s", "2", "--trials", "200", "--seed", "3"]
        )
        assert code == 0
        assert "max violation" in capsys.readouterr().out

    def test_probe_decomposition(self, capsys):
        code = parse_and_dispatch(
            ["probe", "decomposition", "--n", "12", "--trials", "50", "--seed", "4"]
        )
        assert code == 0
        assert "residual" in capsys.readouterr().out

    def test_probe_width(self, capsys):
        code = parse_and_dispatch(
            ["probe", "width", "--n", "32", "--s", "2", "--trials", "500", "--seed", "4"]
        )
        assert code == 0
        assert "ratio" in capsys.readouterr().out

    def test_probe_raic_uses_config_annulus(self, tmp_path, capsys):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("[probe]\nraic_r_lb = 0.2\nraic_r_ub = 0.4\n")
        code = parse_and_dispatch(
            [
                "probe", "raic", "--n", "32", "--s", "3", "--m", "256",
                "--trials", "15", "--seed", "6", "--config", str(cfg),
            ]
        )
        assert code == 0
        assert "annulus [0.2, 0.4]" in capsys.readouterr().out

    def test_probe_unknown_name(self, capsys):
        assert parse_and_dispatch(["probe", "zeta", "--seed", "1"]) == 1

    def test_theory_table(self, capsys):
        assert parse_and_dispatch(["theory", "--m", "8192", "--levels", "3"]) == 0
        out = capsys.readouterr().out
        assert "L = 0" in out and "diagnostic only" in out and "exponent" in out

    def test_theory_above_threshold(self, capsys):
        assert parse_and_dispatch(["theory", "--m", "1e100", "--n", "1024", "--s", "5"]) == 0
        out = capsys.readouterr().out
        assert "L = 3" in out and "r nonincreasing = True" in out


class TestSelftest:
    def test_healthy_build_exits_zero(self, capsys):
        assert parse_and_dispatch(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out and "FAIL" not in out
