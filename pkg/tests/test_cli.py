import re

import pytest

from scandiction.cli import main
from scandiction.core import read_field


def _strip_wall_time(text):
    return re.sub(r"(wall_time_s|command): .*", "", text)


def test_bounds_eps_delta(capsys):
    assert main(["bounds", "--which", "eps-delta", "--params", "delta=0.25"]) == 0
    out = capsys.readouterr().out
    assert "epsilon_delta: 0.0302" in out and "a_star:" in out and "b_star:" in out
    assert "config_hash:" in out and "prng:" in out


def test_run_without_scan_is_usage_error(capsys):
    assert main(["run", "--estimator", "singlet"]) == 1
    assert "usage:" in capsys.readouterr().err


def test_unknown_subcommand_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_audit_thm2_prints_margins(capsys):
    assert main(["audit", "--which", "thm2"]) == 0
    out = capsys.readouterr().out
    assert "audit thm2: pass" in out and "margin" in out


def test_run_is_byte_reproducible(capsys):
    argv = ["run", "--scan", "hilbert", "--estimator", "hmm-forward", "--width", "16", "--height", "16",
            "--trials", "3", "--jobs", "1"]
    main(argv)
    a = capsys.readouterr().out
    main(argv[:-1] + ["2"])
    b = capsys.readouterr().out
    assert _strip_wall_time(a) == _strip_wall_time(b)
    assert "mean_normalized_loss:" in a


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# experiment\nscan = snake\nestimator = singlet\ndelta = 0.0\nwidth = 8\nheight = 8\ntrials = 2\n")
    assert main(["run", "--config", str(cfg), "--jobs", "1"]) == 0
    assert "mean_normalized_loss: 0\n" in capsys.readouterr().out
    assert main(["run", "--config", str(cfg), "--scan", "raster", "--jobs", "1"]) == 0
    assert "scan: raster" in capsys.readouterr().out


def test_gen_and_corrupt_roundtrip(tmp_path, capsys):
    clean, noisy = tmp_path / "x.fld", tmp_path / "y.fld"
    assert main(["gen", "--width", "6", "--height", "4", "--out", str(clean)]) == 0
    assert main(["corrupt", "--channel", "bsc", "--delta", "0.0", "--in", str(clean), "--out", str(noisy)]) == 0
    assert read_field(clean) == read_field(noisy)
    assert main(["gen", "--source", "gauss-ar", "--width", "3", "--height", "3", "--out", str(clean)]) == 0
    assert read_field(clean).alphabet == "real"


def test_bad_bound_params(capsys):
    assert main(["bounds", "--which", "zeta", "--params", "delta"]) == 1


def test_figures_and_oracle(tmp_path, capsys):
    assert main(["figures", "--fig", "1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig1_zeta_envelope.csv").read_text().startswith("d,zeta,zeta_bar\n")
    assert (tmp_path / "manifest.json").exists()
    assert main(["oracle", "--which", "best-order", "--width", "4"]) == 0
    assert "best_loss:" in capsys.readouterr().out


def test_universal_small(tmp_path, capsys):
    out = tmp_path / "u.csv"
    assert main(["universal", "--trials", "3", "--jobs", "1", "--out", str(out)]) == 0
    assert "violations: 0" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 4
