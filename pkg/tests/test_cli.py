import json
import subprocess
import sys

import pytest

from aqftshor.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cf_output(capsys):
    code, out, _ = run(capsys, "cf", "31674", "65536")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "2 14 2 10 52"
    assert lines[1] == "1/2 14/29 29/60 304/629 15837/32768"


def test_lmax_and_invert(capsys):
    code, out, _ = run(capsys, "lmax", "--invert", "--L", "4096", "--fmax", "100")
    assert code == 0 and out.strip() == "6"
    code, out, _ = run(capsys, "lmax", "--dmax", "6", "--fmax", "100")
    assert code == 0 and out.strip() == "6803"
    code, _, err = run(capsys, "lmax", "--fmax", "100")
    assert code == 1 and "dmax" in err


def test_dist_csv_comb(capsys, tmp_path):
    out_path = tmp_path / "comb.csv"
    code, _, _ = run(capsys, "dist", "--L", "4", "--r", "8", "--dmax", "8", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[1] == "j,probability"
    assert len(lines) == 258
    rows = [line.split(",") for line in lines[2:]]
    for j, p in rows:
        expected = 0.125 if int(j) % 32 == 0 else 0.0
        assert float(p) == pytest.approx(expected, abs=1e-12)
    manifest = json.loads((tmp_path / "comb.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "dist"
    assert manifest["parameters"]["r"] == 8
    # rerun reproduces the file byte for byte
    out2 = tmp_path / "comb2.csv"
    run(capsys, "dist", "--L", "4", "--r", "8", "--dmax", "8", "--out", str(out2))
    assert out2.read_bytes() == out_path.read_bytes()


def test_s_noisy_reproducible_across_threads(capsys):
    argv = ["s", "--L", "4", "--r", "10", "--dmax", "3",
            "--sigma", "0.0981747704246810", "--trials", "20", "--seed", "7"]
    _, out1, _ = run(capsys, *argv, "--threads", "1")
    _, out2, _ = run(capsys, *argv, "--threads", "4")
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["stderr"] > 0


def test_s_noiseless(capsys, tmp_path):
    out_path = tmp_path / "s.json"
    code, out, _ = run(capsys, "s", "--L", "4", "--r", "8", "--out", str(out_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["s"] == pytest.approx(7 / 8, abs=1e-12)
    assert payload["d_max"] == 8  # defaulted to full depth
    assert json.loads(out_path.read_text())["s"] == payload["s"]


def test_sweep_fit_check4_pipeline(capsys, tmp_path):
    sweep_csv = tmp_path / "sweep.csv"
    code, _, _ = run(
        capsys, "sweep", "--Lmin", "4", "--Lmax", "9", "--dmax-list", "1,2",
        "--cache-dir", str(tmp_path / "cache"), "--out", str(sweep_csv),
    )
    assert code == 0
    fits_json = tmp_path / "fits.json"
    code, out, _ = run(capsys, "fit", "--in", str(sweep_csv), "--tail", "0.67", "--out", str(fits_json))
    assert code == 0
    fits = json.loads(fits_json.read_text())
    assert [f["d_max"] for f in fits] == [1, 2]
    code, out, _ = run(capsys, "check4", "--in", str(fits_json))
    assert code == 0
    assert "pass" in out
    code, _, _ = run(capsys, "check4", "--in", str(fits_json), "--threshold", "100")
    assert code == 1


def test_order(capsys):
    code, out, _ = run(capsys, "order", "--N", "143", "--m", "2", "--j", "31674")
    assert code == 0
    assert json.loads(out)["r"] == 60
    code, out, _ = run(capsys, "order", "--N", "143", "--m", "2", "--j", "1")
    assert code == 0
    assert json.loads(out)["r"] is None


def test_factor(capsys):
    code, out, _ = run(capsys, "factor", "--N", "15", "--seed", "1", "--sampler", "formula")
    assert code == 0
    report = json.loads(out)
    assert report["success"] and report["factors"] == [3, 5]
    code, out, _ = run(capsys, "factor", "--N", "21", "--seed", "1", "--dmax", "3", "--fmax", "1000")
    assert code == 0 and json.loads(out)["factors"] == [3, 7]


def test_factor_oracle_sampler(capsys):
    code, out, _ = run(capsys, "factor", "--N", "15", "--m", "7", "--seed", "3", "--sampler", "oracle")
    assert code == 0 and json.loads(out)["factors"] == [3, 5]


def test_factor_failure_exit(capsys):
    code, out, _ = run(capsys, "factor", "--N", "143", "--m", "2", "--seed", "1", "--fmax", "0")
    assert code == 1
    assert json.loads(out)["success"] is False


def test_synth(capsys, tmp_path):
    out_path = tmp_path / "synth.json"
    code, out, _ = run(
        capsys, "synth", "--d", "7", "--max-len", "31", "--strategy", "exhaustive",
        "--alphabet", "alternating", "--epsilon", "1e-6", "--out", str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["word"] == "HTHtHTHTHTHtHtHTHTHtHtHTHtHtHtH"
    assert payload["achieved"] == pytest.approx(8.1e-3, abs=0.05e-3)
    assert payload["baseline"] == pytest.approx(8.7e-3, abs=0.05e-3)


def test_oracle_compare(capsys):
    code, out, _ = run(capsys, "oracle-compare", "--L", "3", "--all", "--tol", "1e-10")
    assert code == 0 and "[ok]" in out
    code, out, _ = run(capsys, "oracle-compare", "--L", "3", "--r", "5", "--dmax", "2", "--tol", "1e-30")
    assert code == 1 and "FAIL" in out
    code, _, err = run(capsys, "oracle-compare", "--L", "3")
    assert code == 1  # needs --all or --r/--dmax


def test_config_file_defaults(capsys, tmp_path):
    conf = tmp_path / "conf.txt"
    conf.write_text("dmax=3  # cutoff\nvariant=physical\n")
    _, out_conf, _ = run(capsys, "s", "--L", "4", "--r", "10", "--config", str(conf))
    assert json.loads(out_conf)["d_max"] == 3
    # explicit flag overrides the config value
    _, out_flag, _ = run(capsys, "s", "--L", "4", "--r", "10", "--config", str(conf), "--dmax", "8")
    assert json.loads(out_flag)["d_max"] == 8


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["dist", "--L", "4", "--r", "8", "--unknown-flag", "--out", "x.csv"])
    assert exc.value.code == 2


def test_domain_errors_exit_1(capsys):
    code, _, err = run(capsys, "s", "--L", "40", "--r", "2")
    assert code == 1 and "L must be" in err
    code, _, err = run(capsys, "factor", "--N", "16")
    assert code == 1 and "classically" in err


def test_console_script_entry():
    out = subprocess.run(
        [sys.executable, "-m", "aqftshor.cli", "cf", "31674", "65536"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == "2 14 2 10 52"
