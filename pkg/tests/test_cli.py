import json

import pytest

from kaonlab.cli import EXIT_CONFIG, EXIT_DATA, EXIT_MATH, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- constants ---------------------------------------------------------------------

def test_constants_table(capsys):
    code, out, _ = run(capsys, "constants")
    assert code == EXIT_OK
    assert "0.94711" in out
    assert "578.623" in out


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["x"] == pytest.approx(0.94711, abs=1e-5)


def test_constants_zero_epsilon_note(capsys):
    code, out, _ = run(capsys, "constants", "--epsilon-abs", "0")
    assert code == EXIT_OK
    assert "K_S coincides" in out


def test_constants_gamma_l_zero_flag(capsys):
    code, out, _ = run(capsys, "constants", "--gamma-l-zero", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["gamma_l_hat [1/tau_s]"] == 0.0


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    config = tmp_path / "kaon.cfg"
    config.write_text("epsilon_abs = 1.0e-3\n")
    code, out, _ = run(capsys, "constants", "--config", str(config), "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["epsilon_abs"] == pytest.approx(1e-3)

    monkeypatch.setenv("KAONLAB_CONFIG", str(config))
    code, out, _ = run(capsys, "constants", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["epsilon_abs"] == pytest.approx(1e-3)


def test_bad_config_gives_config_exit_code(capsys, tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("mystery = 1\n")
    code, _, err = run(capsys, "constants", "--config", str(config))
    assert code == EXIT_CONFIG
    assert "configuration error" in err


# -- scans -------------------------------------------------------------------------

def test_asymmetry_scan_values(capsys):
    code, out, _ = run(
        capsys, "asymmetry-scan", "--dt-max", "2", "--steps", "5", "--zeta", "0,0.13,1"
    )
    assert code == EXIT_OK
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    header, rows = lines[0], lines[1:]
    assert header == "dt,A[zeta=0],A[zeta=0.13],A[zeta=1]"
    first = rows[0].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == 1.0
    for row in rows:
        dt, a0, a13, a1 = (float(x) for x in row.split(","))
        assert a1 == 0.0
        assert a13 == pytest.approx(0.87 * a0, rel=1e-9)


def test_asymmetry_scan_rejects_bad_ranges(capsys):
    code, _, err = run(capsys, "asymmetry-scan", "--dt-max", "-1")
    assert code == EXIT_CONFIG
    code, _, _ = run(capsys, "asymmetry-scan", "--zeta", "0,potato")
    assert code == EXIT_CONFIG


def test_scan_determinism_and_plot(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    png = tmp_path / "a.png"
    assert main(["asymmetry-scan", "--out", str(out_a), "--plot", str(png)]) == EXIT_OK
    assert main(["asymmetry-scan", "--out", str(out_b)]) == EXIT_OK
    assert out_a.read_bytes() == out_b.read_bytes()
    assert png.exists() and png.stat().st_size > 1000


# -- chsh --------------------------------------------------------------------------

def test_chsh_max_photon_banner(capsys):
    code, out, _ = run(capsys, "chsh-max", "--system", "photon", "--grid-steps", "8")
    assert code == EXIT_OK
    assert "VIOLATION (bound 2)" in out
    assert "2.828427" in out


def test_chsh_max_kaon_banner(capsys):
    code, out, _ = run(
        capsys, "chsh-max", "--system", "kaon", "--grid-steps", "7",
        "--refine-iters", "200",
    )
    assert code == EXIT_OK
    assert "NO VIOLATION (bound 2)" in out


# -- fit ---------------------------------------------------------------------------

def test_fit_zeta_bundled(capsys):
    code, out, _ = run(capsys, "fit-zeta", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["zeta_hat"] == pytest.approx(0.134855, abs=1e-4)
    assert data["basis"] == "mass"


def test_fit_zeta_strangeness_warns(capsys):
    code, out, _ = run(capsys, "fit-zeta", "--basis", "strangeness", "--mode", "raw")
    assert code == EXIT_OK
    assert "wide interval" in out


def test_fit_zeta_missing_file(capsys):
    code, _, err = run(capsys, "fit-zeta", "--data", "/nonexistent/file.csv")
    assert code == EXIT_DATA
    assert "not found" in err


def test_fit_zeta_empty_csv(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("label,t_l,t_r,measured,sigma,corrected_theory\n")
    code, _, err = run(capsys, "fit-zeta", "--data", str(path))
    assert code == EXIT_DATA
    assert "no data" in err


def test_fit_zeta_bad_sigma(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "label,t_l,t_r,measured,sigma,corrected_theory\nC(0),1,1,0.81,0,0.93\n"
    )
    code, _, err = run(capsys, "fit-zeta", "--data", str(path))
    assert code == EXIT_DATA
    assert "sigma" in err


# -- wigner ------------------------------------------------------------------------

def test_wigner_t0(capsys):
    code, out, _ = run(capsys, "wigner", "--scenario", "t0")
    assert code == EXIT_OK
    assert "violated  true" in out.replace("violated ", "violated ")
    assert "epsilon_route_violated  true" in out


def test_wigner_zeta_bound(capsys):
    code, out, _ = run(capsys, "wigner", "--scenario", "zeta-bound", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(0.9875, abs=1e-3)


def test_wigner_threshold_and_math_error(capsys):
    code, out, _ = run(capsys, "wigner", "--scenario", "threshold", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["threshold"] == pytest.approx(7.86e-4, abs=1e-5)

    code, _, err = run(
        capsys, "wigner", "--scenario", "threshold", "--epsilon-abs", "0"
    )
    assert code == EXIT_MATH
    assert "no violation" in err


def test_wigner_equal_times(capsys):
    code, out, _ = run(
        capsys, "wigner", "--scenario", "equal-times", "--t", "1.0", "--format", "json"
    )
    assert code == EXIT_OK
    assert json.loads(out)["violated"] is False


def test_wigner_region_csv_and_plot(tmp_path, capsys):
    out_csv = tmp_path / "region.csv"
    png = tmp_path / "region.png"
    code = main(
        [
            "wigner", "--scenario", "region",
            "--t-a-max", "0.2", "--t-b-max", "1.0", "--resolution", "0.1",
            "--out", str(out_csv), "--plot", str(png),
        ]
    )
    assert code == EXIT_OK
    lines = out_csv.read_text().splitlines()
    assert "t_a,t_b,lhs,rhs,violated" in lines[1]
    data_rows = lines[2:]
    assert all(len(row.split(",")) == 5 for row in data_rows)
    # grid restricted to t_a <= t_b
    assert all(
        float(r.split(",")[0]) <= float(r.split(",")[1]) for r in data_rows
    )
    assert png.exists() and png.stat().st_size > 1000


# -- probe -------------------------------------------------------------------------

def test_probe_table_sums_to_one(capsys):
    code, out, _ = run(
        capsys, "probe", "--left", "K0", "--right", "K0bar",
        "--t-l", "1", "--t-r", "1", "--format", "json",
    )
    assert code == EXIT_OK
    data = json.loads(out)
    total = data["p_yy"] + data["p_yn"] + data["p_ny"] + data["p_nn"]
    assert total == pytest.approx(1.0, abs=1e-9)


def test_probe_rejects_negative_time(capsys):
    code, _, err = run(capsys, "probe", "--t-l", "-1")
    assert code == EXIT_MATH
    assert "probe failed" in err


def test_output_to_file_deterministic(tmp_path):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    args = ["fit-zeta", "--format", "json"]
    assert main(args + ["--out", str(out_a)]) == EXIT_OK
    assert main(args + ["--out", str(out_b)]) == EXIT_OK
    assert out_a.read_bytes() == out_b.read_bytes()
