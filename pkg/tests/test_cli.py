import io
import json
import subprocess
import sys

import mpmath as mp
import pytest

from heqed import cli, helium_constants


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def as_json(text):
    return json.loads(text, parse_float=mp.mpf)


def test_a_min_json():
    code, out, err = invoke("a-min", "--format", "json")
    assert code == 0
    data = as_json(out)
    assert abs(data["a_min"] - mp.mpf("1.1715081960838")) < 1e-12
    assert err.startswith("# heqed a-min digits=50 elapsed=")


def test_lambda_ab_initio_text():
    code, out, _ = invoke("lambda", "--ab-initio", "--quiet")
    assert code == 0
    assert out.startswith("lambda_ab_initio = 5.6358806524098")
    assert out.rstrip().endswith(" m")


def test_json_round_trips_at_full_digits():
    code, out, _ = invoke("constants", "--format", "json", "--quiet", "--digits", "40")
    with mp.workdps(48):
        data = as_json(out)
        dc = helium_constants(40)
        assert abs(data["k_e"] / dc.k_e - 1) < mp.mpf("1e-39")
        assert data["units"]["k_e"] == "J m"
        assert data["digits"] == 40


def test_output_is_deterministic():
    first = invoke("coupling", "--curve", "--points", "5", "--quiet")
    second = invoke("coupling", "--curve", "--points", "5", "--quiet")
    assert first == second


def test_timing_line_only_on_stderr():
    _, out, err = invoke("cutoff")
    assert "elapsed" not in out and "elapsed" in err
    _, _, quiet = invoke("cutoff", "--quiet")
    assert quiet == ""


def test_curve_csv_header():
    code, out, _ = invoke("zone-energy", "--curve", "--points", "3", "--digits", "20", "--quiet")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# columns: a,E ; units: 1,keV ; digits: 20"
    assert len(lines) == 4
    assert all(len(line.split(",")) == 2 for line in lines[1:])


def test_wavefunction_columns():
    code, out, _ = invoke("wavefunction", "--n", "2", "--emit", "csv", "--points", "4", "--digits", "20", "--quiet")
    lines = out.splitlines()
    assert lines[0] == "# columns: x,R,dR,d2R,density ; units: 1,1,1,1,1 ; digits: 20"
    assert lines[1].split(",")[:2] == ["0.0", "1.0"]


def test_density_compare():
    code, out, _ = invoke("density", "--compare", "--points", "3", "--format", "json", "--digits", "20", "--quiet")
    data = as_json(out)
    assert data["columns"] == ["r", "helium", "hydrogen"]
    assert len(data["rows"]) == 3


def test_scalar_csv():
    code, out, _ = invoke("cutoff", "--format", "csv", "--quiet")
    lines = out.splitlines()
    assert lines[0] == "# columns: name,value,unit ; units: -,-,- ; digits: 50"
    assert lines[2].startswith("l_cutoff,1.9647339679")


def test_lambda_from_cutoff_and_coupling():
    _, out, _ = invoke("lambda", "--from-cutoff", "1.964733967957779e-23", "--format", "json", "--quiet")
    assert abs(as_json(out)["mass_ratio"] - mp.mpf("0.263755363")) < 1e-9
    _, out, _ = invoke("coupling", "--format", "json", "--form", "listing", "--quiet")
    with mp.workdps(58):
        f = as_json(out)["f_E"]
        _, out, _ = invoke("lambda", "--from-coupling", mp.nstr(f, 50), "--format", "json", "--quiet")
        assert abs(as_json(out)["lambda_from_coupling"] / mp.mpf("8.7819702650081e-16") - 1) < mp.mpf("1e-45")


def test_env_digits(monkeypatch):
    monkeypatch.setenv("HEQED_DIGITS", "24")
    _, out, _ = invoke("a-min", "--format", "json", "--quiet")
    assert as_json(out)["digits"] == 24


@pytest.mark.parametrize("argv", [["a-min", "--bogus"], ["nonsense"], [], ["energy"], ["a-min", "--digits", "3"],
                                  ["coupling", "--curve", "--points", "1"]])
def test_usage_errors(argv):
    code, _, _ = invoke(*argv)
    assert code == cli.EXIT_USAGE if argv != ["a-min", "--digits", "3"] else code == cli.EXIT_NUMERIC


def test_numeric_error_exit_code():
    code, out, err = invoke("zone-energy", "--form", "direct", "--quiet")
    assert code == cli.EXIT_NUMERIC
    assert out == "" and "DivergenceError" in err


def test_help():
    assert invoke("--help")[0] == 0


def test_verify_exit_codes():
    code, out, _ = invoke("verify", "--criteria", "2", "--no-golden", "--quiet")
    assert code == 0 and "PASS,2,lambda_ab_initio" in out
    code, out, _ = invoke("verify", "--criteria", "5", "--no-golden", "--quiet")
    assert code == cli.EXIT_FAILURE and out.count("FAIL") == 1


def test_energy_command(tmp_path):
    trace = tmp_path / "e1.csv"
    code, out, _ = invoke("energy", "--state", "1", "--lambda", "8.7819702650081e-16", "--trace", str(trace), "--format", "json", "--quiet")
    assert code == 0
    data = as_json(out)
    assert abs(data["E"] / mp.mpf("-24.5873777088943") - 1) < 1e-10
    assert data["units"]["E"] == "eV"
    rows = trace.read_text().splitlines()
    assert rows[0].startswith("# columns: step,value,functional,rel_change")
    assert len(rows) == data["iterations"] + 1


def test_energy_non_convergence_exit(monkeypatch):
    original = cli.sv.energy_schedule

    def short(n, ctx=None, **kw):
        cfg = original(n, ctx, **kw)
        return cli.sv.IterationConfig(cfg.stages, cfg.seed, max_iterations=2)

    monkeypatch.setattr(cli.sv, "energy_schedule", short)
    code, _, err = invoke("energy", "--state", "1", "--quiet")
    assert code == cli.EXIT_NUMERIC and "NonConvergenceError" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heqed", "a-min", "--quiet"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("a_min = 1.17150819608383652")
