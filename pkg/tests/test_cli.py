import csv
import io
import json
import re

import pytest

from cp_dynamics.cli import (
    CSV_COLUMNS,
    ConfigParseError,
    ConfigValidationError,
    build_config,
    light_cone_windows,
    load_raw_config,
    main,
    parse_config,
)
from cp_dynamics.scenarios import ScenarioKind


def test_minimal_config_defaults():
    cfg = parse_config("x0 = 1.0\n")
    assert cfg.scenario is ScenarioKind.BARE
    assert cfg.params.k0 == cfg.params.k0_prime == 1.0
    assert cfg.params.d == cfg.params.d_prime == 1.0
    assert cfg.time_grid.count == 100 and cfg.time_grid.stop == 6.0
    assert cfg.oracle is None and cfg.output_format == "csv"


def test_sections_and_log_grid():
    cfg = parse_config(
        "scenario = dressed2\nx0 = 2\nx0p = 3\nrho = 0.5\n"
        "[time_grid]\nstart = 0.1\nstop = 10\ncount = 5\nspacing = log\n"
        "[oracle]\nkind = quadrature\ntol = 1e-5\n"
    )
    assert cfg.params.d_prime == 0.5
    pts = cfg.time_grid.points()
    assert pts[0] == pytest.approx(0.1) and pts[-1] == pytest.approx(10.0)
    assert pts[2] == pytest.approx(1.0)
    assert cfg.oracle.tol == 1e-5


def test_json_config():
    cfg = parse_config(json.dumps({"k0": 2.0, "d": 0.5, "time_grid": {"count": 3}}))
    assert cfg.params.k0 == 2.0 and cfg.params.d == 0.5
    assert cfg.time_grid.count == 3


def test_stop_before_start():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("x0 = 1\n[time_grid]\nstart = 3\nstop = 1\n")
    assert exc.value.field == "time_grid.stop"


def test_both_parameterizations_rejected():
    with pytest.raises(ConfigValidationError, match="specify exactly one parameterization"):
        parse_config("x0 = 1\nk0 = 1\nd = 1\n")
    with pytest.raises(ConfigValidationError, match="specify exactly one parameterization"):
        parse_config("scenario = bare\n")


def test_unknown_key():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("x0 = 1\nfrobnicate = 2\n")
    assert exc.value.field == "frobnicate"
    with pytest.raises(ConfigValidationError):
        parse_config("x0 = 1\n[time_grid]\nstep = 2\n")


def test_parse_error_reports_line():
    with pytest.raises(ConfigParseError, match=r"line 3"):
        load_raw_config("x0 = 1\nrho = 0.5\nthis line has no separator\n")
    with pytest.raises(ConfigParseError, match=r"line 2"):
        load_raw_config('{"x0": 1,\n "rho": }')


def test_bad_values():
    with pytest.raises(ConfigValidationError):
        parse_config("x0 = -1\n")
    with pytest.raises(ConfigValidationError):
        parse_config("x0 = one\n")
    with pytest.raises(ConfigValidationError):
        parse_config("scenario = dressed1\nx0 = 1\n[oracle]\nkind = cavity\n")
    with pytest.raises(ConfigValidationError):
        parse_config("x0 = 1\n[time_grid]\ncount = 0\n")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_csv_layout(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--x0", "1", "--t-start", "1", "--t-stop", "3", "--t-count", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 4
    # the middle row sits on the light cone
    assert rows[2][0] == "2.0" and rows[2][3] == "true"
    assert rows[2][1] == "" and rows[2][2] == "" and rows[2][4] == ""
    assert rows[1][3] == "false" and float(rows[1][1]) < 0


def test_json_output(capsys):
    code, out, _ = run_cli(
        capsys, "energy", "--x0", "1", "--t-start", "0.5", "--t-stop", "1", "--t-count", "2", "--format", "json"
    )
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == list(CSV_COLUMNS)
    assert doc["rows"][0]["force_d_over_eps0"] is None


def test_usage_errors_exit_one(capsys):
    assert run_cli(capsys, "sweep", "--bogus")[0] == 1
    assert run_cli(capsys)[0] == 1
    assert run_cli(capsys, "sweep")[0] == 1  # no parameters
    assert run_cli(capsys, "sweep", "--config", "/nonexistent/cfg.ini")[0] == 3


def test_oracle_passes(capsys):
    code, _, err = run_cli(
        capsys, "oracle", "--x0", "1", "--t-start", "0.5", "--t-stop", "4", "--t-count", "3", "--tol", "1e-5"
    )
    assert code == 0
    assert re.search(r"oracle=quadrature points=3 max_rel_dev=\S+ tol=1e-05 status=pass", err)


def test_thread_count_is_invisible(capsys, tmp_path):
    outs = []
    for n in (1, 2, 8):
        path = tmp_path / f"out{n}.csv"
        code = main(["sweep", "--scenario", "dressed2", "--x0", "1", "--x0p", "1.5", "--rho", "0.5",
                     "--t-count", "40", "--threads", str(n), "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1] == outs[2]


def test_thread_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("CP_DYNAMICS_THREADS", "nope")
    assert run_cli(capsys, "sweep", "--x0", "1")[0] == 1


def test_presets(capsys):
    code, out, _ = run_cli(capsys, "presets", "--format", "json")
    assert code == 0 and json.loads(out)


def test_plot_written(capsys, tmp_path):
    path = tmp_path / "p.svg"
    code = main(["sweep", "--scenario", "dressed2", "--x0", "1", "--rho", "0.5", "--t-count", "30",
                 "--plot", str(path), "--out", str(tmp_path / "o.csv")])
    capsys.readouterr()
    assert code == 0
    assert path.read_text().count('class="masked"') == 3


def test_light_cone_windows():
    cfg = build_config({"scenario": "dressed2", "x0": 1.0, "rho": 0.5})
    wins = light_cone_windows(cfg)
    assert [round(0.5 * (a + b), 12) for a, b in wins] == [0.5, 1.5, 2.0]
    assert all(b - a == pytest.approx(2e-3 * 0.5 * (a + b)) for a, b in wins)


def test_cavity_check(capsys):
    code, out, err = run_cli(capsys, "cavity-check", "--x0", "1")
    assert code == 0
    assert "status=pass" in err and "t0_sum=0.0" in err
    assert len(out.strip().splitlines()) == 10


def test_inline_comments():
    cfg = parse_config("x0 = 2  # wavenumber times distance\n[time_grid]\nspacing = log ; geometric\nstart = 0.1\n")
    assert cfg.params.k0 == 2.0 and cfg.time_grid.spacing == "log"
