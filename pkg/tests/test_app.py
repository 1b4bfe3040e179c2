"""
End-to-end tests for the command-line entry point
"""

import io
import json

import pandas as pd
import pytest

import app
from utils.constants import TABLE1_TARGETS


def _run(*argv):
    return app.main(list(argv))


def _csv(path):
    return pd.read_csv(path)


# ----- curve -----

def test_gamma_curve_crosses_zero_near_eight_percent(tmp_path):
    out = tmp_path / "curve.csv"
    assert _run("curve", "--clock", "gamma", "--theta", "0.5", "--out", str(out)) == 0
    frame = _csv(out)
    assert list(frame.columns) == ['f', 'G', 'model_label']
    assert len(frame) == 71
    assert frame['f'].iloc[-1] == pytest.approx(0.14)
    g = dict(zip(frame['f'].round(6), frame['G']))
    assert g[0.078] > 0 > g[0.082]


def test_curve_with_three_clocks_orders_models(tmp_path):
    out = tmp_path / "curves.csv"
    code = _run("curve", "--clock", "degenerate", "--clock", "gamma", "--clock", "inverse_gaussian",
                "--theta", "0", "--theta", "0.5", "--theta", "0.5", "--out", str(out))
    assert code == 0
    frame = _csv(out)
    at_tenth = frame[frame['f'].round(6) == 0.1].set_index('model_label')['G']
    assert at_tenth["VG(theta=0.5)"] < at_tenth["IG(theta=0.5)"] < at_tenth["KT"]


def test_degenerate_curve_is_kelly_curve(tmp_path):
    out = tmp_path / "kt.json"
    assert _run("curve", "--format", "json", "--f-max", "0.1", "--f-step", "0.05", "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    curve = payload['curves'][0]
    assert curve['model_label'] == "KT"
    assert [point['f'] for point in curve['points']] == [0.0, 0.05, 0.1]
    assert curve['points'][0]['G'] == 0.0


def test_curve_to_stdout(capsys):
    assert _run("curve", "--f-max", "0.004") == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert frame['f'].tolist() == [0.0, 0.002, 0.004]


# ----- solve -----

def test_solve_kelly_and_gamma(tmp_path):
    out = tmp_path / "solve.json"
    code = _run("solve", "--clock", "degenerate", "--clock", "gamma", "--theta", "0", "--theta", "1",
                "--out", str(out))
    assert code == 0
    results = json.loads(out.read_text())['results']
    assert results['KT']['f_star'] == pytest.approx(0.06, abs=1e-8)
    assert results['KT']['f_c'] == pytest.approx(0.12, abs=1e-3)
    assert results['VG(theta=1)']['f_c'] == pytest.approx(0.06, abs=1e-8)
    assert results['VG(theta=1)']['has_ruin_boundary'] is True


def test_solve_csv_rows(tmp_path):
    out = tmp_path / "solve.csv"
    assert _run("solve", "--clock", "gamma", "--theta", "0.5", "--format", "csv", "--out", str(out)) == 0
    frame = _csv(out)
    assert frame['model_label'].tolist() == ["VG(theta=0.5)"]
    assert 0 < frame['f_star'].iloc[0] < 0.06


# ----- exit codes -----

def test_invalid_configuration_exits_2_without_output(tmp_path):
    out = tmp_path / "bad.csv"
    assert _run("curve", "--p", "1.5", "--out", str(out)) == 2
    assert _run("curve", "--f-max", "1.0", "--out", str(out)) == 2
    assert _run("curve", "--bet", "uniform", "--lb", "-0.5", "--out", str(out)) == 2
    assert _run("simulate", "--mode", "full", "--clock", "gamma", "--theta", "0.5", "--out", str(out)) == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_branch_error_exits_3_without_output(tmp_path):
    out = tmp_path / "branch.csv"
    code = _run("curve", "--clock", "inverse_gaussian", "--theta", "0.5", "--bet", "uniform",
                "--lb", "-0.5", "--ub", "20", "--f-max", "0.5", "--f-step", "0.1", "--out", str(out))
    assert code == 3
    assert list(tmp_path.iterdir()) == []


def test_unknown_choice_is_rejected_by_parser():
    with pytest.raises(SystemExit) as info:
        _run("curve", "--format", "xml")
    assert info.value.code == 2


# ----- config file -----

def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        'clock': ["gamma"], 'theta': [0.5], 'f': 0.06, 'hurdle': 1.0005, 'format': "json",
    }))
    out = tmp_path / "accept.json"
    assert _run("accept", "--config", str(config), "--out", str(out)) == 0
    index = json.loads(out.read_text())['rows'][0]['x']
    assert 0.8 < index < 0.81

    assert _run("accept", "--config", str(config), "--hurdle", "1", "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload['rows'][0]['x'] == "inf"
    assert payload['family'] == {'kind': 'power'}


def test_unreadable_config_exits_2(tmp_path):
    config = tmp_path / "broken.json"
    config.write_text("{not json")
    assert _run("solve", "--config", str(config)) == 2


# ----- accept -----

def test_accept_grid_reports_sign_test(tmp_path):
    out = tmp_path / "accept.json"
    code = _run("accept", "--clock", "gamma", "--theta", "0.5", "--f-min", "0.06", "--f-max", "0.12",
                "--f-step", "0.06", "--x", "3", "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())['rows']
    assert [row['x'] for row in rows] == ["inf", 0.0]
    assert 0 < rows[0]['distorted_growth'] < rows[0]['growth']
    assert rows[0]['model_label'] == "VG(theta=0.5)"


# ----- simulate -----

def test_simulation_reruns_are_byte_identical(tmp_path):
    args = ["simulate", "--mode", "full", "--clock", "gamma", "--theta", "0.5", "--f", "0.06",
            "--periods", "200", "--paths", "300", "--seed", "17"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(*args, "--out", str(first)) == 0
    assert _run(*args, "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()
    payload = json.loads(first.read_text())
    assert payload['config']['paths'] == 300
    assert payload['ruin_fraction'] + payload['ceiling_fraction'] <= 1.0


def test_simulation_dump_paths(tmp_path):
    out, dump = tmp_path / "sim.json", tmp_path / "paths.csv"
    code = _run("simulate", "--mode", "full", "--clock", "inverse_gaussian", "--theta", "0.5", "--f", "0.06",
                "--periods", "50", "--paths", "40", "--out", str(out), "--dump-paths", str(dump))
    assert code == 0
    frame = _csv(dump)
    assert list(frame.columns) == ['path_index', 'log_terminal_wealth', 'tau_N', 'cov', 's_bar']
    assert len(frame) == 40
    assert _run("simulate", "--mode", "full", "--f", "0.06", "--paths", "5",
                "--out", str(dump), "--dump-paths", str(dump)) == 2


def test_clock_only_simulation(tmp_path):
    out = tmp_path / "clock.json"
    code = _run("simulate", "--clock", "gamma", "--theta", "0.5", "--s-bar", "0.5",
                "--periods", "20", "--paths", "1000", "--quiet", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload['config']['mode'] == "clock_only"
    assert payload['geo_mean_growth'] == pytest.approx(1.77778, rel=0.1)


# ----- tables -----

def test_sweep_table(tmp_path):
    out = tmp_path / "sweep.csv"
    assert _run("sweep", "--theta-grid", "0,0.5,1", "--out", str(out)) == 0
    frame = _csv(out)
    assert frame['theta'].tolist() == [0.0, 0.5, 1.0]
    assert frame['f_c'].iloc[-1] == pytest.approx(0.06, abs=1e-8)


@pytest.mark.slow
def test_table1_command(tmp_path):
    out = tmp_path / "table1.csv"
    assert _run("table1", "--out", str(out)) == 0
    frame = _csv(out)
    assert len(frame) == 6
    assert {'f_c', 'f_c_ref', 'f_c_delta', 'lb', 'ub'} <= set(frame.columns)
    baseline = frame[frame['theta'] == 0.0].iloc[0]
    assert baseline['f_c'] == pytest.approx(1.17404, abs=1e-4)
    assert (frame['f_c_delta'].abs() <= TABLE1_TARGETS['reference_tolerance']).all()


# ----- fraction grid -----

def test_fraction_grid_never_passes_f_max():
    assert app.RunConfig.from_settings("curve", {'f_max': 0.11, 'f_step': 0.04}).f_grid == [0.0, 0.04, 0.08]
    assert app.RunConfig.from_settings("curve", {'f_min': 0.06, 'f_max': 0.12, 'f_step': 0.06}).f_grid == [0.06, 0.12]
    default = app.RunConfig.from_settings("curve", {}).f_grid
    assert len(default) == 71
    assert default[-1] == pytest.approx(0.14)
    assert max(default) <= 0.14


def test_grid_close_to_max_fraction_is_accepted(tmp_path):
    out = tmp_path / "edge.csv"
    assert _run("curve", "--f-max", "0.99", "--f-step", "0.04", "--out", str(out)) == 0
    assert _csv(out)['f'].iloc[-1] == pytest.approx(0.96)


# ----- determinism -----

@pytest.mark.parametrize("argv", [
    ["curve", "--clock", "gamma", "--clock", "inverse_gaussian", "--theta", "0.5", "--theta", "0.5"],
    ["solve", "--clock", "degenerate", "--clock", "gamma", "--theta", "0", "--theta", "0.5"],
    ["accept", "--clock", "gamma", "--theta", "0.5", "--f-min", "0.02", "--f-max", "0.1",
     "--f-step", "0.02", "--hurdle", "1.0002", "--x", "1"],
    ["sweep", "--theta-grid", "0,0.25,0.5"],
], ids=["curve", "solve", "accept", "sweep"])
def test_reruns_are_byte_identical(tmp_path, argv):
    first, second = tmp_path / "first.out", tmp_path / "second.out"
    assert _run(*argv, "--out", str(first)) == 0
    assert _run(*argv, "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.stat().st_size > 0


@pytest.mark.slow
def test_table1_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert _run("table1", "--out", str(first)) == 0
    assert _run("table1", "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()


# ----- configured pieces -----

def test_simulation_settings_fall_back_to_defaults():
    config = app.RunConfig.from_settings("simulate", {'periods': 30, 'paths': 5, 'dump_paths': "paths.csv"})
    assert config.sim.periods == 30
    assert config.sim.paths == 5
    assert config.sim.mode == "clock_only"
    assert config.sim.s_bar == 0.5
    assert config.sim.dump_paths is True
