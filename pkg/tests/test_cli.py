import io
import json

import pytest

from conftest import data_path
from hcinfo import FormatError
from hcinfo.cli import run_command
from hcinfo.report import Report, Row, from_json, to_json
from hcinfo.scenario import parse_scenario, parse_study_design


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    res = run_command(list(argv), stdout=out, stderr=err)
    return res, out.getvalue(), err.getvalue()


def load(name):
    with open(data_path(name), "rb") as f:
        return f.read()


def scenario(**sections):
    return json.dumps({"schema_version": 1, **sections})


TASK = {
    "name": "t",
    "alphabet": {"kind": "radio", "letters": [{"label": "a1", "p": 0.5}, {"label": "a2", "p": 0.5}]},
    "cost": {"steps": {"a1": 1, "a2": 2}, "unit_step_seconds": 1.0},
}


def test_tv_menu_parses():
    sc = parse_scenario(load("tv_menu.json"))
    assert len(sc.devices) == 1
    assert list(sc.tasks) == ["tv_a", "tv_b", "tv_c"]


def test_unknown_device_is_named():
    doc = scenario(tasks=[{**TASK, "device": "joystick"}])
    with pytest.raises(FormatError, match="joystick"):
        parse_scenario(doc)


def test_duplicate_task_names():
    with pytest.raises(FormatError, match="duplicate"):
        parse_scenario(scenario(tasks=[TASK, TASK]))


def test_schema_errors_carry_json_paths():
    bad = {**TASK, "cost": {"steps": {"a1": 0, "a2": 1}, "unit_step_seconds": 1.0}}
    with pytest.raises(FormatError) as info:
        parse_scenario(scenario(tasks=[bad]))
    assert any(p.startswith("$.tasks[0].cost.steps") for p in info.value.problems)


def test_schema_version_required():
    with pytest.raises(FormatError):
        parse_scenario(json.dumps({"tasks": []}))
    with pytest.raises(FormatError):
        parse_scenario(json.dumps({"schema_version": 2}))


def test_bad_probability_sum_is_located():
    bad = {**TASK, "alphabet": {"kind": "radio", "letters": [{"label": "a1", "p": 0.5}, {"label": "a2", "p": 0.2}]}}
    with pytest.raises(FormatError, match=r"\$\.tasks\[0\]\.alphabet"):
        parse_scenario(scenario(tasks=[bad]))


def test_mistake_unknown_letter():
    bad = {**TASK, "mistake": {"from": "a2", "to": "a7", "mass": 0.1}}
    with pytest.raises(FormatError, match="a7"):
        parse_scenario(scenario(tasks=[bad]))


def test_not_json():
    with pytest.raises(FormatError):
        parse_scenario(b"{nope")


def test_epsilon_precedence():
    doc = scenario(epsilon=0.01, tasks=[TASK])
    assert parse_scenario(doc).epsilon.epsilon == 0.01
    assert parse_scenario(doc, epsilon=0.02).epsilon.epsilon == 0.02
    assert parse_scenario(scenario(tasks=[TASK])).epsilon.epsilon == 0.006299
    design = load("study3bit.json")
    assert parse_study_design(design).epsilon.epsilon == 0.006299
    assert parse_study_design(design, epsilon=0.001).epsilon.epsilon == 0.001


def test_device_cap_command():
    res, out, _ = run("device", "cap", data_path("input_devices.json"), "--device", "mouse_hd")
    assert res.code == 0
    assert "22.984 bits" in out
    assert res.report.value("device mouse_hd", "bandwidth") == pytest.approx(2298.4, abs=0.1)


def test_task_eval_tv_b():
    res, out, _ = run("task", "eval", data_path("tv_menu.json"), "--task", "tv_b")
    assert res.code == 0
    for text in ("1.157 bits", "3.800 s", "0.304 bits/s"):
        assert text in out


def test_task_eval_swap():
    res, _, _ = run("task", "eval", data_path("tv_menu.json"), "--task", "tv_b", "--swap", "a1,a2")
    assert res.report.value("task tv_b (swap a1<->a2)", "cost_benefit") == pytest.approx(0.41, abs=0.005)


def test_task_threshold_command():
    res, _, _ = run("task", "threshold", data_path("tv_menu.json"), "--task", "tv_c", "--from", "a2", "--to", "a1")
    assert res.code == 0
    assert 0.30 <= res.report.sections[0].rows[0].value <= 0.33


def test_ledger_rate_command():
    res, _, _ = run("ledger", "rate", data_path("latex_save.json"), "--ledger", "latex",
                    "--task", "save_dialog", "--seconds", "1")
    assert res.report.value("ledger latex with task save_dialog", "rate") == 57.0


def test_study_analyze_command():
    res, out, _ = run("study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv"))
    assert res.code == 0
    assert res.report.value("study three one-bit sub-models", "benefit") == pytest.approx(1.335, abs=0.01)
    assert "S1" in out


def test_study_mode_flag():
    res, _, _ = run("study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv"),
                    "--mode", "aggregate")
    assert res.report.value("study three one-bit sub-models", "mode") == "random_team_or_single_participant"


def test_dpi_demo():
    res, out, _ = run("dpi", "demo", "--trials", "1000")
    assert res.code == 0
    assert "holds: 1000/1000" in out
    assert res.report.value("data processing inequality", "holds") == "1000/1000"


def test_dpi_demo_fixed_sizes():
    res, _, _ = run("dpi", "demo", "--sizes", "3,4,2", "--trials", "50", "--seed", "7")
    assert res.report.value("data processing inequality", "holds") == "50/50"


def test_global_options_either_side():
    a = run("--format", "json", "task", "eval", data_path("tv_menu.json"), "--task", "tv_a")[1]
    b = run("task", "eval", data_path("tv_menu.json"), "--task", "tv_a", "--format", "json")[1]
    assert a == b
    json.loads(a)


def test_csv_format():
    _, out, _ = run("task", "eval", data_path("tv_menu.json"), "--task", "tv_a", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "section,label,value,unit"
    assert all(line.count(",") >= 3 for line in lines)


def test_epsilon_flag_changes_study():
    base = run("study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv"))[0]
    other = run("--epsilon", "0.01", "study", "analyze", data_path("study3bit.json"),
                data_path("study3bit_trials.csv"))[0]
    title = "study three one-bit sub-models"
    assert base.report.value(title, "potential_distortion") != other.report.value(title, "potential_distortion")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["task"],
        ["task", "eval"],
        ["bogus"],
        ["--format", "xml", "dpi", "demo"],
        ["dpi", "demo", "--sizes", "1,x,3"],
        ["dpi", "demo", "--trials", "0"],
    ],
)
def test_usage_errors_exit_2(argv):
    res, out, err = run(*argv)
    assert res.code == 2
    assert out == ""
    assert err


@pytest.mark.parametrize(
    "argv",
    [
        ["task", "eval", "/no/such/file.json", "--task", "x"],
        ["task", "eval", "TV", "--task", "nope"],
        ["device", "cap", "TV", "--device", "mouse"],
        ["--epsilon", "0.7", "task", "eval", "TV", "--task", "tv_a"],
    ],
)
def test_validation_errors_exit_1(argv):
    argv = [data_path("tv_menu.json") if a == "TV" else a for a in argv]
    res, out, err = run(*argv)
    assert res.code == 1
    assert out == ""
    assert "error" in err


def test_bad_csv_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("participant,trial,ground_truth,response,response_time_ms\np,t,111,11,5\n")
    res, _, err = run("study", "analyze", data_path("study3bit.json"), str(bad))
    assert res.code == 1
    assert "row 2" in err


def test_reports_are_deterministic():
    argv = ["study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv"), "--format", "json"]
    assert run(*argv)[1] == run(*argv)[1]


def test_verbose_footer():
    _, out, _ = run("--verbose", "dpi", "demo", "--trials", "3")
    assert "metadata" in out


def test_json_round_trip_every_command():
    commands = [
        ["device", "cap", data_path("input_devices.json"), "--device", "glove"],
        ["task", "eval", data_path("input_devices.json"), "--task", "checkbox4"],
        ["task", "threshold", data_path("tv_menu.json"), "--task", "tv_a", "--from", "a2", "--to", "a1"],
        ["study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv")],
        ["dpi", "demo", "--trials", "5"],
    ]
    for argv in commands:
        _, out, _ = run(*argv, "--format", "json")
        assert to_json(from_json(out)) == out


def test_text_numbers_carry_units():
    _, out, _ = run("study", "analyze", data_path("study3bit.json"), data_path("study3bit_trials.csv"))
    import re

    for line in out.splitlines():
        if line.startswith("==") or "mode" in line:
            continue
        assert re.search(r"\d(\.\d+)?(e-?\d+)? (bits/s|bits|s|ratio|count|Hz)\b", line), line


def test_report_rejects_unitless_numbers():
    from hcinfo import ValidationError

    with pytest.raises(ValidationError):
        Row("x", 1.0, "text")
    with pytest.raises(ValidationError):
        Row("x", 1.0, "furlongs")
    assert Report().render("text") == "\n"
