"""Raw CSV consumption, grouping semantics, figure rendering."""

import subprocess
import sys

import numpy as np
import pytest

from plotkit import (
    DataError,
    FigureSpec,
    SchemaError,
    group_diffs,
    read_raw,
    render_histograms,
)

HEADER = "scenario,rep,arm,is_chosen,N,stop_time,mean_hat,mu_true,diff,censored"
ROWS = [
    "demo,0,1,0,2,3,0.5,0.25,0.25,0",
    "demo,0,2,0,1,3,1.25,1,0.25,0",
    "demo,0,1,1,2,3,0.5,0.25,0.25,0",
    "demo,1,1,0,1,3,0.75,0.25,0.5,0",
    "demo,1,2,0,2,3,0.5,1,-0.5,0",
    "demo,1,2,1,2,3,0.5,1,-0.5,0",
    "demo,2,1,0,3,3,0.25,0.25,0,1",
    "demo,2,2,0,0,3,,1,,1",
]


def _write(tmp_path, rows, name="raw.csv", header=HEADER):
    path = tmp_path / name
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return str(path)


def test_read_raw_parses_the_contract(tmp_path):
    rf = read_raw(_write(tmp_path, ROWS))
    assert rf.scenario == "demo"
    assert len(rf.rows) == 8
    assert rf.rows[-1].diff is None and rf.rows[-1].censored


def test_missing_column_is_named(tmp_path):
    header = HEADER.replace(",diff", "")
    with pytest.raises(SchemaError) as err:
        read_raw(_write(tmp_path, [], header=header))
    assert "diff" in str(err.value) and ":1" in str(err.value)


def test_reordered_header_is_rejected(tmp_path):
    cols = HEADER.split(",")
    cols[0], cols[1] = cols[1], cols[0]
    with pytest.raises(SchemaError):
        read_raw(_write(tmp_path, [], header=",".join(cols)))


@pytest.mark.parametrize(
    "row",
    [
        "demo,0,1,0,2,3,0.5,0.25,0.25",
        "demo,0,x,0,2,3,0.5,0.25,0.25,0",
        "demo,0,1,2,2,3,0.5,0.25,0.25,0",
        "demo,0,1,0,2,3,,0.25,0.25,0",
        "other,0,1,0,2,3,0.5,0.25,0.25,0",
    ],
)
def test_malformed_rows_carry_their_line_number(tmp_path, row):
    with pytest.raises(SchemaError) as err:
        read_raw(_write(tmp_path, ROWS + [row]))
    assert ":10" in str(err.value)


def test_empty_file_raises_data_error(tmp_path):
    with pytest.raises(DataError):
        read_raw(_write(tmp_path, []))


def test_group_arm_uses_uncensored_per_arm_rows(tmp_path):
    rf = read_raw(_write(tmp_path, ROWS))
    groups = group_diffs([rf], "arm")
    assert groups == {"arm 1": [0.25, 0.5], "arm 2": [0.25, -0.5]}


def test_group_chosen_uses_the_chosen_rows(tmp_path):
    rf = read_raw(_write(tmp_path, ROWS))
    assert group_diffs([rf], "chosen") == {"chosen": [0.25, -0.5]}


def test_group_scenario_pools_per_file(tmp_path):
    a = read_raw(_write(tmp_path, ROWS, name="a.csv"))
    other = [r.replace("demo", "two") for r in ROWS]
    b = read_raw(_write(tmp_path, other, name="b.csv"))
    groups = group_diffs([a, b], "scenario")
    assert list(groups) == ["demo", "two"]
    assert groups["demo"] == groups["two"] == [0.25, 0.25, 0.5, -0.5]


def test_empty_group_after_filtering_is_an_error(tmp_path):
    never_pulled = [
        "demo,0,1,0,2,3,0.5,0.25,0.25,0",
        "demo,0,2,0,0,3,,1,,0",
        "demo,0,1,1,2,3,0.5,0.25,0.25,0",
    ]
    rf = read_raw(_write(tmp_path, never_pulled))
    with pytest.raises(DataError) as err:
        group_diffs([rf], "arm")
    assert "arm 2" in str(err.value)


def test_figure_spec_validation(tmp_path):
    with pytest.raises(SchemaError):
        FigureSpec(raw_paths=(), out_path="x.svg")
    with pytest.raises(SchemaError):
        FigureSpec(raw_paths=("a",), out_path="x.svg", bins=9)
    with pytest.raises(SchemaError):
        FigureSpec(raw_paths=("a",), out_path="x.svg", group="rep")


def test_render_writes_svg_and_reports_exact_group_means(tmp_path):
    raw = _write(tmp_path, ROWS)
    out = tmp_path / "fig" / "demo.svg"
    result = render_histograms(FigureSpec(raw_paths=(raw,), out_path=str(out), group="arm", bins=12))
    assert out.exists() and "<svg" in out.read_text()[:600]
    assert [p.label for p in result.panels] == ["arm 1", "arm 2"]
    assert result.panels[0].bias == float(np.mean([0.25, 0.5]))
    assert result.panels[1].bias == float(np.mean([0.25, -0.5]))
    assert result.panels[0].n == 2 and result.panels[0].std_err is not None


def test_render_single_observation_group_has_no_se(tmp_path):
    rows = ["demo,0,1,0,1,1,0.5,0.25,0.25,0", "demo,0,1,1,1,1,0.5,0.25,0.25,0"]
    raw = _write(tmp_path, rows)
    result = render_histograms(FigureSpec(raw_paths=(raw,), out_path=str(tmp_path / "one.svg")))
    assert result.panels[0].std_err is None


CLI = [sys.executable, "-m", "plotkit.cli"]


def test_cli_plot_happy_path(tmp_path):
    raw = _write(tmp_path, ROWS)
    proc = subprocess.run(
        CLI + ["plot", "--raw", raw, "--group", "chosen", "--out", str(tmp_path / "figs")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "figs" / "demo-chosen.svg").exists()
    assert "chosen: bias" in proc.stdout


def test_cli_validation_and_io_exit_codes(tmp_path):
    bad = _write(tmp_path, ["nonsense"])
    proc = subprocess.run(
        CLI + ["plot", "--raw", bad, "--out", str(tmp_path)], capture_output=True, text=True
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        CLI + ["plot", "--raw", str(tmp_path / "none.csv"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
    proc = subprocess.run(
        CLI + ["plot", "--raw", bad, "--bins", "5", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
