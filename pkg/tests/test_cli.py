"""Command-line behavior: exit codes, output schemas, determinism."""

import json
import pathlib
import textwrap

import pytest

from vlcplace.cli import (EXIT_INFEASIBLE, EXIT_OK, EXIT_PARSE, main)

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

SMALL = """
[room]
x_len_m = 6.0
y_len_m = 4.0

[grid]
grid_cols = 2
grid_rows = 2

[physical]
detector_area_m2 = 1e-4
semi_angle_deg = 60
fov_semi_angle_deg = 60
refractive_index = 1.5
noise_std = 0.04
height_m = 2.5
co_channel_interference = off

[receivers]
count_x = 6
count_y = 4

[constraints]
rate_min = 0.4
illum_min = 0.3
uniformity_max = 0.2

[solver]
scan_points = 48
max_dual_iters = 200
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "room.ini"
    path.write_text(textwrap.dedent(SMALL))
    return str(path)


def test_solve_lca_writes_centered_report(config, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["solve", "--config", config, "--algorithm", "lca",
                 "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    positions = sorted(map(tuple, data["layout"]["positions"]))
    assert positions == [(1.5, 1.0), (1.5, 3.0), (4.5, 1.0), (4.5, 3.0)]
    assert data["feasible"] is True


def test_malformed_config_exits_2_and_names_the_field(config, tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(textwrap.dedent(SMALL).replace("noise_std = 0.04",
                                                  "noise_std = oops"))
    code = main(["solve", "--config", str(bad)])
    assert code == EXIT_PARSE
    assert "noise_std" in capsys.readouterr().err


def test_unachievable_uniformity_exits_3_with_diagnostic(config, tmp_path, capsys):
    tight = tmp_path / "tight.ini"
    tight.write_text(textwrap.dedent(SMALL).replace("uniformity_max = 0.2",
                                                    "uniformity_max = 0.0001"))
    code = main(["solve", "--config", str(tight)])
    assert code == EXIT_INFEASIBLE
    err = capsys.readouterr().err
    assert "infeasible" in err and "CV" in err


def test_sweep_row_count_and_schema(config, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", config, "--axis", "rate",
                 "--from", "0.2", "--to", "0.4", "--steps", "2",
                 "--algorithms", "lca", "lxyo", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "axis,value,algorithm,sum_power,cv_rmse,feasible,iterations"
    assert len(lines) == 1 + 2 * 2      # steps x algorithms
    assert all(line.startswith("rate,") for line in lines[1:])


def test_sweep_flags_infeasible_points_instead_of_aborting(config, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--config", config, "--axis", "uniformity",
                 "--from", "0.0001", "--to", "0.2", "--steps", "2",
                 "--algorithms", "lxyu", "--out", str(out)])
    assert code == EXIT_OK
    rows = out.read_text().strip().splitlines()[1:]
    flags = [row.split(",")[5] for row in rows]
    assert flags == ["0", "1"]          # tight cap infeasible, loose cap fine


def test_sweep_rejects_bad_ranges(config, capsys):
    assert main(["sweep", "--config", config, "--axis", "rate",
                 "--from", "0.5", "--to", "0.4", "--steps", "3"]) == EXIT_PARSE
    assert main(["sweep", "--config", config, "--axis", "rate",
                 "--from", "0.4", "--to", "0.5", "--steps", "1"]) == EXIT_PARSE


def test_heatmap_resolution_two_gives_four_points(config, tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["heatmap", "--config", config, "--algorithm", "lca",
                 "--resolution", "2", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("# algorithm=lca cv_rmse=")
    assert lines[1] == "x,y,illuminance"
    assert len(lines) == 2 + 4


def test_compare_table_schema_and_determinism(config, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert main(["compare", "--config", config, "--out", str(out_a)]) == EXIT_OK
    assert main(["compare", "--config", config, "--out", str(out_b)]) == EXIT_OK
    assert out_a.read_bytes() == out_b.read_bytes()
    lines = out_a.read_text().strip().splitlines()
    assert lines[0] == "algorithm,sum_power,cv_rmse,savings_vs_lca_pct,feasible"
    assert [line.split(",")[0] for line in lines[1:]] == ["lca", "lxyo", "lxyu"]
    # savings of lca vs itself is zero
    assert float(lines[1].split(",")[3]) == 0.0


def test_compare_reports_positive_savings_on_reference_room(tmp_path):
    out = tmp_path / "cmp.csv"
    code = main(["compare", "--config",
                 str(CONFIG_DIR / "room_4led_highrate.ini"), "--out", str(out)])
    assert code == EXIT_OK
    rows = {line.split(",")[0]: line.split(",")
            for line in out.read_text().strip().splitlines()[1:]}
    savings = float(rows["lxyu"][3])
    assert savings > 0.0
