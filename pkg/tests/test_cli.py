import json
import os

import pytest

from fpplab.cli import path_from_csv, path_to_csv, render_svg, run
from fpplab.geodesic import LatticePath


def test_path_csv_roundtrip():
    p = LatticePath([(0, 0), (1, 0), (1, 1), (2, 1), (2, 0)])
    assert path_from_csv(path_to_csv(p)).vertices == p.vertices


def test_render_svg_basics():
    p = LatticePath([(0, 0), (1, 0), (2, 0)])
    svg = render_svg([p])
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 1
    assert "<script" not in svg
    with pytest.raises(ValueError):
        render_svg([])


def test_render_svg_identical_paths_overlap_everywhere():
    p = LatticePath([(0, 0), (1, 0), (2, 0)])
    svg = render_svg([p, p])
    # two path polylines + 2 shared-edge overlay polylines
    assert svg.count("<polyline") == 4
    assert svg.count("#8d1fd8") == 2


def test_render_svg_deterministic():
    p = LatticePath([(0, 0), (1, 0), (1, 1)])
    q = LatticePath([(0, 0), (0, 1), (1, 1)])
    assert render_svg([p, q]) == render_svg([p, q])


def test_cli_geodesic_writes_outputs(tmp_path):
    out = tmp_path / "g"
    code = run(["geodesic", "--dist", "unif:1:2", "--seed", "7",
                "--from", "0,0", "--to", "20,5", "--svg", "path.svg",
                "--out", str(out)])
    assert code == 0
    assert (out / "path.csv").exists()
    assert (out / "path.svg").exists()
    meta = json.loads((out / "meta.json").read_text())
    assert meta["seed"] == 7
    p = path_from_csv((out / "path.csv").read_text())
    assert p.start == (0, 0) and p.end == (20, 5)


def test_cli_refuses_overwrite(tmp_path):
    out = tmp_path / "g"
    args = ["geodesic", "--dist", "unif:1:2", "--from", "0,0", "--to", "4,0",
            "--out", str(out)]
    assert run(args) == 0
    assert run(args) == 2
    assert run(args + ["--force"]) == 0


def test_cli_deterministic_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = lambda o: ["geodesic", "--dist", "unif:1:2", "--seed", "3",
                      "--from", "0,0", "--to", "12,3", "--svg", "p.svg", "--out", str(o)]
    assert run(args(a)) == 0 and run(args(b)) == 0
    assert (a / "p.svg").read_bytes() == (b / "p.svg").read_bytes()
    assert (a / "path.csv").read_bytes() == (b / "path.csv").read_bytes()


def test_cli_ball(tmp_path):
    out = tmp_path / "b"
    assert run(["ball", "--dist", "const:1", "--t", "2", "--out", str(out)]) == 0
    rows = (out / "ball.csv").read_text().splitlines()
    assert rows[0] == "x,y" and len(rows) - 1 == 13


def test_cli_unknown_flag_usage_error():
    assert run(["geodesic", "--nope"]) == 2
    assert run(["wat"]) == 2
    assert run([]) == 2


def test_cli_mw_gaussian():
    assert run(["mw", "--gaussian", "--tau", "0.3,0.4", "--box", "0,1:-1,2"]) == 0


def test_cli_mw_requires_mode():
    assert run(["mw"]) == 2


def test_cli_fixture(tmp_path):
    fx = tmp_path / "f.txt"
    fx.write_text(
        "dist unif:900:1000\nseed 7\npath 0,0 1,0 2,0 3,0 4,0\nJ 0 4\nr 1\n"
        "rho2 1.5\nL 8\nmode enforced\n"
        "edge 0 1 H 0.25\nedge 1 1 H 0.25\nedge 2 1 H 0.25\nedge 3 1 H 0.25\n"
        "edge 0 0 V 0.25\nedge 4 0 V 0.25\n"
    )
    out = tmp_path / "fx"
    assert run(["fixture", "--file", str(fx), "--out", str(out)]) == 0
    doc = json.loads((out / "restricted.json").read_text())
    assert doc["feasible"] is True


def test_cli_small_experiment_and_workers_identical(tmp_path):
    a, b = tmp_path / "w1", tmp_path / "w2"
    base = ["midpoint", "--dist", "unif:1:2", "--seed", "5", "--trials", "6",
            "--v", "10,0", "--z", "5,0"]
    assert run(base + ["--workers", "1", "--out", str(a)]) == 0
    assert run(base + ["--workers", "2", "--out", str(b)]) == 0
    assert (a / "rows.csv").read_bytes() == (b / "rows.csv").read_bytes()


def test_cli_config_file_precedence(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"seed": 42, "t": 2.0}))
    out1 = tmp_path / "c1"
    assert run(["--config", str(conf), "ball", "--dist", "const:1", "--out", str(out1)]) == 0
    # config seed applied; flag overrides config
    out2 = tmp_path / "c2"
    assert run(["--config", str(conf), "ball", "--dist", "const:1", "--t", "1",
                "--out", str(out2)]) == 0
    n1 = len((out1 / "ball.csv").read_text().splitlines()) - 1
    n2 = len((out2 / "ball.csv").read_text().splitlines()) - 1
    assert n1 == 13 and n2 == 5


def test_cli_shape_and_flatedge(tmp_path):
    out = tmp_path / "s"
    assert run(["shape", "--dist", "const:1", "--t", "10", "--trials", "1",
                "--out", str(out)]) == 0
    head = (out / "boundary.csv").read_text().splitlines()[0]
    assert head == "theta,radius,stderr"
    out2 = tmp_path / "fe"
    assert run(["flatedge", "--dist", "const:1", "--theta1", "0.0",
                "--theta2", "0.7853981633974483", "--r2", "1.4142135623730951",
                "--n", "8", "--trials", "4", "--out", str(out2)]) == 0
    doc = json.loads((out2 / "flatedge.json").read_text())
    assert doc["verdict"] == "consistent-with-flat"


def test_cli_sides(tmp_path):
    out = tmp_path / "sd"
    assert run(["sides", "--epsilon", "0.3", "--pairs", "0.5:0.9", "--n", "8",
                "--trials", "4", "--out", str(out)]) == 0
    doc = json.loads((out / "sides.json").read_text())
    assert doc["kind"] == "sides" and len(doc["probes"]) == 1
