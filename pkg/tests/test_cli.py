import json

import pytest
from click.testing import CliRunner

from dhat import __version__
from dhat.cli import main


@pytest.fixture
def run(fixtures_dir, monkeypatch):
    monkeypatch.delenv("DHAT_MAX_CELLS", raising=False)
    runner = CliRunner()

    def call(*args, env=None):
        args = [str(fixtures_dir / a) if a.endswith((".pv", ".json")) else a for a in args]
        return runner.invoke(main, args, env=env)

    return call


def test_analyze_swiss_flag_exit_2(run):
    r = run("analyze", "swiss_flag.pv")
    assert r.exit_code == 2
    data = json.loads(r.output)
    assert data["version"] == __version__
    assert data["deadlocks"] == [[1, 1]]
    assert data["unreachable"] == [[3, 3]]


def test_analyze_independent_exit_0(run):
    r = run("analyze", "independent.pv")
    assert r.exit_code == 0
    assert json.loads(r.output)["deadlocks"] == []


def test_analyze_malformed_exit_1(run):
    r = run("analyze", "malformed.pv")
    assert r.exit_code == 1
    assert "2:1" in r.output


def test_analyze_text(run):
    r = run("analyze", "swiss_flag.pv", "--format", "text")
    assert r.exit_code == 2
    assert "deadlocks: 1\n  (1,1)" in r.output


def test_analyze_needs_program(run):
    assert run("analyze", "square.json").exit_code == 1


def test_homology_annulus(run):
    r = run("homology", "annulus.pv", "--theory", "cube")
    assert r.exit_code == 0
    groups = {g["degree"]: g["betti"] for g in json.loads(r.output)["groups"]}
    assert groups == {0: 1, 1: 1}


def test_homology_glob_gl_and_branching_levels_agree(run):
    out = {}
    for theory in ("gl", "gl-"):
        r = run("homology", "vee.json", "--theory", theory, "--glob", "1", "--augmentation", "realized")
        assert r.exit_code == 0
        out[theory] = json.loads(r.output)
    assert out["gl"]["levels"] == out["gl-"]["levels"]
    assert out["gl"]["groups"] == out["gl-"]["groups"]


def test_homology_degree_out_of_range(run):
    assert run("homology", "annulus.pv", "--degrees", "5").exit_code == 1
    assert run("homology", "annulus.pv", "--theory", "gl", "--degrees", "2").exit_code == 1
    assert run("homology", "annulus.pv", "--degrees", "x").exit_code == 1


def test_cell_cap_and_truncation(run):
    r = run("homology", "swiss_flag.pv", "--theory", "gl-", "--max-cells", "10")
    assert r.exit_code == 1 and "cells" in r.output
    r = run("cells", "square.json", "--max-cells", "5", "--allow-truncation")
    assert r.exit_code == 0 and "truncated: true" in r.output


def test_env_cell_cap(run):
    r = run("cells", "square.json", env={"DHAT_MAX_CELLS": "5"})
    assert r.exit_code == 1
    assert run("cells", "square.json", env={"DHAT_MAX_CELLS": "100"}).exit_code == 0
    assert run("cells", "square.json", env={"DHAT_MAX_CELLS": "lots"}).exit_code == 1


def test_cells_of_square(run):
    r = run("cells", "square.json", "--max-dim", "2")
    assert r.exit_code == 0
    assert "counts: 4 6 1" in r.output
    data = json.loads(run("cells", "square.json", "--format", "json").output)
    assert data["version"] == __version__
    assert [c["dim"] for c in data["cells"]].count(1) == 6


def test_export_formats(run, tmp_path):
    out = tmp_path / "t.json"
    r = run("export", "hollow_square.json", "-o", str(out))
    assert r.exit_code == 0 and r.output == ""
    assert json.loads(out.read_text())["version"] == __version__
    r = run("export", "hollow_square.json", "--format", "sparse")
    lines = r.output.splitlines()
    assert lines[0].startswith(f"# dhat {__version__}")
    entries = [line for line in lines if not line.startswith("#")]
    assert len(entries) == 8
    r = run("export", "hollow_square.json", "--format", "sparse", "--theory", "gl-")
    assert r.exit_code == 0 and "# basis -1 4" in r.output


def test_render_swiss(run):
    r = run("render", "swiss_flag.pv")
    assert r.exit_code == 0
    svg = r.output
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count('class="deadlock"') == 1
    assert svg.count('class="unreachable"') == 1
    assert svg.count('class="forbidden"') == 12
    assert ">init<" in svg and ">final<" in svg


def test_render_needs_two_processes(run):
    r = run("render", "three.pv")
    assert r.exit_code == 1
    assert "exactly 2 processes" in r.output


def test_usage_errors_exit_1(run):
    assert run("analyze", "nope.pv").exit_code == 1
    assert run("analyze").exit_code == 1
    assert run("frobnicate").exit_code == 1
    assert run("homology", "annulus.pv", "--theory", "zz").exit_code == 1


def test_version(run):
    r = run("--version")
    assert __version__ in r.output
