from __future__ import annotations

import json
import math

import pytest
from click.testing import CliRunner

from hypcap import __version__
from hypcap.bie import SolverConfig
from hypcap.capacity import capacity, single_disk_capacity
from hypcap.cli import main, write_table
from hypcap.constellation import collinear_chain
from hypcap.hypgeo import hyp_distance


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


def one_disk_file(tmp_path, radius: float = 1.0):
    path = tmp_path / "one.json"
    path.write_text(json.dumps({"geometry": "hyperbolic", "disks": [{"center": [0, 0], "radius": radius}]}))
    return path


def pair_file(tmp_path):
    path = tmp_path / "pair.json"
    data = {
        "geometry": "hyperbolic",
        "delta": 0.02,
        "disks": [
            {"center": [-0.45, 0.0], "radius": 0.3},
            {"center": [0.35, 0.0], "radius": 0.3},
        ],
    }
    path.write_text(json.dumps(data))
    return path


def read_rows(path) -> tuple[list[str], list[list[str]]]:
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestWriteTable:
    def test_empty_rows_header_only(self, tmp_path):
        out = tmp_path / "t.csv"
        write_table([], out, ["a", "b"])
        assert out.read_text() == "a,b\n"

    def test_roundtrip_full_precision(self, tmp_path):
        out = tmp_path / "t.csv"
        values = (0.1 + 0.2, 1.0 / 3.0, 7.230698262298405)
        write_table([values], out, ["x", "y", "z"])
        _, rows = read_rows(out)
        assert tuple(float(v) for v in rows[0]) == values

    def test_nan_and_none_cells_empty(self, tmp_path):
        out = tmp_path / "t.csv"
        write_table([(1.0, math.nan, None)], out, ["a", "b", "c"])
        _, rows = read_rows(out)
        assert rows[0][1] == "" and rows[0][2] == ""

    def test_lf_endings_and_decimal_point(self, tmp_path):
        out = tmp_path / "t.csv"
        write_table([(0.5, 2)], out, ["a", "b"])
        raw = out.read_bytes()
        assert b"\r" not in raw
        assert raw == b"a,b\n0.5,2\n"


class TestCap:
    def test_single_disk_closed_form(self, runner, tmp_path):
        result = runner.invoke(main, ["cap", str(one_disk_file(tmp_path))])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["cap"] == pytest.approx(single_disk_capacity(1.0), abs=1e-12)

    def test_output_file_and_sidecar(self, runner, tmp_path):
        out = tmp_path / "res.json"
        result = runner.invoke(main, ["cap", str(one_disk_file(tmp_path)), "-o", str(out)])
        assert result.exit_code == 0
        assert json.loads(out.read_text())["cap"] > 0
        meta = json.loads((tmp_path / "res.json.meta.json").read_text())
        assert set(meta) == {"n", "alpha", "mode", "delta", "version"}
        assert meta["n"] == 128
        assert meta["alpha"] == "auto"
        assert meta["mode"] == "direct"
        assert meta["version"] == __version__

    def test_explicit_alpha_flag(self, runner, tmp_path):
        path = pair_file(tmp_path)
        result = runner.invoke(main, ["cap", str(path), "--alpha", "0,0.8"])
        assert result.exit_code == 0
        assert json.loads(result.output)["diagnostics"]["alpha"] == [0.0, 0.8]

    def test_euclidean_geometry_converted(self, runner, tmp_path):
        path = tmp_path / "euc.json"
        path.write_text(
            json.dumps({"geometry": "euclidean", "disks": [{"center": [0, 0], "radius": 0.5}]})
        )
        result = runner.invoke(main, ["cap", str(path)])
        assert result.exit_code == 0
        expected = single_disk_capacity(2.0 * math.atanh(0.5))
        assert json.loads(result.output)["cap"] == pytest.approx(expected, abs=1e-10)

    def test_malformed_json_rejected(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        result = runner.invoke(main, ["cap", str(path)])
        assert result.exit_code != 0
        assert "malformed JSON" in result.output

    def test_overlap_names_pair(self, runner, tmp_path):
        path = tmp_path / "overlap.json"
        data = {"disks": [{"center": [0, 0], "radius": 0.5}, {"center": [0.1, 0], "radius": 0.5}]}
        path.write_text(json.dumps(data))
        result = runner.invoke(main, ["cap", str(path)])
        assert result.exit_code != 0
        assert "(0,1)" in result.output

    def test_bad_alpha_rejected(self, runner, tmp_path):
        result = runner.invoke(main, ["cap", str(one_disk_file(tmp_path)), "--alpha", "bogus"])
        assert result.exit_code != 0


class TestSweepCollinear:
    def test_matches_library_and_rerun_identical(self, runner, tmp_path):
        args = ["sweep-collinear", "--radii", "0.3,0.25", "--d-list", "0.1,0.2", "--n", "64"]
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        assert runner.invoke(main, args + ["-o", str(out1)]).exit_code == 0
        assert runner.invoke(main, args + ["-o", str(out2)]).exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_rows(out1)
        assert header == ["d", "cap"]
        config = SolverConfig(n=64, alpha="auto")
        for row in rows:
            d = float(row[0])
            assert float(row[1]) == capacity(collinear_chain([0.3, 0.25], d), config).cap

    def test_range_form(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        args = [
            "sweep-collinear", "--radii", "0.3,0.25",
            "--d-min", "0.1", "--d-max", "0.3", "--steps", "3", "--n", "64", "-o", str(out),
        ]
        assert runner.invoke(main, args).exit_code == 0
        _, rows = read_rows(out)
        assert [float(r[0]) for r in rows] == [0.1, 0.2, 0.3]

    def test_missing_range_rejected(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        result = runner.invoke(main, ["sweep-collinear", "--radii", "0.3", "-o", str(out)])
        assert result.exit_code != 0
        assert "--d-list" in result.output


class TestSweepThreecircle:
    def test_rows_and_equilateral_sample(self, runner, tmp_path):
        out = tmp_path / "tc.csv"
        args = ["sweep-threecircle", "--steps", "5", "--n", "64", "-o", str(out)]
        assert runner.invoke(main, args).exit_code == 0
        header, rows = read_rows(out)
        assert header == ["d", "cap"]
        ds = [float(r[0]) for r in rows]
        caps = [float(r[1]) for r in rows]
        assert ds == sorted(ds)
        assert ds[0] == pytest.approx(2.0 * 0.3 + 0.02, abs=1e-15)
        d_eq = hyp_distance(0.5 + 0j, 0.5 * complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)))
        assert any(abs(d - d_eq) < 1e-12 for d in ds)
        # interior spacing peaks at the equilateral sample
        assert caps.index(max(caps)) == ds.index(min(ds, key=lambda d: abs(d - d_eq)))


class TestSweepRolling:
    def test_path_samples(self, runner, tmp_path):
        out = tmp_path / "roll.csv"
        args = [
            "sweep-rolling", "--radii", "0.3,0.25,0.2", "--mobile", "0.15",
            "--samples", "5", "--n", "64", "-o", str(out),
        ]
        assert runner.invoke(main, args).exit_code == 0
        header, rows = read_rows(out)
        assert header == ["tau", "cap"]
        assert [float(r[0]) for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert all(float(r[1]) > 0 for r in rows)

    def test_impossible_roll_rejected(self, runner, tmp_path):
        # chain gap too wide for the roller: adjacent tangency circles disjoint
        out = tmp_path / "roll.csv"
        args = [
            "sweep-rolling", "--radii", "0.3,0.25,0.2", "--mobile", "0.15",
            "--chain-gap", "0.7", "--samples", "3", "--n", "64", "-o", str(out),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code != 0


class TestGrid:
    def test_grid_rows_with_empty_infeasible_cells(self, runner, tmp_path):
        out = tmp_path / "g.csv"
        args = [
            "grid", str(pair_file(tmp_path)), "--mobile", "1",
            "--x-min", "-0.6", "--x-max", "0.6", "--y-min", "-0.2", "--y-max", "0.2",
            "--resolution", "3,3", "--n", "64", "-o", str(out),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code == 0
        assert "local minimum basins:" in result.output
        header, rows = read_rows(out)
        assert header == ["x", "y", "cap"]
        assert len(rows) == 9
        # the cell on top of the fixed disk is infeasible, hence empty
        empties = [r for r in rows if r[2] == ""]
        assert len(empties) == 1
        assert float(empties[0][0]) == -0.6 and float(empties[0][1]) == 0.0

    def test_mobile_index_checked(self, runner, tmp_path):
        out = tmp_path / "g.csv"
        args = [
            "grid", str(pair_file(tmp_path)), "--mobile", "7",
            "--x-min", "0", "--x-max", "1", "--y-min", "0", "--y-max", "1",
            "--resolution", "2", "-o", str(out),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code != 0
        assert "out of range" in result.output


class TestOptimize:
    def test_slider_converges_with_trajectory(self, runner, tmp_path):
        out = tmp_path / "opt.json"
        args = [
            "optimize", str(pair_file(tmp_path)), "--mobility", "diameter,fixed",
            "--tol", "1e-4", "--n", "64", "-o", str(out),
        ]
        result = runner.invoke(main, args)
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        assert payload["k"] == 1
        best = payload["results"][0]
        assert best["status"] == "converged"
        # optimum is the contact pair; compare at the optimizer's own fidelity
        contact = capacity(
            collinear_chain([0.3, 0.3], 0.02), SolverConfig(n=64, alpha="auto", quad_oversample=1)
        ).cap
        assert best["cap"] == pytest.approx(contact, abs=1e-3)
        header, rows = read_rows(tmp_path / "opt.trajectory.csv")
        assert header == ["evaluations", "cap"]
        caps = [float(r[1]) for r in rows]
        for a, b in zip(caps, caps[1:]):
            assert b <= a + 1e-9 * (1.0 + abs(a))
        meta = json.loads((tmp_path / "opt.json.meta.json").read_text())
        assert meta["delta"] == 0.02

    def test_bad_mobility_rejected(self, runner, tmp_path):
        out = tmp_path / "opt.json"
        args = ["optimize", str(pair_file(tmp_path)), "--mobility", "diameter,wiggle", "-o", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code != 0


class TestBound:
    def test_rows_and_positive_excess(self, runner, tmp_path):
        out = tmp_path / "b.csv"
        args = ["bound", "--m", "2", "--r-min", "0.1", "--r-max", "0.3", "--r-step", "0.1", "--n", "64", "-o", str(out)]
        assert runner.invoke(main, args).exit_code == 0
        header, rows = read_rows(out)
        assert header == ["r", "cap", "lower", "l_r"]
        assert [float(r[0]) for r in rows] == pytest.approx([0.1, 0.2, 0.3])
        for row in rows:
            assert float(row[3]) > 0.0
            assert float(row[1]) > float(row[2])

    def test_m4_needs_case(self, runner, tmp_path):
        out = tmp_path / "b.csv"
        args = ["bound", "--m", "4", "--r-min", "0.1", "--r-max", "0.1", "--r-step", "0.1", "-o", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code != 0


class TestPerm:
    def test_twelve_sorted_rows(self, runner, tmp_path):
        out = tmp_path / "p.csv"
        args = ["perm", "--layout", "diameter", "--n", "64", "-o", str(out)]
        assert runner.invoke(main, args).exit_code == 0
        header, rows = read_rows(out)
        assert header == ["label", "cap"]
        assert len(rows) == 12
        labels = [r[0] for r in rows]
        assert len(set(labels)) == 12
        caps = [float(r[1]) for r in rows]
        assert caps == sorted(caps)


class TestConvergence:
    def test_error_decreases_and_sidecar_records_reference(self, runner, tmp_path):
        out = tmp_path / "cv.csv"
        args = ["convergence", str(pair_file(tmp_path)), "--n-list", "16,32", "-o", str(out)]
        result = runner.invoke(main, args)
        assert result.exit_code == 0
        header, rows = read_rows(out)
        assert header == ["n", "cap", "error"]
        assert [int(r[0]) for r in rows] == [16, 32]
        assert float(rows[1][2]) < float(rows[0][2])
        meta = json.loads((tmp_path / "cv.csv.meta.json").read_text())
        assert meta["n"] == 64


class TestMainGroup:
    def test_version(self, runner):
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output
