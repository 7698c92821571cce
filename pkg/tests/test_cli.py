import csv
import json
import subprocess
import sys

import pytest

from ptphase.cli import main


def run_cli(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    assert code == 0
    return out


def read_rows(path):
    with open(path) as handle:
        return list(csv.DictReader(handle))


class TestHaarAnalytic:
    def test_grid_shape(self, tmp_path):
        out = run_cli(["haar-analytic", "--nab", "10", "--grid", "full"], tmp_path)
        rows = read_rows(out)
        assert len(rows) == 11 * 21
        assert set(rows[0]) == {
            "family", "N_A", "N_B", "N_C", "quantity", "value", "std_error",
            "n_samples", "seed",
        }
        assert all(r["quantity"] == "r2_tilde" for r in rows)

    def test_byte_identical_reruns(self, tmp_path):
        a = run_cli(["haar-analytic", "--nab", "6", "--seed", "9"], tmp_path, "a.csv")
        b = run_cli(["haar-analytic", "--nab", "6", "--seed", "9"], tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_coarse_grid(self, tmp_path):
        out = run_cli(["haar-analytic", "--nab", "64", "--grid", "8x8"], tmp_path)
        rows = read_rows(out)
        assert len(rows) <= 64
        assert len({r["N_A"] for r in rows}) <= 8


class TestStabilizer:
    def test_ghz_bell_example(self, tmp_path):
        out = run_cli(["stabilizer", "--triple", "0,0,0,1,1,0,0"], tmp_path)
        table = {r["quantity"]: float(r["value"]) for r in read_rows(out)}
        assert table["r2_mean"] == 1.0
        assert table["negativity"] == 1.0
        assert table["p2"] == pytest.approx(0.5)
        assert table["p3"] == pytest.approx(1 / 16)
        assert table["p4"] == pytest.approx(1 / 32)

    def test_bad_triple_length(self, capsys):
        code = main(["stabilizer", "--triple", "1,2,3"])
        assert code == 2
        assert "7 integers" in capsys.readouterr().err


class TestSeededFamilies:
    def test_haar_mc_reproducible(self, tmp_path):
        args = ["haar-mc", "--na", "2", "--nb", "2", "--nc", "2",
                "--samples", "10", "--seed", "4"]
        a = run_cli(args, tmp_path, "a.csv")
        b = run_cli(args, tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()
        quantities = {r["quantity"] for r in read_rows(a)}
        assert {"p2", "p3", "p4", "r2_mean", "r2_tilde", "negativity", "e3"} <= quantities

    def test_jobs_flag_does_not_change_results(self, tmp_path):
        base = ["haar-mc", "--na", "1", "--nb", "2", "--nc", "2", "--samples", "8",
                "--seed", "3"]
        a = run_cli(base + ["--jobs", "1"], tmp_path, "a.csv")
        b = run_cli(base + ["--jobs", "4"], tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_fermion_rows(self, tmp_path):
        out = run_cli(["fermion", "--na", "2", "--nb", "2", "--nc", "2",
                       "--samples", "12", "--seed", "1"], tmp_path)
        rows = read_rows(out)
        assert any(r["quantity"] == "r2_tilde" for r in rows)
        assert all(r["family"] == "fermion" for r in rows)

    def test_doped_family_tags(self, tmp_path):
        out = run_cli(["doped-mg", "--na", "2", "--nb", "2", "--nc", "0",
                       "--nswap", "0,2", "--samples", "5", "--seed", "1"], tmp_path)
        families = {r["family"] for r in read_rows(out)}
        assert families == {"doped-mg:nswap=0", "doped-mg:nswap=2"}


class TestJsonManifest:
    def test_manifest_fields(self, tmp_path):
        out = tmp_path / "run.json"
        code = main(["haar-analytic", "--nab", "4", "--format", "json",
                     "--out", str(out), "--seed", "17"])
        assert code == 0
        payload = json.loads(out.read_text())
        manifest = payload["manifest"]
        assert manifest["subcommand"] == "haar-analytic"
        assert manifest["seed"] == 17
        assert manifest["parameters"]["nab"] == 4
        assert payload["rows"]
        assert "wall_clock_s" in manifest


class TestPxpCommand:
    def test_small_run(self, tmp_path):
        out = run_cli(["pxp", "--n", "6", "--quench", "z2", "--snapshots", "5",
                       "--window", "20,30"], tmp_path)
        rows = read_rows(out)
        partitions = {(r["N_A"], r["N_B"], r["N_C"]) for r in rows}
        assert len(partitions) == sum(5 - nc for nc in range(0, 5))
        assert {"r2_tilde", "negativity", "entropy"} <= {r["quantity"] for r in rows}


class TestShadowsCommand:
    def test_small_campaign(self, tmp_path):
        out = run_cli(["shadows", "--na", "1", "--nb", "1", "--nc", "1",
                       "--ns", "3", "--nu", "12", "--nm", "3", "--seed", "2"], tmp_path)
        rows = read_rows(out)
        quantities = {r["quantity"] for r in rows}
        assert {"p2", "p3", "p4", "r2_tilde"} <= quantities
        for r in rows:
            if r["quantity"] != "r2_tilde":
                assert r["std_error"] != ""


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ptphase.cli", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "ptphase" in proc.stdout

    def test_invalid_subcommand(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ptphase.cli", "frobnicate"],
            capture_output=True, text=True,
        )
        assert proc.returncode != 0
        assert "usage" in proc.stderr.lower()


class TestMpsCommand:
    def test_point_run(self, tmp_path):
        out = run_cli(["mps", "--nab", "4", "--chi", "2", "--na-list", "2",
                       "--nc-list", "0,4", "--samples", "6", "--seed", "5"], tmp_path)
        rows = read_rows(out)
        assert {r["quantity"] for r in rows} == {"r2_tilde", "negativity"}
        assert len(rows) == 4


class TestNoiseCommand:
    def test_full_noise_flat_diagram(self, tmp_path):
        out = run_cli(["noise", "--nab", "4", "--epsilon", "1.0"], tmp_path)
        rows = read_rows(out)
        assert all(float(r["value"]) == pytest.approx(1.0) for r in rows)
