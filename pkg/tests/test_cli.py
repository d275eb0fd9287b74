import hashlib
import json

import pandas as pd
import pytest

from fleetlab.cli import main

SIM_FILES = {"cross_sectional.csv", "rollout.csv", "weather.csv", "fleet.csv", "manifest.json"}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """One simulated artifact directory shared by the read-only CLI tests."""
    out = tmp_path_factory.mktemp("cli_out")
    assert main(["--out-dir", str(out), "simulate"]) == 0
    return out


class TestSimulate:
    def test_emits_expected_files(self, workdir):
        assert {p.name for p in workdir.iterdir()} == SIM_FILES

    def test_manifest_hashes_match_contents(self, workdir):
        manifest = json.loads((workdir / "manifest.json").read_text())
        assert manifest["timestamps"] is None
        assert set(manifest["files"]) == SIM_FILES - {"manifest.json"}
        for name, digest in manifest["files"].items():
            actual = hashlib.sha256((workdir / name).read_bytes()).hexdigest()
            assert actual == digest, name

    def test_same_seed_reproduces_hashes(self, workdir, tmp_path):
        again = tmp_path / "again"
        assert main(["--out-dir", str(again), "simulate"]) == 0
        m1 = json.loads((workdir / "manifest.json").read_text())
        m2 = json.loads((again / "manifest.json").read_text())
        assert m1["files"] == m2["files"]
        assert m1["config_hash"] == m2["config_hash"]

    def test_seed_override_changes_hashes(self, workdir, tmp_path):
        other = tmp_path / "other"
        assert main(["--out-dir", str(other), "--seed", "7", "simulate"]) == 0
        m1 = json.loads((workdir / "manifest.json").read_text())
        m2 = json.loads((other / "manifest.json").read_text())
        assert m1["files"] != m2["files"]


class TestAnalyze:
    def test_writes_tables_and_passes(self, workdir):
        assert main(["--out-dir", str(workdir), "analyze"]) == 0
        for name in (
            "table1_productivity",
            "table2_components",
            "table4_skill",
            "table7_correlations",
        ):
            frame = pd.read_csv(workdir / f"{name}.csv")
            assert "status" in frame.columns
            # Informational rows carry no check; nothing may fail.
            assert not (frame["status"] == "fail").any(), name
            assert (frame["status"] == "pass").any(), name

    def test_strict_profile_accepted(self, workdir):
        # The strict profile halves the bands; it must run and report honestly.
        assert main(
            ["--out-dir", str(workdir), "--tolerance-profile", "strict", "analyze"]
        ) in (0, 1)
        assert main(["--out-dir", str(workdir), "analyze"]) == 0

    def test_missing_panel_is_exit_2(self, tmp_path):
        assert main(["--out-dir", str(tmp_path), "analyze"]) == 2

    def test_truncated_panel_names_column(self, workdir, tmp_path, capsys):
        broken = tmp_path / "broken"
        broken.mkdir()
        frame = pd.read_csv(workdir / "cross_sectional.csv").drop(columns=["wait_min"])
        frame.to_csv(broken / "cross_sectional.csv", index=False)
        assert main(["--out-dir", str(broken), "analyze"]) == 2
        assert "wait_min" in capsys.readouterr().err


class TestEcon:
    def test_writes_report(self, workdir):
        assert main(["--out-dir", str(workdir), "econ"]) == 0
        report = json.loads((workdir / "econ_report.json").read_text())
        assert report["working_days"] == 300
        assert (workdir / "econ_comparison.csv").exists()
        sens = pd.read_csv(workdir / "econ_sensitivity.csv")
        assert ((sens["ratio"] - 6.4).abs() <= 0.2).all()

    def test_working_days_flag(self, workdir, tmp_path):
        out = tmp_path / "econ250"
        assert main(["--out-dir", str(out), "simulate"]) == 0
        assert main(["--out-dir", str(out), "econ", "--working-days", "250"]) == 0
        report = json.loads((out / "econ_report.json").read_text())
        assert report["working_days"] == 250


class TestCausalCommand:
    def test_causal_writes_tables(self, workdir):
        assert main(["--out-dir", str(workdir), "causal", "--placebo-draws", "25"]) == 0
        t5 = pd.read_csv(workdir / "table5_causal.csv")
        assert len(t5) >= 5
        assert (t5["status"] == "pass").all()
        es = pd.read_csv(workdir / "event_study.csv")
        assert {"k", "beta", "se"} <= set(es.columns)
        het = pd.read_csv(workdir / "heterogeneity.csv")
        assert set(het["dimension"]) == {"skill", "weather", "daytype"}
        assert (workdir / "placebo.csv").exists()


class TestAll:
    def test_skip_causal(self, tmp_path):
        out = tmp_path / "all_skip"
        assert main(["--out-dir", str(out), "all", "--skip", "causal"]) == 0
        names = {p.name for p in out.iterdir()}
        assert "table1_productivity.csv" in names
        assert "econ_report.json" in names
        assert "table5_causal.csv" not in names


class TestErrors:
    def test_bad_config_is_exit_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"drivers": -5}')
        assert main(["--config", str(cfg), "--out-dir", str(tmp_path), "simulate"]) == 2

    def test_unknown_config_key_is_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"not_a_knob": 1}')
        assert main(["--config", str(cfg), "--out-dir", str(tmp_path), "simulate"]) == 2
        assert "not_a_knob" in capsys.readouterr().err

    def test_unknown_command_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])
