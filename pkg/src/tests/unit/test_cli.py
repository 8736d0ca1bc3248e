"""
Unit Tests for the Command Line

Usage:
    pytest src/tests/unit/test_cli.py -v
"""

import argparse
import json

import pytest

from facreg.cli import main, parse_kind_mix, parse_levels
from facreg.io.layout_io import load_layout


# ============ Argument Parsing Tests ============

class TestParseLevels:
    """Tests for parse_levels"""

    def test_inclusive_range(self):
        """Test a..b includes both ends"""
        assert parse_levels("1..15") == list(range(1, 16))

    def test_list(self):
        """Test comma separated levels"""
        assert parse_levels("0,3,7") == [0, 3, 7]

    def test_single(self):
        """Test one level"""
        assert parse_levels("4") == [4]

    @pytest.mark.parametrize("text", ["5..1", "a..b", "1,x"])
    def test_invalid(self, text):
        """Test bad ranges are usage errors"""
        with pytest.raises(argparse.ArgumentTypeError):
            parse_levels(text)


class TestParseKindMix:
    """Tests for parse_kind_mix"""

    def test_pairs(self):
        """Test kind=weight pairs"""
        assert parse_kind_mix("window=0.8, door=0.2") == {"window": 0.8, "door": 0.2}

    def test_invalid(self):
        """Test a pair without a weight is rejected"""
        with pytest.raises(argparse.ArgumentTypeError):
            parse_kind_mix("window")


# ============ Exit Code Tests ============

class TestExitCodes:
    """Tests for main exit codes"""

    def test_version(self, capsys):
        """Test --version prints the version and succeeds"""
        assert main(["--version"]) == 0
        assert "facreg 0.1.0" in capsys.readouterr().out

    def test_no_command(self):
        """Test a missing subcommand is a usage error"""
        assert main([]) == 2

    def test_missing_required_option(self):
        """Test regularize without --input is a usage error"""
        assert main(["regularize"]) == 2

    def test_bad_levels(self, tmp_path):
        """Test an invalid --levels value is a usage error"""
        assert main(["sweep", "--truth", str(tmp_path / "t.json"), "--levels", "9..1"]) == 2

    def test_missing_input(self, tmp_path):
        """Test an unreadable layout is a domain error"""
        assert main(["regularize", "--input", str(tmp_path / "missing.json")]) == 1

    def test_invalid_spec(self, tmp_path):
        """Test an invalid synthetic spec is a domain error"""
        assert main(["generate", "--facades", "5", "--out", str(tmp_path / "t.json")]) == 1


# ============ Pipeline Tests ============

class TestPipeline:
    """Tests running the commands end to end on files"""

    def test_generate(self, truth_file):
        """Test generate writes a grid of the requested size"""
        layout = load_layout(truth_file)
        assert len(layout) == 6
        assert layout.building_id == "cli"

    def test_regularize_noise_free(self, tmp_path, truth_file):
        """Test a clean grid regularizes to itself and writes a report"""
        out = tmp_path / "reg.json"
        report = tmp_path / "report.json"
        code = main([
            "regularize", "--input", str(truth_file),
            "--output", str(out), "--report", str(report),
        ])
        assert code == 0
        assert load_layout(out) == load_layout(truth_file)
        assert json.loads(report.read_text())["status"] == "optimal"

    def test_perturb_and_evaluate(self, tmp_path, truth_file):
        """Test perturbed layouts are scored against the truth"""
        noisy = tmp_path / "noisy.json"
        result = tmp_path / "eval.json"
        assert main([
            "perturb", "--truth", str(truth_file), "--level", "2", "--seed", "1",
            "--out", str(noisy),
        ]) == 0
        assert main([
            "evaluate", "--layout", str(noisy), "--truth", str(truth_file),
            "--out", str(result),
        ]) == 0
        scores = json.loads(result.read_text())
        assert 0.0 <= scores["f_score"] <= 1.0

    def test_baseline(self, tmp_path, truth_file):
        """Test the mean-shift baseline keeps a clean grid"""
        out = tmp_path / "ms.json"
        assert main(["baseline", "--input", str(truth_file), "--out", str(out)]) == 0
        assert load_layout(out) == load_layout(truth_file)

    def test_stats(self, tmp_path, truth_file):
        """Test the category table for a 2 x 3 grid"""
        out = tmp_path / "stats.csv"
        assert main(["stats", "--input", str(truth_file), "--out", str(out)]) == 0
        assert out.read_text().splitlines() == [
            "building_id,N,|P|,|Z|,|O|,|W|,|H|",
            "cli,6,3,2,1,1,1",
        ]

    def test_export_lp(self, tmp_path, truth_file):
        """Test the exported model has the LP sections"""
        out = tmp_path / "model.lp"
        assert main(["export-lp", "--input", str(truth_file), "--out", str(out)]) == 0
        text = out.read_text()
        assert text.splitlines()[1] == "Minimize"
        assert "Subject To" in text
        assert text.rstrip().endswith("End")

    def test_sweep(self, tmp_path, truth_file):
        """Test one row per level and seed"""
        out = tmp_path / "sweep.csv"
        assert main([
            "sweep", "--truth", str(truth_file), "--levels", "0", "--seeds", "2",
            "--out", str(out),
        ]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("level,seed,")
        assert [line.split(",")[:2] for line in lines[1:]] == [["0", "0"], ["0", "1"]]

    def test_config_file(self, tmp_path, truth_file):
        """Test a TOML config is read by regularize"""
        config = tmp_path / "cfg.toml"
        config.write_text("[solver]\nlog_level = \"DEBUG\"\n")
        out = tmp_path / "reg.json"
        assert main([
            "regularize", "--input", str(truth_file), "--config", str(config),
            "--output", str(out),
        ]) == 0


@pytest.fixture
def truth_file(tmp_path):
    """A 2 x 3 grid written by the generate command"""
    path = tmp_path / "truth.json"
    assert main([
        "generate", "--floors", "2", "--columns", "3", "--building-id", "cli",
        "--out", str(path),
    ]) == 0
    return path
