import json
import shutil
import subprocess
import sys

import pytest

from nemx.cli import main

from conftest import FIXTURE_CONFIG, FIXTURE_DIR

CFG = str(FIXTURE_CONFIG)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCommands:
    def test_schedule(self, capsys):
        code, out, _ = run(capsys, "schedule", "--config", CFG, "--r", "1.0", "--hour", "12")
        doc = json.loads(out)
        assert code == 0
        assert doc["zone"] == "NetZero"
        assert doc["total"] == pytest.approx(1.0, abs=1e-7)
        assert doc["mu_star"] == pytest.approx(0.12, abs=1e-9)

    def test_schedule_peak_hour(self, capsys):
        _, out, _ = run(capsys, "schedule", "--config", CFG, "--r", "0.0", "--hour", "17")
        assert json.loads(out)["zone"] == "NetConsumption"

    def test_thresholds(self, capsys):
        code, out, _ = run(capsys, "thresholds", "--config", CFG)
        doc = json.loads(out)
        assert code == 0 and doc["d_plus"] <= doc["d_minus"]

    def test_classify(self, capsys):
        _, out, _ = run(capsys, "classify", "--config", CFG)
        assert [d["class"] for d in json.loads(out)] == ["AlwaysOn"] * 3 + ["ConditionalOn"]

    def test_payback(self, capsys):
        _, out, _ = run(capsys, "payback", "--saving-per-year", "1", "--install-cost", "3")
        assert json.loads(out) == {"years": 2, "never": False, "simple_years": 3.0}

    def test_payback_from_config(self, capsys):
        _, out, _ = run(capsys, "payback", "--config", CFG, "--saving-per-year", "0")
        assert json.loads(out)["never"] is True

    def test_rates(self, capsys, tmp_path):
        code, out, _ = run(capsys, "rates", "--config", CFG, "--gamma", "0,0.2", "--out", str(tmp_path))
        assert code == 0
        assert len(out.splitlines()) == 1 + 8
        assert (tmp_path / "rates.csv").read_text() == out

    def test_rates_infeasible_exit(self, capsys, tmp_path):
        doc = json.loads(FIXTURE_CONFIG.read_text())
        doc["cost"]["fixed_cost_per_day"] = 1e4
        d = tmp_path / "fx"
        shutil.copytree(FIXTURE_DIR, d)
        (d / "config.json").write_text(json.dumps(doc))
        code, _, err = run(capsys, "rates", "--config", str(d / "config.json"), "--gamma", "0.2")
        assert code == 4
        assert json.loads(err)["error"] == "InfeasibleError"

    def test_study(self, capsys, tmp_path):
        code, out, _ = run(capsys, "study", "--config", CFG, "--gamma", "0.2", "--out", str(tmp_path / "o"))
        assert code == 0 and "4 cells (0 infeasible)" in out
        assert (tmp_path / "o" / "metrics.csv").is_file()

    def test_verify(self, capsys):
        code, out, _ = run(capsys, "verify", "--count", "20", "--seed", "3")
        assert code == 0 and "failures=0" in out


class TestErrors:
    def test_missing_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "thresholds", "--config", str(tmp_path / "x.json"))
        rec = json.loads(err)
        assert code == 2 and rec["error"] == "ConfigError" and rec["exit_code"] == 2

    def test_missing_input_file_no_reports(self, capsys, tmp_path):
        d = tmp_path / "fx"
        shutil.copytree(FIXTURE_DIR, d)
        (d / "solar.csv").unlink()
        out = tmp_path / "out"
        code, _, err = run(capsys, "study", "--config", str(d / "config.json"), "--out", str(out))
        assert code != 0
        assert "solar.csv" in json.loads(err)["message"]
        assert not out.exists()

    def test_bad_data_exit_code(self, capsys, tmp_path):
        d = tmp_path / "fx"
        shutil.copytree(FIXTURE_DIR, d)
        (d / "prices.csv").write_text("timestamp,value\n2019-07-15T00:00,oops\n")
        code, _, err = run(capsys, "study", "--config", str(d / "config.json"), "--out", str(tmp_path / "o"))
        assert code == 3
        assert ":2:" in json.loads(err)["message"]

    def test_schedule_needs_tariff(self, capsys, tmp_path):
        doc = json.loads(FIXTURE_CONFIG.read_text())
        del doc["tariff"]
        d = tmp_path / "fx"
        shutil.copytree(FIXTURE_DIR, d)
        (d / "config.json").write_text(json.dumps(doc))
        code, _, err = run(capsys, "schedule", "--config", str(d / "config.json"))
        assert code == 2 and "tariff" in err

    def test_bad_gamma_list(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["rates", "--config", CFG, "--gamma", "0.2,2"])
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "nemx", "payback", "--saving-per-year", "1",
                               "--install-cost", "3"], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["years"] == 2
