import pytest

from nemx.data import build_scenarios, load_timeseries
from nemx.errors import DataError


def write(tmp_path, name, lines):
    p = tmp_path / name
    p.write_text("\n".join(lines) + "\n")
    return p


class TestLoadTimeseries:
    def test_two_rows(self, tmp_path):
        p = write(tmp_path, "p.csv", ["timestamp,value", "2019-07-15T00:00,0.04", "2019-07-15T01:00,0.05"])
        rows = load_timeseries(p, "price")
        assert [r.value for r in rows] == [0.04, 0.05]

    def test_negative_generation_names_line(self, tmp_path):
        p = write(tmp_path, "g.csv", ["timestamp,value", "2019-07-15T00:00,0.0", "2019-07-15T01:00,-0.1"])
        with pytest.raises(DataError, match=r"g\.csv:3"):
            load_timeseries(p, "generation")

    def test_negative_price_allowed(self, tmp_path):
        p = write(tmp_path, "p.csv", ["timestamp,value", "2019-07-15T00:00,-0.01"])
        assert load_timeseries(p, "price")[0].value == -0.01

    def test_out_of_order(self, tmp_path):
        p = write(tmp_path, "p.csv", ["timestamp,value", "2019-07-15T01:00,0.04", "2019-07-15T00:00,0.04"])
        with pytest.raises(DataError, match=r"p\.csv:3: timestamps"):
            load_timeseries(p, "price")

    def test_duplicate_timestamp(self, tmp_path):
        p = write(tmp_path, "p.csv", ["timestamp,value", "2019-07-15T01:00,0.04", "2019-07-15T01:00,0.04"])
        with pytest.raises(DataError):
            load_timeseries(p, "price")

    @pytest.mark.parametrize(
        "line,msg",
        [("2019-07-15T00:00,abc", "bad value"), ("yesterday,0.1", "bad timestamp"),
         ("2019-07-15T00:00,0.1,7", "expected 2 fields"), ("2019-07-15T00:00,nan", "finite")],
    )
    def test_malformed(self, tmp_path, line, msg):
        p = write(tmp_path, "p.csv", ["timestamp,value", line])
        with pytest.raises(DataError, match=f":2: .*{msg}"):
            load_timeseries(p, "price")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        with pytest.raises(DataError, match="empty"):
            load_timeseries(p, "price")

    def test_header_only(self, tmp_path):
        p = write(tmp_path, "h.csv", ["timestamp,value"])
        with pytest.raises(DataError, match="no data rows"):
            load_timeseries(p, "price")

    def test_bad_header(self, tmp_path):
        p = write(tmp_path, "h.csv", ["time,price", "2019-07-15T00:00,0.1"])
        with pytest.raises(DataError, match=":1:"):
            load_timeseries(p, "price")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot open"):
            load_timeseries(tmp_path / "nope.csv", "price")


class TestBuildScenarios:
    def hourly(self, tmp_path, name, kind, values):
        lines = ["timestamp,value"] + [f"2019-07-15T{h:02d}:00,{v}" for h, v in enumerate(values)]
        return load_timeseries(write(tmp_path, name, lines), kind)

    def test_aligned_hours(self, tmp_path):
        prices = self.hourly(tmp_path, "p.csv", "price", [0.04] * 24)
        gen = self.hourly(tmp_path, "g.csv", "generation", [0.5] * 24)
        s = build_scenarios(prices, gen)
        assert len(s) == 24
        assert all(x.weight == pytest.approx(1 / 24) for x in s)
        assert [x.hour for x in s] == list(range(24))

    def test_quarter_hours_summed(self, tmp_path):
        prices = self.hourly(tmp_path, "p.csv", "price", [0.04, 0.05])
        lines = ["timestamp,value"] + [f"2019-07-15T00:{m:02d},0.25" for m in (0, 15, 30, 45)]
        gen = load_timeseries(write(tmp_path, "g.csv", lines), "generation")
        s = build_scenarios(prices, gen)
        assert len(s) == 1
        assert s[0].r == pytest.approx(1.0)
        assert s[0].wholesale_price == 0.04

    def test_resample_averages_price(self, tmp_path):
        prices = self.hourly(tmp_path, "p.csv", "price", [0.02, 0.04, 0.06, 0.08])
        gen = self.hourly(tmp_path, "g.csv", "generation", [1.0, 1.0, 1.0, 1.0])
        s = build_scenarios(prices, gen, resample_hours=2)
        assert [x.wholesale_price for x in s] == pytest.approx([0.03, 0.07])
        assert [x.r for x in s] == pytest.approx([2.0, 2.0])

    def test_disjoint(self, tmp_path):
        prices = self.hourly(tmp_path, "p.csv", "price", [0.04])
        lines = ["timestamp,value", "2019-07-16T00:00,1.0"]
        gen = load_timeseries(write(tmp_path, "g.csv", lines), "generation")
        with pytest.raises(DataError, match="overlap"):
            build_scenarios(prices, gen)

    def test_bad_resample(self, tmp_path):
        prices = self.hourly(tmp_path, "p.csv", "price", [0.04])
        with pytest.raises(DataError):
            build_scenarios(prices, prices, resample_hours=5)
