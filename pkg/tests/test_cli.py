import csv
import datetime as dt
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from smclab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _write_returns_csv(path, ticker_days, start=dt.date(2012, 1, 2)):
    lines = ["date,ticker,return"]
    for ticker, values in ticker_days.items():
        for i, r in enumerate(values):
            lines.append(f"{(start + dt.timedelta(days=i)).isoformat()},{ticker},{r!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_catalog_csv(path, rows):
    lines = ["ticker,issuer,side,beta,annual_fee,index_ticker,fund_name,index_name"]
    lines += rows
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestCurves:
    def test_worked_point(self, runner, tmp_path):
        result = runner.invoke(
            main, ["curves", "--beta", "3", "--p", "252", "--x", "0.35", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        (row,) = _rows(tmp_path / "curves.csv")
        assert float(row["y_daily"]) == pytest.approx(1.4577, abs=0.0005)
        assert float(row["y_periodic"]) == pytest.approx(1.05, rel=1e-9)

    def test_unit_beta_daily_equals_x(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["curves", "--beta", "1", "--p", "21", "--x-min", "-0.3", "--x-max", "0.3",
             "--x-steps", "7", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0
        for row in _rows(tmp_path / "curves.csv"):
            assert float(row["y_daily"]) == float(row["x"])

    def test_infinite_p_rows(self, runner, tmp_path):
        result = runner.invoke(
            main, ["curves", "--beta", "3", "--p", "inf", "--x", "0.35", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0
        (row,) = _rows(tmp_path / "curves.csv")
        assert row["p"] == "-1"
        assert float(row["y_daily"]) == pytest.approx(1.460375, rel=1e-9)

    def test_invalid_grid_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["curves", "--x-steps", "1", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_out_of_domain_grid_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["curves", "--x", "-1.5", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_plot_writes_png(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["curves", "--beta", "3", "--p", "21", "--x-steps", "11", "--plot",
             "--out", str(tmp_path)],
        )
        assert result.exit_code == 0
        assert (tmp_path / "curves.png").stat().st_size > 0


class TestSimulate:
    def test_seed_repeat_is_byte_identical(self, runner, tmp_path):
        args = ["simulate", "--kind", "iid_normal", "--vol", "0.02", "--n", "200",
                "--seed", "9", "--beta", "3", "--error-sd", "0.001"]
        r1 = runner.invoke(main, args + ["--out", str(tmp_path / "a")])
        r2 = runner.invoke(main, args + ["--out", str(tmp_path / "b")])
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert (tmp_path / "a/simulated.csv").read_bytes() == (tmp_path / "b/simulated.csv").read_bytes()
        assert (tmp_path / "a/simulated_catalog.csv").read_bytes() == (
            tmp_path / "b/simulated_catalog.csv"
        ).read_bytes()

    def test_fee_on_flat_index(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--kind", "constant", "--mean", "0", "--n", "5", "--beta", "3",
             "--fee", "0.0095", "--error-sd", "0", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        values = {
            row["ticker"]: float(row["return"])
            for row in _rows(tmp_path / "simulated.csv")
            if row["ticker"] == "SIMLETF"
        }
        assert values["SIMLETF"] == pytest.approx(-3.77e-5, abs=5e-7)

    def test_catalog_side_follows_beta_sign(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--kind", "iid_normal", "--vol", "0.01", "--n", "10",
             "--beta", "-3", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0
        (row,) = _rows(tmp_path / "simulated_catalog.csv")
        assert row["side"] == "Short" and float(row["beta"]) == -3.0

    def test_bad_model_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["simulate", "--kind", "ar1", "--vol", "0.02", "--extra", "2.0",
                   "--n", "10", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2


@pytest.fixture
def sim_data(runner, tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    result = runner.invoke(
        main,
        ["simulate", "--kind", "iid_normal", "--vol", "0.02", "--n", "320", "--seed", "5",
         "--beta", "3", "--fee", "0.0095", "--error-sd", "0.0005", "--out", str(out)],
    )
    assert result.exit_code == 0
    return out / "simulated.csv", out / "simulated_catalog.csv"


class TestWindows:
    def test_pipeline_outputs(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        result = runner.invoke(
            main,
            ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21",
             "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        records = _rows(tmp_path / "records.csv")
        assert len(records) == 300  # 320 days, p=21, step 1
        assert records[0]["ticker"] == "SIMLETF"
        summary = _rows(tmp_path / "summary.csv")
        assert len(summary) == 1 and summary[0]["obs"] == "300"
        assert (tmp_path / "records.jsonl").stat().st_size > 0
        assert (tmp_path / "rankings.csv").read_text().startswith("side,p,rank,")

    def test_reruns_are_byte_identical(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        args = ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21", "--p", "63"]
        r1 = runner.invoke(main, args + ["--out", str(tmp_path / "a")])
        r2 = runner.invoke(main, args + ["--out", str(tmp_path / "b")])
        assert r1.exit_code == 0 and r2.exit_code == 0
        for name in ("records.csv", "records.jsonl", "summary.csv", "rankings.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_published_totals_fixture(self, runner, tmp_path):
        from smclab.returns_core import geometric_mean_return

        idx_daily = geometric_mean_return(-0.0990, 252)
        letf_daily = geometric_mean_return(-0.2860, 252)
        data = tmp_path / "data.csv"
        catalog = tmp_path / "catalog.csv"
        _write_returns_csv(data, {"IDX": [idx_daily] * 252, "FUND": [letf_daily] * 252})
        _write_catalog_csv(catalog, ["FUND,Test,Long,3,0.0095,IDX,Test Fund,Test Index"])
        result = runner.invoke(
            main,
            ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "252",
             "--out", str(tmp_path / "out")],
        )
        assert result.exit_code == 0, result.output
        (record,) = _rows(tmp_path / "out/records.csv")
        assert float(record["smc"]) == pytest.approx(0.0227, abs=0.01)
        assert float(record["r_max"]) == pytest.approx(-0.2698, abs=0.01)

    def test_missing_fund_warns_and_strict_fails(self, runner, tmp_path, sim_data):
        data, _ = sim_data
        catalog = tmp_path / "catalog.csv"
        _write_catalog_csv(
            catalog,
            [
                "SIMLETF,Synthetic,Long,3,0.0095,SIMIDX,Synthetic Fund,Synthetic Index",
                "GHOST,Synthetic,Short,-3,0.0095,SIMIDX,Ghost Fund,Synthetic Index",
            ],
        )
        args = ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21"]
        soft = runner.invoke(main, args + ["--out", str(tmp_path / "soft")])
        assert soft.exit_code == 0
        assert "no data for fund GHOST" in soft.output
        strict = runner.invoke(main, args + ["--strict", "--out", str(tmp_path / "strict")])
        assert strict.exit_code == 1

    def test_default_catalog_and_window_lengths(self, runner, tmp_path):
        import numpy as np

        from smclab import data_io, simulate

        idx = simulate.gen_index(
            simulate.IndexModel("iid_normal", 0.0, 0.012, seed=33), 320, "SPX"
        )
        fund = simulate.synth_letf(idx, simulate.LetfModel(beta=3.0, seed=34), "SPXL")
        data = tmp_path / "data.csv"
        data_io.write_returns(data, [idx, fund])
        result = runner.invoke(
            main, ["windows", "--data", str(data), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        assert result.output.count("no data for fund") == 19
        by_p = {}
        for row in _rows(tmp_path / "out/records.csv"):
            by_p.setdefault(row["p"], []).append(row)
        assert set(by_p) == {"21", "252"}
        assert len(by_p["21"]) == 300 and len(by_p["252"]) == 69
        assert all(row["beta"] == "3" for row in by_p["21"])

    def test_disjoint_pair_skipped_with_warning(self, runner, tmp_path):
        import datetime as dt2

        data = tmp_path / "data.csv"
        lines = ["date,ticker,return"]
        base = dt2.date(2012, 1, 2)
        for i in range(30):
            lines.append(f"{(base + dt2.timedelta(days=i)).isoformat()},IDXA,0.001")
            lines.append(f"{(base + dt2.timedelta(days=i)).isoformat()},GOODFUND,0.003")
            # the bad fund trades in a different year entirely
            lines.append(f"{(base + dt2.timedelta(days=400 + i)).isoformat()},BADFUND,0.003")
        data.write_text("\n".join(lines) + "\n", encoding="utf-8")
        catalog = tmp_path / "catalog.csv"
        _write_catalog_csv(
            catalog,
            [
                "GOODFUND,Test,Long,3,0,IDXA,Good Fund,Index A",
                "BADFUND,Test,Long,3,0,IDXA,Bad Fund,Index A",
            ],
        )
        result = runner.invoke(
            main, ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21",
                   "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        assert "no common dates" in result.output
        assert {r["ticker"] for r in _rows(tmp_path / "out/records.csv")} == {"GOODFUND"}

    def test_empty_data_exits_2(self, runner, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("date,ticker,return\n", encoding="utf-8")
        result = runner.invoke(
            main, ["windows", "--data", str(data), "--p", "21", "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 2

    def test_missing_data_flag_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["windows", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_plot_writes_figures(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        result = runner.invoke(
            main,
            ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21",
             "--plot", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "scatter_SIMIDX_p21.png").stat().st_size > 0


class TestRankingsEndToEnd:
    def test_two_pairs_rank_both_sides(self, runner, tmp_path):
        import numpy as np

        from smclab import data_io, simulate

        series = []
        specs = []
        for i, (idx_ticker, vol) in enumerate((("IDXA", 0.01), ("IDXB", 0.03))):
            idx = simulate.gen_index(
                simulate.IndexModel("iid_normal", 0.0, vol, seed=60 + i), 300, idx_ticker
            )
            series.append(idx)
            for beta, side in ((3.0, "Long"), (-3.0, "Short")):
                ticker = f"{idx_ticker}{'BULL' if beta > 0 else 'BEAR'}"
                series.append(
                    simulate.synth_letf(idx, simulate.LetfModel(beta=beta, seed=70 + i), ticker)
                )
                specs.append(
                    data_io.FundSpec(ticker, "Synthetic", side, beta, 0.0, idx_ticker)
                )
        data = tmp_path / "data.csv"
        catalog = tmp_path / "catalog.csv"
        data_io.write_returns(data, series)
        data_io.write_catalog(catalog, specs)

        result = runner.invoke(
            main,
            ["windows", "--data", str(data), "--catalog", str(catalog), "--p", "21",
             "--plot", "--out", str(tmp_path / "out")],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out/rankings.png").stat().st_size > 0
        assert (tmp_path / "out/scatter_IDXA_p21.png").stat().st_size > 0
        rows = _rows(tmp_path / "out/rankings.csv")
        by_side = {}
        for r in rows:
            by_side.setdefault(r["side"], []).append(r)
        assert set(by_side) == {"Long", "Short"}
        for side, side_rows in by_side.items():
            assert [r["rank"] for r in side_rows] == ["1", "2"]
            # the riskier index produces the greater mean statistics
            assert side_rows[0]["ticker_by_sn2"].startswith("IDXB")
            assert side_rows[0]["ticker_by_smc"].startswith("IDXB")
            assert float(side_rows[0]["mean_sn2"]) > float(side_rows[1]["mean_sn2"])
            assert side_rows[0]["disagreement"] == "false"
        summary = _rows(tmp_path / "out/summary.csv")
        assert len(summary) == 4


class TestRegion:
    def test_boundary_golden_point(self, runner, tmp_path):
        result = runner.invoke(
            main, ["region", "--beta", "2", "--resolution", "100", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        pts = [(float(r["r1"]), float(r["r2"])) for r in _rows(tmp_path / "boundary.csv")]
        best = min(math.hypot(r1 + 0.25, r2) for r1, r2 in pts)
        assert best <= 1e-6

    def test_beta_one_reports_empty(self, runner, tmp_path):
        result = runner.invoke(
            main, ["region", "--beta", "1", "--resolution", "50", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0
        assert "no region" in result.output
        assert _rows(tmp_path / "boundary.csv") == []
        members = {r["member"] for r in _rows(tmp_path / "membership.csv")}
        assert members == {"false"}

    def test_membership_file_shape(self, runner, tmp_path):
        result = runner.invoke(
            main, ["region", "--beta", "3", "--resolution", "20", "--plot", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0
        rows = _rows(tmp_path / "membership.csv")
        assert len(rows) == 21 * 21
        assert {r["member"] for r in rows} == {"true", "false"}
        assert (tmp_path / "region.png").stat().st_size > 0


class TestCounterexamples:
    def test_two_day_fixture_flags_one(self, runner, tmp_path):
        data = tmp_path / "data.csv"
        _write_returns_csv(data, {"IDX": [-0.25, 0.0]})
        result = runner.invoke(
            main, ["counterexamples", "--data", str(data), "--beta", "3", "--p", "2",
                   "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        (row,) = _rows(tmp_path / "out/counterexamples.csv")
        assert float(row["long_smc"]) > float(row["short_smc"])
        (totals,) = _rows(tmp_path / "out/scan_totals.csv")
        assert totals["flagged"] == "1" and totals["scanned"] == "1"

    def test_beta_one_finds_nothing(self, runner, tmp_path, sim_data):
        data, _ = sim_data
        result = runner.invoke(
            main, ["counterexamples", "--data", str(data), "--beta", "1", "--p", "21",
                   "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0
        (totals,) = _rows(tmp_path / "out/scan_totals.csv")
        assert totals["flagged"] == "0"

    def test_positive_trend_finds_nothing(self, runner, tmp_path):
        data = tmp_path / "data.csv"
        _write_returns_csv(data, {"TREND": [0.01] * 40})
        result = runner.invoke(
            main, ["counterexamples", "--data", str(data), "--beta", "3", "--p", "21",
                   "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0
        (totals,) = _rows(tmp_path / "out/scan_totals.csv")
        assert totals["flagged"] == "0" and totals["scanned"] == "20"


class TestDiagnostics:
    def test_outputs(self, runner, tmp_path, sim_data):
        data, _ = sim_data
        result = runner.invoke(
            main, ["diagnostics", "SIMIDX", "--data", str(data), "--max-lag", "12",
                   "--plot", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        acf = _rows(tmp_path / "acf_SIMIDX.csv")
        assert len(acf) == 13 and acf[0]["acf"] == "1"
        assert len(_rows(tmp_path / "qq_SIMIDX.csv")) == 320
        assert (tmp_path / "qq_SIMIDX.png").stat().st_size > 0
        assert (tmp_path / "acf_SIMIDX.png").stat().st_size > 0

    def test_squared_flag(self, runner, tmp_path, sim_data):
        data, _ = sim_data
        result = runner.invoke(
            main, ["diagnostics", "SIMIDX", "--data", str(data), "--max-lag", "5",
                   "--squared", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0

    def test_constant_series_exits_2(self, runner, tmp_path):
        data = tmp_path / "flat.csv"
        _write_returns_csv(data, {"FLAT": [0.01] * 30})
        result = runner.invoke(
            main, ["diagnostics", "FLAT", "--data", str(data), "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_unknown_ticker_exits_2(self, runner, tmp_path, sim_data):
        data, _ = sim_data
        result = runner.invoke(
            main, ["diagnostics", "NOPE", "--data", str(data), "--out", str(tmp_path)]
        )
        assert result.exit_code == 2


class TestConfigAndEnv:
    def test_config_file_supplies_values(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        config = tmp_path / "run.toml"
        config.write_text(
            f'data = "{data}"\ncatalog = "{catalog}"\np = [21]\n', encoding="utf-8"
        )
        result = runner.invoke(
            main, ["windows", "--config", str(config), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        assert {r["p"] for r in _rows(tmp_path / "out/records.csv")} == {"21"}

    def test_flags_override_config(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        config = tmp_path / "run.toml"
        config.write_text(
            f'data = "{data}"\ncatalog = "{catalog}"\np = [21]\n', encoding="utf-8"
        )
        result = runner.invoke(
            main,
            ["windows", "--config", str(config), "--p", "63", "--out", str(tmp_path / "out")],
        )
        assert result.exit_code == 0
        assert {r["p"] for r in _rows(tmp_path / "out/records.csv")} == {"63"}

    def test_bad_config_exits_2(self, runner, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text("p = [21", encoding="utf-8")
        result = runner.invoke(main, ["curves", "--config", str(config)])
        assert result.exit_code == 2

    def test_env_var_sets_output_dir(self, runner, tmp_path):
        out = tmp_path / "from_env"
        result = runner.invoke(
            main,
            ["curves", "--beta", "2", "--p", "21", "--x", "0.1"],
            env={"SMCLAB_OUT": str(out)},
        )
        assert result.exit_code == 0
        assert (out / "curves.csv").exists()


class TestUsageErrors:
    def test_curves_bad_p_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["curves", "--p", "soon", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_region_bad_resolution_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["region", "--beta", "2", "--resolution", "4", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_windows_bad_p_exits_2(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        result = runner.invoke(
            main, ["windows", "--data", str(data), "--catalog", str(catalog),
                   "--p", "1", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_diagnostics_max_lag_too_large_exits_2(self, runner, tmp_path):
        data = tmp_path / "tiny.csv"
        _write_returns_csv(data, {"T": [0.01, -0.02, 0.005]})
        result = runner.invoke(
            main, ["diagnostics", "T", "--data", str(data), "--max-lag", "10",
                   "--out", str(tmp_path)]
        )
        assert result.exit_code == 2

    def test_counterexamples_with_catalog_restriction(self, runner, tmp_path, sim_data):
        data, catalog = sim_data
        result = runner.invoke(
            main, ["counterexamples", "--data", str(data), "--catalog", str(catalog),
                   "--beta", "3", "--p", "21", "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        (totals,) = _rows(tmp_path / "out/scan_totals.csv")
        # only the catalog's index ticker is scanned, not the fund series
        assert int(totals["scanned"]) == 320 - 21 + 1
