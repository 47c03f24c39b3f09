"""Scenario grammar, preset catalog, CSV loaders and report emitters."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from elybal.dispatch import PowerTrajectory, SignalKind
from elybal.markets import CapacityPriceTable, Direction, ProductKind, SpotPriceSeries
from elybal.model import ElectrolyzerUnit, Technology
from elybal.scenario_io import (
    PRESETS,
    ScenarioError,
    dump_scenario,
    emit_report,
    load_capacity_prices,
    load_scenario,
    load_signal,
    load_spot_prices,
    preset,
    write_trajectory_csv,
)

REPO_SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def write(tmp_path: Path, name: str, text: str) -> Path:
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


PRICES_CSV = """block,price_eur_per_mw
NEGPOS_00_04,14.71
NEGPOS_04_08,21.92
NEGPOS_08_12,62.00
NEGPOS_12_16,78.00
NEGPOS_16_20,51.00
NEGPOS_20_24,36.00
"""

SIGNAL_CSV = "time_s,value\n" + "\n".join(
    f"{t},-1" for t in range(0, 5)
) + "\n"


class TestPresetCatalog:
    def test_eleven_catalog_units(self):
        assert len(PRESETS) == 11

    def test_datasheet_values_kept_verbatim(self):
        entry = preset("sunfire-ael")
        assert entry.power_mw == 10.0
        assert entry.range_min_pct == 25.0
        assert entry.ramp_pct_per_s == 0.61
        assert entry.technology is Technology.AEL
        assert not entry.estimated

    def test_estimated_ramps_flagged(self):
        assert preset("ecolyzer").estimated
        assert preset("thyssenkrupp").estimated
        assert preset("questone").estimated
        assert not preset("mcphy").estimated

    def test_overload_range_not_modeled(self):
        entry = preset("trina")
        assert entry.range_max_pct == 110.0
        unit = entry.to_unit()
        # the short-time overload band is cut off at rated power
        assert unit.rated_power_mw == 15.0
        assert unit.min_load_fraction == pytest.approx(0.30)

    def test_to_unit_converts_percent_to_fractions(self):
        unit = preset("demo4grid").to_unit()
        assert unit.rated_power_mw == 4.0
        assert unit.ramp_up == pytest.approx(0.0061)
        assert unit.ramp_down == unit.ramp_up

    def test_to_unit_accepts_overrides(self):
        unit = preset("sunfire-ael").to_unit(rated_power_mw=100.0, name="scaled")
        assert unit.rated_power_mw == 100.0
        assert unit.name == "scaled"

    def test_unknown_preset(self):
        with pytest.raises(ScenarioError, match="unknown preset"):
            preset("not-a-unit")


class TestScenarioParsing:
    def full_scenario(self, tmp_path: Path) -> Path:
        write(tmp_path, "prices.csv", PRICES_CSV)
        write(tmp_path, "signal.csv", SIGNAL_CSV)
        return write(tmp_path, "full.scenario", """
# reference plant with everything switched on
[scenario]
name = full-run

[unit]
name = plant
technology = AEL
rated_power_mw = 100
min_load_pct = 50
ramp_up_pct_per_s = 0.167
efficiency_points = 50:50.5, 100:54

[product]
kind = fcr

[product]
kind = afrr
direction = pos

[prices]
fcr_capacity_csv = prices.csv
afrr_price_eur_per_mw_h = 20

[dispatch]
setpoint_mw = 95
bid_mw = 5
product = fcr

[signal]
kind = setpoint
csv = signal.csv

[allocate]
pre_reserved_fcr_mw = 5

[economics]
setpoint_mw = 95
electricity_price_eur_per_mwh = 50
grid_fee_pct = 30
fcr_bid_mw = 5
afrr_quantity_mw = 40

[output]
formats = json, csv
""")

    def test_full_scenario_materializes(self, tmp_path):
        scenario = load_scenario(self.full_scenario(tmp_path))
        assert scenario.name == "full-run"
        unit = scenario.primary_unit()
        assert unit.rated_power_mw == 100.0
        assert unit.min_load_fraction == 0.5
        assert unit.ramp_up == pytest.approx(0.00167)
        assert unit.efficiency_curve.breakpoints == ((0.5, 50.5), (1.0, 54.0))
        assert [p.kind for p in scenario.products] == [ProductKind.FCR, ProductKind.AFRR]
        assert scenario.products[1].direction is Direction.POS
        # the hourly aFRR price is folded into the 4 h block price
        assert scenario.afrr_price_eur_per_mw_block == 80.0
        assert scenario.fcr_prices.price("00-04") == 14.71
        assert scenario.dispatch.setpoint_mw == 95.0
        assert scenario.dispatch.product_name == "fcr"
        assert scenario.signal.kind is SignalKind.SETPOINT_REQUEST
        assert scenario.allocate_options.pre_reserved_fcr_mw == 5.0
        assert scenario.economics.grid_fee_fraction == pytest.approx(0.30)
        assert scenario.output_formats == ("json", "csv")

    def test_unit_count_expands_the_fleet(self, tmp_path):
        path = write(tmp_path, "fleet.scenario", """
[unit]
preset = sunfire-ael
count = 3
""")
        scenario = load_scenario(path)
        assert len(scenario.units) == 3
        assert scenario.units[0].name == "Sunfire AEL #1"
        assert scenario.primary_unit().rated_power_mw == 30.0

    def test_preset_fields_can_be_overridden(self, tmp_path):
        path = write(tmp_path, "override.scenario", """
[unit]
preset = sunfire-ael
rated_power_mw = 20
""")
        unit = load_scenario(path).primary_unit()
        assert unit.rated_power_mw == 20.0
        assert unit.min_load_fraction == 0.25  # from the preset

    def test_name_defaults_to_the_file_stem(self, tmp_path):
        path = write(tmp_path, "stem_name.scenario", "[unit]\npreset = mcphy\n")
        assert load_scenario(path).name == "stem_name"

    # ---- error reporting: every message carries the offending location

    def test_key_outside_section(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "name = x\n")
        with pytest.raises(ScenarioError, match="line 1") as exc:
            load_scenario(path)
        assert exc.value.line == 1

    def test_missing_equals_sign(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[scenario]\njust words\n")
        with pytest.raises(ScenarioError, match="key = value"):
            load_scenario(path)

    def test_unknown_section(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[plant]\nx = 1\n")
        with pytest.raises(ScenarioError, match=r"unknown section \[plant\]"):
            load_scenario(path)

    def test_unknown_key_named_with_line(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[unit]\npreset = mcphy\nrampp = 5\n")
        with pytest.raises(ScenarioError, match="line 3") as exc:
            load_scenario(path)
        assert exc.value.key == "rampp"

    def test_non_numeric_value(self, tmp_path):
        path = write(tmp_path, "bad.scenario",
                     "[unit]\npreset = mcphy\nrated_power_mw = big\n")
        with pytest.raises(ScenarioError, match="expected a number"):
            load_scenario(path)

    def test_min_load_bounds_enforced_at_the_boundary(self, tmp_path):
        path = write(tmp_path, "bad.scenario", """
[unit]
technology = AEL
rated_power_mw = 10
min_load_pct = 100
ramp_up_pct_per_s = 1
""")
        with pytest.raises(ScenarioError, match=r"min_load_pct must be in \(0, 100\)") as exc:
            load_scenario(path)
        assert exc.value.key == "min_load_pct"
        assert exc.value.line == 5

    def test_unit_without_preset_needs_all_fields(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[unit]\ntechnology = AEL\n")
        with pytest.raises(ScenarioError, match="rated_power_mw"):
            load_scenario(path)

    def test_unknown_technology(self, tmp_path):
        path = write(tmp_path, "bad.scenario", """
[unit]
technology = FUSION
rated_power_mw = 10
min_load_pct = 20
ramp_up_pct_per_s = 1
""")
        with pytest.raises(ScenarioError, match="unknown technology"):
            load_scenario(path)

    def test_unknown_product(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[product]\nkind = xcr\n")
        with pytest.raises(ScenarioError, match="unknown product"):
            load_scenario(path)

    def test_two_afrr_price_sources_rejected(self, tmp_path):
        path = write(tmp_path, "bad.scenario", """
[prices]
afrr_price_eur_per_mw_h = 20
afrr_price_eur_per_mw_block = 80
""")
        with pytest.raises(ScenarioError, match="exactly one aFRR price"):
            load_scenario(path)

    def test_bad_efficiency_point(self, tmp_path):
        path = write(tmp_path, "bad.scenario", """
[unit]
preset = mcphy
efficiency_points = 50-55
""")
        with pytest.raises(ScenarioError, match="load_pct:kwh_per_kg"):
            load_scenario(path)

    def test_bad_signal_kind(self, tmp_path):
        write(tmp_path, "signal.csv", SIGNAL_CSV)
        path = write(tmp_path, "bad.scenario", "[signal]\nkind = morse\ncsv = signal.csv\n")
        with pytest.raises(ScenarioError, match="frequency"):
            load_scenario(path)

    def test_unknown_output_format(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[output]\nformats = pdf\n")
        with pytest.raises(ScenarioError, match="unknown output format"):
            load_scenario(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read scenario"):
            load_scenario(tmp_path / "nope.scenario")

    def test_count_must_be_at_least_one(self, tmp_path):
        path = write(tmp_path, "bad.scenario", "[unit]\npreset = mcphy\ncount = 0\n")
        with pytest.raises(ScenarioError, match="count must be >= 1"):
            load_scenario(path)


class TestScenarioRoundTrip:
    def test_dump_then_load_is_stable(self, tmp_path):
        write(tmp_path, "prices.csv", PRICES_CSV)
        write(tmp_path, "signal.csv", SIGNAL_CSV)
        original = write(tmp_path, "rt.scenario", """
[scenario]
name = round-trip

[unit]
technology = PEM
rated_power_mw = 17.5
min_load_pct = 40
ramp_up_pct_per_s = 10
ramp_down_pct_per_s = 8

[product]
kind = afrr
direction = neg

[prices]
fcr_capacity_csv = prices.csv
afrr_price_eur_per_mw_block = 80

[dispatch]
setpoint_mw = 8
bid_mw = 2

[signal]
kind = setpoint
csv = signal.csv

[economics]
setpoint_mw = 8
hours_per_day = 12
electricity_price_eur_per_mwh = 42.5
coverage_symmetric = false

[output]
formats = json, plotdata
""")
        first = load_scenario(original)
        dumped = dump_scenario(first)
        second = load_scenario(write(tmp_path, "rt2.scenario", dumped))
        # the numeric payload survives the round trip bit-exactly
        assert second.units == first.units
        assert second.products == first.products
        assert second.dispatch == first.dispatch
        assert second.economics == first.economics
        assert second.afrr_price_eur_per_mw_block == first.afrr_price_eur_per_mw_block
        assert second.fcr_prices.prices == first.fcr_prices.prices
        assert second.signal == first.signal
        assert second.output_formats == first.output_formats
        # and a second dump is byte-identical
        assert dump_scenario(second) == dumped

    def test_shipped_scenarios_all_load(self):
        for path in sorted(REPO_SCENARIOS.glob("*.scenario")):
            scenario = load_scenario(path)
            assert scenario.name

    def test_shipped_demo_scenario_contents(self):
        scenario = load_scenario(REPO_SCENARIOS / "demo4grid.scenario")
        assert scenario.primary_unit().rated_power_mw == 4.0
        assert len(scenario.products) == 2
        assert scenario.afrr_price_eur_per_mw_block == 80.0
        assert scenario.signal is not None


class TestCsvLoaders:
    def test_capacity_prices(self, tmp_path):
        table = load_capacity_prices(write(tmp_path, "p.csv", PRICES_CSV))
        assert isinstance(table, CapacityPriceTable)
        assert table.price("NEGPOS_12_16") == 78.0

    def test_capacity_prices_header_checked(self, tmp_path):
        path = write(tmp_path, "p.csv", "block,eur\nNEGPOS_00_04,5\n")
        with pytest.raises(ScenarioError, match="expected header"):
            load_capacity_prices(path)

    def test_capacity_prices_bad_row_is_located(self, tmp_path):
        path = write(tmp_path, "p.csv", "block,price_eur_per_mw\nNEGPOS_00_04,abc\n")
        with pytest.raises(ScenarioError, match="line 2"):
            load_capacity_prices(path)

    def test_capacity_prices_column_count(self, tmp_path):
        path = write(tmp_path, "p.csv", "block,price_eur_per_mw\nNEGPOS_00_04,5,6\n")
        with pytest.raises(ScenarioError, match="expected 2 columns"):
            load_capacity_prices(path)

    def test_spot_prices(self, tmp_path):
        path = write(tmp_path, "spot.csv", (
            "timestamp,price_eur_per_mwh\n"
            "2024-07-25T00:00:00,43.5\n"
            "2024-07-25T01:00:00,39.1\n"
        ))
        series = load_spot_prices(path)
        assert isinstance(series, SpotPriceSeries)
        assert series.prices == (43.5, 39.1)

    def test_spot_prices_bad_timestamp(self, tmp_path):
        path = write(tmp_path, "spot.csv",
                     "timestamp,price_eur_per_mwh\nyesterday,43.5\n")
        with pytest.raises(ScenarioError, match="ISO timestamp"):
            load_spot_prices(path)

    def test_signal(self, tmp_path):
        sig = load_signal(write(tmp_path, "s.csv", SIGNAL_CSV), SignalKind.SETPOINT_REQUEST)
        assert sig.timestep_s == 1.0
        assert sig.values == (-1.0,) * 5

    def test_signal_must_start_at_zero(self, tmp_path):
        path = write(tmp_path, "s.csv", "time_s,value\n5,-1\n6,-1\n")
        with pytest.raises(ScenarioError, match="t = 0"):
            load_signal(path, SignalKind.SETPOINT_REQUEST)

    def test_signal_non_numeric_row(self, tmp_path):
        path = write(tmp_path, "s.csv", "time_s,value\n0,-1\n1,x\n")
        with pytest.raises(ScenarioError, match="line 3"):
            load_signal(path, SignalKind.SETPOINT_REQUEST)

    def test_empty_file(self, tmp_path):
        path = write(tmp_path, "s.csv", "")
        with pytest.raises(ScenarioError, match="empty"):
            load_signal(path, SignalKind.SETPOINT_REQUEST)


UNIT = ElectrolyzerUnit("io", Technology.AEL, 4.0, 0.25, 0.0061)


class TestEmitters:
    def test_json_report_is_deterministic(self, tmp_path):
        payload = {"b": 2.5, "a": {"nested": True, "x": None}}
        first = emit_report(payload, "json", tmp_path / "one.json")[0]
        second = emit_report(payload, "json", tmp_path / "two.json")[0]
        assert first.read_bytes() == second.read_bytes()
        parsed = json.loads(first.read_text())
        assert parsed == payload
        assert first.read_text().endswith("\n")
        # keys come out sorted, so diffs between runs stay clean
        assert first.read_text().index('"a"') < first.read_text().index('"b"')

    def test_csv_report_flattens_nested_keys(self, tmp_path):
        payload = {"compliance": {"compliant": True, "delay_s": 41.0}, "runs": [1, 2]}
        path = emit_report(payload, "csv", tmp_path / "r.csv")[0]
        lines = path.read_text().splitlines()
        assert lines[0] == "field,value"
        assert "compliance.compliant,true" in lines
        assert "compliance.delay_s,41.0" in lines
        assert "runs[0],1" in lines

    def test_plotdata_writes_one_csv_per_component(self, tmp_path):
        traj = PowerTrajectory(1.0, np.array([3.0, 3.0, 3.0]), UNIT)
        table = CapacityPriceTable({"NEGPOS_00_04": 14.71})
        written = emit_report(
            {"trajectory": traj, "prices": table}, "plotdata", tmp_path / "plots"
        )
        names = sorted(p.name for p in written)
        assert names == ["prices.csv", "trajectory.csv"]
        traj_lines = (tmp_path / "plots" / "trajectory.csv").read_text().splitlines()
        assert traj_lines[0] == "time_s,power_mw"
        assert traj_lines[1] == "0,3.0"
        price_lines = (tmp_path / "plots" / "prices.csv").read_text().splitlines()
        assert price_lines[1] == "NEGPOS_00_04,14.71"

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unknown report format"):
            emit_report({}, "xml", tmp_path / "r.xml")

    def test_trajectory_csv_round_trips_through_the_signal_loader(self, tmp_path):
        traj = PowerTrajectory(1.0, np.array([3.0, 2.9756, 2.9512]), UNIT)
        path = write_trajectory_csv(traj, tmp_path / "t.csv")
        text = path.read_text()
        assert text.splitlines()[0] == "time_s,power_mw"
        # repr() floats: reading the file back loses nothing
        values = [float(line.split(",")[1]) for line in text.splitlines()[1:]]
        assert values == [3.0, 2.9756, 2.9512]


def test_scenario_error_carries_location():
    err = ScenarioError("boom", key="ramp", line=7, source="x.scenario")
    assert err.key == "ramp"
    assert err.line == 7
    assert "x.scenario" in str(err)
    assert "line 7" in str(err)
    assert "key 'ramp'" in str(err)
