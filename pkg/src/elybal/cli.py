"""Command line front end.

Exit codes: 0 on success (and on an eligible/compliant verdict), 2 when
the analysis itself is negative (ineligible bid, failed compliance), 1 on
input errors of any kind.

Flags that describe structured inputs also take ``@file`` references to
scenario fragments: ``--unit @plant.scenario`` reads the [unit] section
of that file.  ``ELYBAL_SCENARIO_DIR`` provides a fallback directory for
relative scenario paths; ``ELYBAL_DEFAULT_PRESET`` supplies a unit when
none is given.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .allocate import AllocationOptions, optimize_day
from .dispatch import check_compliance, simulate
from .economics import build_report
from .eligibility import check_eligibility, default_setpoint, max_offerable
from .markets import apply_grid_fee, avg_price_below_threshold, product_from_name
from .model import ElectrolyzerUnit, Fleet, Technology, aggregate
from .scenario_io import (
    PRESETS,
    Scenario,
    ScenarioError,
    emit_report,
    load_scenario,
    preset,
    write_trajectory_csv,
)

SCENARIO_DIR_ENV = "ELYBAL_SCENARIO_DIR"
DEFAULT_PRESET_ENV = "ELYBAL_DEFAULT_PRESET"


class _Parser(argparse.ArgumentParser):
    # input errors exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_path(value: str) -> Path:
    p = Path(value)
    if p.exists() or p.is_absolute():
        return p
    env_dir = os.environ.get(SCENARIO_DIR_ENV)
    if env_dir:
        candidate = Path(env_dir) / p
        if candidate.exists():
            return candidate
    return p


def _fragment_section(path: Path, section: str) -> dict[str, str]:
    from .scenario_io import _parse_sections  # reuse the scenario grammar

    text = path.read_text(encoding="utf-8")
    for sec in _parse_sections(text, str(path)):
        if sec.name == section:
            return {item.key: item.value for item in sec.items}
    raise ScenarioError(f"fragment has no [{section}] section", source=str(path))


def _unit_from_inline(spec: str) -> ElectrolyzerUnit:
    """Inline unit spec: comma-separated key=value pairs in datasheet units."""
    fields: dict[str, str] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ScenarioError(f"expected key=value in unit spec, got '{part}'")
        key, value = part.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    return _unit_from_fields(fields)


def _unit_from_fields(fields: dict[str, str]) -> ElectrolyzerUnit:
    entry = preset(fields["preset"]) if "preset" in fields else None
    if entry is None:
        for key in ("rated_power_mw", "min_load_pct", "ramp_up_pct_per_s", "technology"):
            if key not in fields:
                raise ScenarioError(f"unit spec is missing '{key}'")
    try:
        tech = (
            Technology(fields["technology"].upper())
            if "technology" in fields
            else entry.technology
        )
        return ElectrolyzerUnit(
            name=fields.get("name") or (entry.manufacturer if entry else "unit"),
            technology=tech,
            rated_power_mw=(
                float(fields["rated_power_mw"]) if "rated_power_mw" in fields else entry.power_mw
            ),
            min_load_fraction=(
                float(fields["min_load_pct"]) / 100.0
                if "min_load_pct" in fields
                else entry.range_min_pct / 100.0
            ),
            ramp_up=(
                float(fields["ramp_up_pct_per_s"]) / 100.0
                if "ramp_up_pct_per_s" in fields
                else entry.ramp_pct_per_s / 100.0
            ),
            ramp_down=(
                float(fields["ramp_down_pct_per_s"]) / 100.0
                if "ramp_down_pct_per_s" in fields
                else None
            ),
        )
    except (ValueError, KeyError) as exc:
        raise ScenarioError(f"invalid unit spec: {exc}") from None


def _unit_from_args(args) -> ElectrolyzerUnit:
    if getattr(args, "fleet", None):
        scenario = load_scenario(_resolve_path(args.fleet))
        return scenario.primary_unit()
    if getattr(args, "unit", None):
        value = args.unit
        if value.startswith("@"):
            fields = _fragment_section(_resolve_path(value[1:]), "unit")
            return _unit_from_fields(fields)
        return _unit_from_inline(value)
    preset_name = getattr(args, "preset", None) or os.environ.get(DEFAULT_PRESET_ENV)
    if preset_name:
        return preset(preset_name).to_unit()
    raise ScenarioError("no unit given: use --preset, --unit or --fleet")


def _number_flag(value: str, section: str, key: str) -> float:
    if value.startswith("@"):
        fields = _fragment_section(_resolve_path(value[1:]), section)
        if key not in fields:
            raise ScenarioError(f"fragment [{section}] has no '{key}'")
        value = fields[key]
    return float(value)


def _product_flag(value: str):
    if value.startswith("@"):
        fields = _fragment_section(_resolve_path(value[1:]), "product")
        name = fields.get("kind", "")
        direction = fields.get("direction")
        if direction and direction.lower() != "sym":
            name = f"{name}-{direction}"
        return product_from_name(name)
    return product_from_name(value)


def cmd_eligibility(args) -> int:
    unit = _unit_from_args(args)
    product = _product_flag(args.product)
    bid = _number_flag(args.bid, "dispatch", "bid_mw")
    if args.setpoint is not None:
        setpoint = _number_flag(args.setpoint, "dispatch", "setpoint_mw")
    else:
        setpoint = default_setpoint(unit, product)
    report = check_eligibility(unit, product, bid, setpoint)
    max_bid, max_sp = max_offerable(unit, product, setpoint)

    if args.format == "json":
        import json

        payload = report.to_dict()
        payload["max_offerable_mw"] = max_bid
        payload["max_offerable_setpoint_mw"] = max_sp
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(
            f"unit: {unit.name} ({unit.rated_power_mw:g} MW, "
            f"min load {unit.min_load_fraction * 100:g}%, "
            f"ramp {unit.ramp_up * 100:g}%/s up, {unit.ramp_down * 100:g}%/s down)"
        )
        print(
            f"product: {product.label} (min bid {product.min_bid_mw:g} MW, "
            f"availability {product.availability_s:g} s)"
        )
        print(f"bid: {bid:g} MW at setpoint {setpoint:g} MW")
        for c in report.constraints:
            flag = "PASS" if c.passed else "FAIL"
            print(f"  [{flag}] {c.name:<13} required {c.required:>10.3f}  actual {c.actual:>10.3f}")
        verdict = "eligible" if report.eligible else (
            f"ineligible (limiting constraint: {report.limiting_constraint})"
        )
        print(verdict)
        print(f"max offerable at this setpoint: {max_bid:g} MW")
    if args.out:
        payload = report.to_dict()
        payload["max_offerable_mw"] = max_bid
        payload["max_offerable_setpoint_mw"] = max_sp
        emit_report(payload, "json", Path(args.out))
    return 0 if report.eligible else 2


def _run_simulate(path: Path, out_dir: Path | None) -> tuple[str, bool, str]:
    scenario = load_scenario(path)
    if scenario.dispatch is None:
        raise ScenarioError("scenario has no [dispatch] section", source=str(path))
    if scenario.signal is None:
        raise ScenarioError("scenario has no [signal] section", source=str(path))
    unit = scenario.primary_unit()
    product = scenario.product(scenario.dispatch.product_name)
    setpoint = scenario.dispatch.setpoint_mw
    bid = scenario.dispatch.bid_mw
    trajectory = simulate(unit, setpoint, bid, scenario.signal, product.direction)
    compliance = check_compliance(trajectory, scenario.signal, product, setpoint, bid)
    lines = [
        f"{scenario.name}: {product.label} {bid:g} MW at setpoint {setpoint:g} MW",
        f"  compliant: {compliance.compliant}",
        f"  max delivery delay: {compliance.max_delivery_delay_s:g} s "
        f"(deadline {product.availability_s:g} s)",
        f"  delivered energy: {compliance.delivered_energy_mwh:.6f} MWh",
    ]
    if out_dir is not None:
        base = out_dir / scenario.name
        if "json" in scenario.output_formats:
            emit_report(
                {"compliance": compliance.to_dict(), "scenario": scenario.name},
                "json", base.with_suffix(".compliance.json"),
            )
        if "csv" in scenario.output_formats:
            emit_report(
                {"compliance": compliance.to_dict(), "scenario": scenario.name},
                "csv", base.with_suffix(".compliance.csv"),
            )
        write_trajectory_csv(trajectory, base.with_suffix(".trajectory.csv"))
        if "plotdata" in scenario.output_formats:
            emit_report({"trajectory": trajectory}, "plotdata", out_dir / f"{scenario.name}_plot")
    return "\n".join(lines), compliance.compliant, scenario.name


def cmd_simulate(args) -> int:
    out_dir = Path(args.out) if args.out else None
    results = _map_scenarios(args.scenario, args.jobs, lambda p: _run_simulate(p, out_dir))
    all_ok = True
    for text, ok, _ in results:
        print(text)
        all_ok = all_ok and ok
    return 0 if all_ok else 2


def _run_allocate(path: Path, prices_override: Path | None, out_dir: Path | None) -> str:
    scenario = load_scenario(path)
    unit = scenario.primary_unit()
    if not scenario.products:
        raise ScenarioError("scenario has no [product] section", source=str(path))
    fcr_prices = scenario.fcr_prices
    if prices_override is not None:
        from .scenario_io import load_capacity_prices

        fcr_prices = load_capacity_prices(prices_override)
    result = optimize_day(
        unit,
        scenario.products,
        fcr_prices,
        scenario.afrr_price_eur_per_mw_block,
        scenario.allocate_options or AllocationOptions(),
    )
    if out_dir is not None:
        base = out_dir / scenario.name
        if "json" in scenario.output_formats:
            emit_report(result, "json", base.with_suffix(".allocation.json"))
        if "csv" in scenario.output_formats:
            emit_report(result, "csv", base.with_suffix(".allocation.csv"))
    reserved = {}
    for e in result.schedule.entries:
        reserved[e.product.label] = reserved.get(e.product.label, 0.0) + e.quantity_mw
    summary = ", ".join(f"{k}: {v:g} MW-blocks" for k, v in sorted(reserved.items()))
    return (
        f"{scenario.name}: capacity revenue {result.capacity_revenue_eur:.2f} euro/day"
        + (f" ({summary})" if summary else " (no bids)")
    )


def cmd_allocate(args) -> int:
    out_dir = Path(args.out) if args.out else None
    prices = Path(args.prices) if args.prices else None
    results = _map_scenarios(args.scenario, args.jobs, lambda p: _run_allocate(p, prices, out_dir))
    for text in results:
        print(text)
    return 0


def _run_economics(path: Path, out_dir: Path | None) -> str:
    scenario = load_scenario(path)
    eco = scenario.economics
    if eco is None:
        raise ScenarioError("scenario has no [economics] section", source=str(path))
    price = eco.electricity_price_eur_per_mwh
    assumptions: dict = {
        "hours_per_day": eco.hours_per_day,
        "grid_fee_pct": eco.grid_fee_fraction * 100.0,
    }
    if price is None and scenario.spot_prices is not None and eco.spot_threshold_eur_per_mwh:
        price, hours = avg_price_below_threshold(
            scenario.spot_prices, eco.spot_threshold_eur_per_mwh
        )
        assumptions["spot_threshold_eur_per_mwh"] = eco.spot_threshold_eur_per_mwh
        assumptions["qualifying_hours"] = hours
    if price is not None:
        assumptions["electricity_price_eur_per_mwh"] = price
        price = apply_grid_fee(price, eco.grid_fee_fraction)
        assumptions["electricity_price_with_fees_eur_per_mwh"] = price
    afrr_hourly = (
        scenario.afrr_price_eur_per_mw_block / 4.0
        if scenario.afrr_price_eur_per_mw_block is not None
        else None
    )
    report = build_report(
        fcr_bid_mw=eco.fcr_bid_mw,
        fcr_prices=scenario.fcr_prices,
        afrr_quantity_mw=eco.afrr_quantity_mw,
        afrr_price_eur_per_mw_h=afrr_hourly,
        hours_per_day=eco.hours_per_day,
        setpoint_mw=eco.setpoint_mw,
        electricity_price_eur_per_mwh=price,
        required_reserve_mw=eco.required_reserve_mw,
        fleet_power_mw=eco.fleet_power_mw,
        coverage_symmetric=eco.coverage_symmetric,
        afrr_activation_revenue_eur=eco.afrr_activation_revenue_eur,
        assumptions=assumptions,
    )
    if out_dir is not None:
        base = out_dir / scenario.name
        if "json" in scenario.output_formats:
            emit_report(report, "json", base.with_suffix(".economics.json"))
        if "csv" in scenario.output_formats:
            emit_report(report, "csv", base.with_suffix(".economics.csv"))
    parts = [f"{scenario.name}:"]
    if report.fcr_revenue_eur is not None:
        parts.append(f"FCR {report.fcr_revenue_eur:.2f} euro/day")
    if report.afrr_capacity_revenue_eur is not None:
        parts.append(f"aFRR {report.afrr_capacity_revenue_eur:.2f} euro/day")
    if report.savings_ratio is not None:
        parts.append(f"savings ratio {report.savings_ratio * 100:.1f}%")
    if report.coverage is not None:
        parts.append(f"fleet share {report.coverage.share * 100:g}%")
        if report.coverage.headroom_band is not None:
            parts.append(f"band {report.coverage.headroom_band * 100:g}%")
    return " ".join(parts)


def cmd_economics(args) -> int:
    out_dir = Path(args.out) if args.out else None
    for text in _map_scenarios(args.scenario, args.jobs, lambda p: _run_economics(p, out_dir)):
        print(text)
    return 0


def cmd_presets(args) -> int:
    if args.action == "list":
        width = max(len(k) for k in PRESETS)
        for key, entry in PRESETS.items():
            star = "*" if entry.estimated else ""
            print(
                f"{key:<{width}}  {entry.power_mw:>5g} MW  "
                f"{entry.range_min_pct:g}-{entry.range_max_pct:g} %  "
                f"{entry.ramp_pct_per_s:g}{star} %/s  {entry.technology.value}"
            )
        return 0
    entry = preset(args.name)
    star = "*" if entry.estimated else ""
    print(f"name: {entry.manufacturer}")
    print(f"technology: {entry.technology.value}")
    print(f"rated power: {entry.power_mw:g} MW")
    print(f"power range: {entry.range_min_pct:g}-{entry.range_max_pct:g} %")
    print(f"ramp rate: {entry.ramp_pct_per_s:g}{star} %/s")
    if entry.estimated:
        print("(*) ramp from manufacturer discussion or calculation, not a datasheet")
    if entry.range_max_pct > 100:
        print("note: operation above 100 % rated power is not modeled")
    return 0


def _map_scenarios(paths: list[str], jobs: int, fn):
    resolved = [_resolve_path(p) for p in paths]
    if jobs > 1 and len(resolved) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, resolved))  # order preserved: deterministic merge
    return [fn(p) for p in resolved]


def build_parser() -> _Parser:
    parser = _Parser(prog="elybal", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_el = sub.add_parser("eligibility", help="check one bid against the market rules")
    p_el.add_argument("--preset", help="catalog unit (see: elybal presets list)")
    p_el.add_argument("--unit", help="inline unit spec key=value,... or @fragment")
    p_el.add_argument("--fleet", help="scenario file whose units are aggregated")
    p_el.add_argument("--product", required=True, help="fcr, afrr-pos, afrr-neg, mfrr-pos, mfrr-neg")
    p_el.add_argument("--bid", required=True, help="bid size in MW (or @fragment)")
    p_el.add_argument("--setpoint", help="operating point in MW; default picks one")
    p_el.add_argument("--format", choices=("text", "json"), default="text")
    p_el.add_argument("--out", help="also write the report as JSON to this file")
    p_el.set_defaults(func=cmd_eligibility)

    p_sim = sub.add_parser("simulate", help="rate-limited response to an activation signal")
    p_sim.add_argument("--scenario", required=True, nargs="+", help="scenario file(s)")
    p_sim.add_argument("--out", help="output directory for trajectory and compliance files")
    p_sim.add_argument("--jobs", type=int, default=1, help="parallel scenario files")
    p_sim.set_defaults(func=cmd_simulate)

    p_alloc = sub.add_parser("allocate", help="revenue-maximal daily bid schedule")
    p_alloc.add_argument("--scenario", required=True, nargs="+", help="scenario file(s)")
    p_alloc.add_argument("--prices", help="override FCR capacity price CSV")
    p_alloc.add_argument("--out", help="output directory")
    p_alloc.add_argument("--jobs", type=int, default=1, help="parallel scenario files")
    p_alloc.set_defaults(func=cmd_allocate)

    p_eco = sub.add_parser("economics", help="revenue, cost and coverage report")
    p_eco.add_argument("--scenario", required=True, nargs="+", help="scenario file(s)")
    p_eco.add_argument("--out", help="output directory")
    p_eco.add_argument("--jobs", type=int, default=1, help="parallel scenario files")
    p_eco.set_defaults(func=cmd_economics)

    p_pre = sub.add_parser("presets", help="browse the unit catalog")
    pre_sub = p_pre.add_subparsers(dest="action", required=True)
    pre_sub.add_parser("list", help="one line per catalog unit")
    p_show = pre_sub.add_parser("show", help="datasheet values of one unit")
    p_show.add_argument("name")
    p_pre.set_defaults(func=cmd_presets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
