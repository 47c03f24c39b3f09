#!/usr/bin/env python3
"""One delivery day of balancing revenue for a 100 MW alkaline plant.

Optimizes the daily bid schedule (FCR pinned at the ramp-limited 5 MW,
aFRR filling the remaining headroom), then sets the capacity revenue
against the electricity bill.
"""

import argparse
from pathlib import Path

from elybal import (
    AllocationOptions,
    Direction,
    ElectrolyzerUnit,
    Technology,
    afrr,
    apply_grid_fee,
    build_report,
    fcr,
    load_capacity_prices,
    optimize_day,
)

PRICES = Path(__file__).resolve().parent.parent / "scenarios" / "prices" / "capacity_2024_07_25.csv"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--prices", type=Path, default=PRICES, help="capacity price CSV")
    parser.add_argument("--afrr-price", type=float, default=20.0, help="euro/MW/h")
    parser.add_argument("--spot", type=float, default=50.0, help="euro/MWh before fees")
    parser.add_argument("--fees-pct", type=float, default=30.0)
    args = parser.parse_args()

    unit = ElectrolyzerUnit("100 MW AEL plant", Technology.AEL, 100.0, 0.5, 0.00167)
    prices = load_capacity_prices(args.prices)

    result = optimize_day(
        unit,
        [fcr(), afrr(Direction.POS)],
        prices,
        afrr_price_per_block_eur=args.afrr_price * 4.0,
        options=AllocationOptions(pre_reserved_fcr_mw=5.0),
    )
    print("daily schedule:")
    for entry in result.schedule.entries:
        print(f"  {entry.block.label}  {entry.product.label:>8}  "
              f"{entry.quantity_mw:>4g} MW  @ {entry.setpoint_mw:g} MW")
    print(f"capacity revenue: {result.capacity_revenue_eur:,.2f} euro/day")

    afrr_mw = max(
        (e.quantity_mw for e in result.schedule.entries if not e.product.symmetric),
        default=0.0,
    )
    report = build_report(
        fcr_bid_mw=5.0,
        fcr_prices=prices,
        afrr_quantity_mw=afrr_mw,
        afrr_price_eur_per_mw_h=args.afrr_price,
        setpoint_mw=95.0,
        electricity_price_eur_per_mwh=apply_grid_fee(args.spot, args.fees_pct / 100.0),
    )
    print(f"\nFCR revenue:       {report.fcr_revenue_eur:>12,.2f} euro/day")
    print(f"aFRR revenue:      {report.afrr_capacity_revenue_eur:>12,.2f} euro/day")
    print(f"electricity bill:  {report.electricity_cost_eur:>12,.2f} euro/day "
          f"(~{report.electricity_cost_rounded_eur:,.0f})")
    print(f"savings ratio:     {report.savings_ratio:>12.1%}  "
          f"(vs rounded bill: {report.savings_ratio_vs_rounded_cost:.1%})")


if __name__ == "__main__":
    main()
