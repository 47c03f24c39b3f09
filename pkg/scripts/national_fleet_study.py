#!/usr/bin/env python3
"""Fleet-level reserve coverage and ramp requirements.

Sizes the share of a national electrolyzer fleet tied up by the FCR and
aFRR demand, and inverts the gradient relation for the ramp rate the
fleet needs.  Prints both the literal inversion and the reconstruction
of the commonly quoted 0.0945 %/s figure; see scenarios/README.md for
why the two differ.
"""

from elybal import PRESETS, eq1_min_ramp, fleet_coverage, min_rated_power

GERMAN_FLEET_MW = 10_000.0
EU_FLEET_MW = 40_000.0
FCR_DEMAND_MW = 500.0  # per direction
FCR_PROCURED_MW = 2_000.0  # total procured band, +/-
AFRR_DEMAND_MW = 2_000.0
EU_FCR_DEMAND_MW = 3_000.0
TRADE_SIZE_MW = 2.0


def main() -> None:
    print("== fleet coverage ==")
    for label, need, fleet in (
        ("DE  FCR", FCR_DEMAND_MW, GERMAN_FLEET_MW),
        ("EU  FCR", EU_FCR_DEMAND_MW, EU_FLEET_MW),
    ):
        cov = fleet_coverage(need, fleet, symmetric=True)
        print(f"{label}: +/-{need:g} MW on {fleet / 1000:g} GW -> "
              f"{cov.share:.1%} per direction, {cov.headroom_band:.1%} band")

    print("\n== ramp requirement, German FCR case ==")
    literal = eq1_min_ramp(GERMAN_FLEET_MW, 0.9, FCR_PROCURED_MW, TRADE_SIZE_MW, 0.034)
    print(f"literal inversion (u=0.9, P_anc=2 GW, P_ts=2 MW): {literal:.4f}/s = {literal:.2%}/s")
    reconstruction = 0.034 * (FCR_DEMAND_MW / TRADE_SIZE_MW) / (GERMAN_FLEET_MW * 0.9)
    print(f"reconstruction of the quoted figure: "
          f"0.034 x (500/2) / (10000 x 0.9) = {reconstruction:.6f}/s = {reconstruction:.4%}/s")
    print("(documented discrepancy; the quoted 0.0945 %/s matches the "
          "reconstruction, not the literal inversion)")

    print("\n== ramp requirement, German aFRR case ==")
    afrr_need = eq1_min_ramp(9_000.0, 0.56, AFRR_DEMAND_MW, TRADE_SIZE_MW, 0.0034)
    print(f"9 GW busy at u=0.56 against +/-2 GW: {afrr_need:.6f}/s = {afrr_need:.3%}/s")

    print("\n== catalog ramp rates for comparison ==")
    slowest = min(PRESETS.values(), key=lambda p: p.ramp_pct_per_s)
    fastest = max(PRESETS.values(), key=lambda p: p.ramp_pct_per_s)
    print(f"slowest preset: {slowest.manufacturer} at {slowest.ramp_pct_per_s:g} %/s")
    print(f"fastest preset: {fastest.manufacturer} at {fastest.ramp_pct_per_s:g} %/s")
    print(f"rated power for 1 MW FCR at the slowest ramp: "
          f"{min_rated_power(1.0, slowest.ramp_pct_per_s / 100, 30.0):.1f} MW")


if __name__ == "__main__":
    main()
