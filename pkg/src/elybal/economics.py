"""Revenue, cost and fleet coverage arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .markets import CapacityPriceTable, day_capacity_price_sum


def fcr_day_revenue(bid_mw: float, prices: CapacityPriceTable) -> float:
    """Capacity revenue of a constant FCR bid held over all six blocks."""
    if bid_mw < 0:
        raise ValueError(f"bid_mw must be >= 0, got {bid_mw}")
    return bid_mw * day_capacity_price_sum(prices)


def afrr_day_capacity_revenue(
    quantity_mw: float, hours: float, price_eur_per_mw_h: float
) -> float:
    """Capacity revenue of an aFRR quantity held for a number of hours."""
    if quantity_mw < 0 or hours < 0 or price_eur_per_mw_h < 0:
        raise ValueError("quantity, hours and price must be >= 0")
    return quantity_mw * hours * price_eur_per_mw_h


def electricity_cost(setpoint_mw: float, hours: float, price_eur_per_mwh: float) -> float:
    """Energy bill for holding a setpoint, fees already included in the price."""
    if setpoint_mw < 0 or hours < 0:
        raise ValueError("setpoint_mw and hours must be >= 0")
    return setpoint_mw * hours * price_eur_per_mwh


def savings_ratio(
    fcr_revenue_eur: float, afrr_revenue_eur: float, electricity_cost_eur: float
) -> float:
    """Capacity revenue as a share of the electricity bill."""
    if electricity_cost_eur <= 0:
        raise ValueError(f"electricity cost must be > 0, got {electricity_cost_eur}")
    return (fcr_revenue_eur + afrr_revenue_eur) / electricity_cost_eur


@dataclass(frozen=True)
class CoverageResult:
    """Share of a fleet needed to carry a reserve requirement."""

    share: float
    symmetric: bool
    headroom_band: float | None  # 2x share for symmetric products

    def to_dict(self) -> dict:
        return {
            "share": self.share,
            "symmetric": self.symmetric,
            "headroom_band": self.headroom_band,
        }


def fleet_coverage(
    required_reserve_mw: float, fleet_power_mw: float, symmetric: bool
) -> CoverageResult:
    """How much of a fleet a per-direction reserve requirement ties up.

    A symmetric product needs the requirement in both directions, so the
    operating band it claims is twice the per-direction share.
    """
    if required_reserve_mw < 0:
        raise ValueError("required_reserve_mw must be >= 0")
    if fleet_power_mw <= 0:
        raise ValueError("fleet_power_mw must be > 0")
    share = required_reserve_mw / fleet_power_mw
    band = 2.0 * share if symmetric else None
    return CoverageResult(share=share, symmetric=symmetric, headroom_band=band)


def round_to_sig_figs(value: float, figures: int = 2) -> float:
    """Round to significant figures, for headline-style reporting."""
    if value == 0:
        return 0.0
    digits = figures - 1 - math.floor(math.log10(abs(value)))
    return round(value, digits)


@dataclass(frozen=True)
class EconomicReport:
    """Bundle of the daily balancing economics of one unit or fleet.

    ``savings_ratio`` uses the exact electricity cost; the variant against
    the 2-significant-figure cost is carried alongside because headline
    summaries tend to quote rounded bills.  aFRR activation revenue is not
    modeled; a user-supplied figure is passed through untouched.
    """

    fcr_revenue_eur: float | None = None
    afrr_capacity_revenue_eur: float | None = None
    electricity_cost_eur: float | None = None
    electricity_cost_rounded_eur: float | None = None
    savings_ratio: float | None = None
    savings_ratio_vs_rounded_cost: float | None = None
    afrr_activation_revenue_eur: float | None = None  # pass-through, not modeled
    coverage: CoverageResult | None = None
    assumptions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fcr_revenue_eur": self.fcr_revenue_eur,
            "afrr_capacity_revenue_eur": self.afrr_capacity_revenue_eur,
            "electricity_cost_eur": self.electricity_cost_eur,
            "electricity_cost_rounded_eur": self.electricity_cost_rounded_eur,
            "savings_ratio": self.savings_ratio,
            "savings_ratio_vs_rounded_cost": self.savings_ratio_vs_rounded_cost,
            "afrr_activation_revenue_eur": self.afrr_activation_revenue_eur,
            "coverage": self.coverage.to_dict() if self.coverage else None,
            "assumptions": self.assumptions,
        }


def build_report(
    *,
    fcr_bid_mw: float | None = None,
    fcr_prices: CapacityPriceTable | None = None,
    afrr_quantity_mw: float | None = None,
    afrr_price_eur_per_mw_h: float | None = None,
    hours_per_day: float = 24.0,
    setpoint_mw: float | None = None,
    electricity_price_eur_per_mwh: float | None = None,
    required_reserve_mw: float | None = None,
    fleet_power_mw: float | None = None,
    coverage_symmetric: bool = True,
    afrr_activation_revenue_eur: float | None = None,
    assumptions: dict | None = None,
) -> EconomicReport:
    """Assemble an EconomicReport from whatever inputs are on hand.

    The electricity price is taken as final (grid fees already applied).
    Components with missing inputs stay None; the savings ratios require
    a positive cost and at least one revenue term.
    """
    fcr_rev = None
    if fcr_bid_mw is not None and fcr_prices is not None:
        fcr_rev = fcr_day_revenue(fcr_bid_mw, fcr_prices)
    afrr_rev = None
    if afrr_quantity_mw is not None and afrr_price_eur_per_mw_h is not None:
        afrr_rev = afrr_day_capacity_revenue(
            afrr_quantity_mw, hours_per_day, afrr_price_eur_per_mw_h
        )
    cost = None
    cost_rounded = None
    if setpoint_mw is not None and electricity_price_eur_per_mwh is not None:
        cost = electricity_cost(setpoint_mw, hours_per_day, electricity_price_eur_per_mwh)
        cost_rounded = round_to_sig_figs(cost, 2)
    ratio = None
    ratio_rounded = None
    if cost is not None and cost > 0 and (fcr_rev is not None or afrr_rev is not None):
        ratio = savings_ratio(fcr_rev or 0.0, afrr_rev or 0.0, cost)
        if cost_rounded and cost_rounded > 0:
            ratio_rounded = savings_ratio(fcr_rev or 0.0, afrr_rev or 0.0, cost_rounded)
    coverage = None
    if required_reserve_mw is not None and fleet_power_mw is not None:
        coverage = fleet_coverage(required_reserve_mw, fleet_power_mw, coverage_symmetric)
    return EconomicReport(
        fcr_revenue_eur=fcr_rev,
        afrr_capacity_revenue_eur=afrr_rev,
        electricity_cost_eur=cost,
        electricity_cost_rounded_eur=cost_rounded,
        savings_ratio=ratio,
        savings_ratio_vs_rounded_cost=ratio_rounded,
        afrr_activation_revenue_eur=afrr_activation_revenue_eur,
        coverage=coverage,
        assumptions=dict(assumptions or {}),
    )
