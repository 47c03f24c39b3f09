"""Balancing products, auction time blocks and price containers.

Product parameters follow the German/European market design: FCR is a
symmetric product with a 30 s full-activation deadline, aFRR and mFRR are
direction-specific with 5 min / 12.5 min deadlines.  All three are traded
in 1 MW steps over 4 h blocks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping


class ProductKind(str, Enum):
    FCR = "FCR"
    AFRR = "aFRR"
    MFRR = "mFRR"


class Direction(str, Enum):
    SYM = "SYM"  # symmetric band around the setpoint
    POS = "POS"  # positive reserve: the grid gains power, a load sheds
    NEG = "NEG"  # negative reserve: the grid loses power, a load absorbs


class EmptySelectionError(ValueError):
    """Raised when a price query matches no samples."""


@dataclass(frozen=True)
class BalancingProduct:
    kind: ProductKind
    min_bid_mw: float  # smallest tradable offer
    trade_increment_mw: float  # bid granularity (product trading size)
    availability_s: float  # latest full-delivery time after activation
    symmetric: bool
    duration_h: float  # auction block length
    direction: Direction

    def __post_init__(self) -> None:
        # Both enums mix in str, so callers may pass plain strings ("POS").
        # Normalize here: downstream code compares identity, not equality.
        object.__setattr__(self, "kind", ProductKind(self.kind))
        object.__setattr__(self, "direction", Direction(self.direction))
        for field_name in ("min_bid_mw", "trade_increment_mw", "availability_s", "duration_h"):
            if getattr(self, field_name) <= 0:
                raise ValueError(f"{field_name} must be > 0")
        if self.symmetric != (self.direction is Direction.SYM):
            raise ValueError("direction SYM is required exactly for symmetric products")

    @property
    def label(self) -> str:
        if self.symmetric:
            return self.kind.value
        return f"{self.kind.value} {self.direction.value}"


def fcr() -> BalancingProduct:
    return BalancingProduct(ProductKind.FCR, 1.0, 1.0, 30.0, True, 4.0, Direction.SYM)


def afrr(direction: Direction | str = Direction.POS) -> BalancingProduct:
    return BalancingProduct(ProductKind.AFRR, 1.0, 1.0, 300.0, False, 4.0, direction)


def mfrr(direction: Direction | str = Direction.POS) -> BalancingProduct:
    return BalancingProduct(ProductKind.MFRR, 1.0, 1.0, 750.0, False, 4.0, direction)


_PRODUCT_NAMES = {
    "fcr": fcr,
    "afrr-pos": lambda: afrr(Direction.POS),
    "afrr-neg": lambda: afrr(Direction.NEG),
    "mfrr-pos": lambda: mfrr(Direction.POS),
    "mfrr-neg": lambda: mfrr(Direction.NEG),
}


def product_from_name(name: str) -> BalancingProduct:
    """Build a product from its CLI/scenario name, e.g. "fcr" or "afrr-pos"."""
    key = name.strip().lower()
    if key == "afrr" or key == "mfrr":
        key = f"{key}-pos"
    if key not in _PRODUCT_NAMES:
        known = ", ".join(sorted(_PRODUCT_NAMES))
        raise ValueError(f"unknown product {name!r}, expected one of: {known}")
    return _PRODUCT_NAMES[key]()


def required_gradient(product: BalancingProduct) -> float:
    """Power gradient (MW/s) needed to deliver one traded unit on time."""
    return product.trade_increment_mw / product.availability_s


@dataclass(frozen=True)
class TimeBlock:
    """One 4 h capacity auction block of the delivery day."""

    label: str
    start_hour: int
    end_hour: int

    def __post_init__(self) -> None:
        if not 0 <= self.start_hour < 24:
            raise ValueError(f"start_hour must be in [0, 24), got {self.start_hour}")
        if self.end_hour != self.start_hour + 4:
            raise ValueError("blocks span exactly four hours")


CANONICAL_BLOCKS: tuple[TimeBlock, ...] = tuple(
    TimeBlock(f"NEGPOS_{h:02d}_{h + 4:02d}", h, h + 4) for h in range(0, 24, 4)
)

_BLOCK_BY_START = {b.start_hour: b for b in CANONICAL_BLOCKS}


def normalize_block_label(label: str) -> str:
    """Map a block label onto the canonical NEGPOS_hh_hh scheme.

    Accepts any label carrying the two block hours as digits, e.g.
    "NEGPOS_00_04", "00-04" or "neg_pos_8_12".
    """
    numbers = [int(n) for n in re.findall(r"\d+", label)]
    if len(numbers) >= 2:
        start, end = numbers[0], numbers[1]
        if start in _BLOCK_BY_START and end == start + 4:
            return _BLOCK_BY_START[start].label
    raise ValueError(f"unrecognized block label {label!r}")


@dataclass(frozen=True)
class CapacityPriceTable:
    """Capacity prices in euro per MW per 4 h block, keyed by block label."""

    prices: Mapping[str, float]

    def __post_init__(self) -> None:
        normalized = {}
        for label, price in dict(self.prices).items():
            canonical = normalize_block_label(label)
            if canonical in normalized:
                raise ValueError(f"duplicate price for block {canonical}")
            if price < 0:
                raise ValueError(f"negative capacity price {price} for block {canonical}")
            normalized[canonical] = float(price)
        ordered = {b.label: normalized[b.label] for b in CANONICAL_BLOCKS if b.label in normalized}
        object.__setattr__(self, "prices", ordered)

    def price(self, block: TimeBlock | str) -> float:
        label = block.label if isinstance(block, TimeBlock) else normalize_block_label(block)
        if label not in self.prices:
            raise ValueError(f"no capacity price for block {label}")
        return self.prices[label]

    def __contains__(self, block: TimeBlock | str) -> bool:
        label = block.label if isinstance(block, TimeBlock) else normalize_block_label(block)
        return label in self.prices


def day_capacity_price_sum(table: CapacityPriceTable) -> float:
    """Sum of the six block prices: euro per MW for a full delivery day."""
    missing = [b.label for b in CANONICAL_BLOCKS if b.label not in table.prices]
    if missing:
        raise ValueError(f"price table incomplete, missing blocks: {', '.join(missing)}")
    return sum(table.prices[b.label] for b in CANONICAL_BLOCKS)


@dataclass(frozen=True)
class SpotPriceSeries:
    """Hourly day-ahead prices as (timestamp, euro/MWh) pairs."""

    samples: tuple[tuple[datetime, float], ...]

    def __post_init__(self) -> None:
        samples = tuple((t, float(p)) for t, p in self.samples)
        object.__setattr__(self, "samples", samples)
        for (t0, _), (t1, _) in zip(samples, samples[1:]):
            if not t0 < t1:
                raise ValueError(f"timestamps must be strictly increasing, got {t0} then {t1}")

    @property
    def prices(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.samples)


def avg_price_below_threshold(
    series: SpotPriceSeries, threshold_eur_per_mwh: float
) -> tuple[float, int]:
    """Mean price and sample count over hours priced strictly below the threshold."""
    if not series.samples:
        raise ValueError("spot price series is empty")
    selected = [p for _, p in series.samples if p < threshold_eur_per_mwh]
    if not selected:
        raise EmptySelectionError(
            f"no samples below {threshold_eur_per_mwh} euro/MWh in series of {len(series.samples)}"
        )
    return sum(selected) / len(selected), len(selected)


def apply_grid_fee(price_eur_per_mwh: float, fee_fraction: float) -> float:
    """Add proportional grid fees and surcharges to an energy price."""
    if fee_fraction < 0:
        raise ValueError(f"fee_fraction must be >= 0, got {fee_fraction}")
    return price_eur_per_mwh * (1.0 + fee_fraction)


def price_table_from_pairs(pairs: Iterable[tuple[str, float]]) -> CapacityPriceTable:
    """Build a table from (label, price) pairs, rejecting duplicate blocks."""
    seen: dict[str, float] = {}
    for label, price in pairs:
        canonical = normalize_block_label(label)
        if canonical in seen:
            raise ValueError(f"duplicate price for block {canonical}")
        seen[canonical] = price
    return CapacityPriceTable(seen)
