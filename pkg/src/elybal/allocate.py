"""Daily bid allocation across the six 4 h capacity auction blocks.

Blocks are independent, so each one is solved by exhaustive enumeration
of integer FCR (symmetric) and aFRR (positive) quantities over a 1 MW
setpoint grid.  The symmetric FCR band is reserved around the setpoint;
an aFRR activation then starts below that band, so both products can be
carried at once without double-counting headroom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eligibility import check_eligibility
from .markets import (
    CANONICAL_BLOCKS,
    BalancingProduct,
    CapacityPriceTable,
    Direction,
    ProductKind,
    TimeBlock,
)
from .model import ElectrolyzerUnit, specific_energy_at

_EPS = 1e-9


@dataclass(frozen=True)
class AllocationOptions:
    hydrogen_value_eur_per_kg: float | None = None
    pre_reserved_fcr_mw: float | None = None  # pin the FCR quantity instead of optimizing it
    setpoint_grid_mw: float = 1.0

    def __post_init__(self) -> None:
        if self.setpoint_grid_mw <= 0:
            raise ValueError("setpoint_grid_mw must be > 0")
        if self.hydrogen_value_eur_per_kg is not None and self.hydrogen_value_eur_per_kg < 0:
            raise ValueError("hydrogen_value_eur_per_kg must be >= 0")
        if self.pre_reserved_fcr_mw is not None and self.pre_reserved_fcr_mw < 0:
            raise ValueError("pre_reserved_fcr_mw must be >= 0")


@dataclass(frozen=True)
class ScheduleEntry:
    block: TimeBlock
    product: BalancingProduct
    quantity_mw: float
    direction: Direction
    setpoint_mw: float


@dataclass(frozen=True)
class BidSchedule:
    entries: tuple[ScheduleEntry, ...]

    def for_block(self, block: TimeBlock) -> tuple[ScheduleEntry, ...]:
        return tuple(e for e in self.entries if e.block == block)


@dataclass(frozen=True)
class AllocationResult:
    schedule: BidSchedule
    capacity_revenue_eur: float
    hydrogen_loss_kg: float
    objective_eur: float

    def to_dict(self) -> dict:
        return {
            "capacity_revenue_eur": self.capacity_revenue_eur,
            "hydrogen_loss_kg": self.hydrogen_loss_kg,
            "objective_eur": self.objective_eur,
            "schedule": [
                {
                    "block": e.block.label,
                    "product": e.product.kind.value,
                    "direction": e.direction.value,
                    "quantity_mw": e.quantity_mw,
                    "setpoint_mw": e.setpoint_mw,
                }
                for e in self.schedule.entries
            ],
        }


def _split_products(
    products: tuple[BalancingProduct, ...] | list[BalancingProduct],
) -> tuple[BalancingProduct | None, BalancingProduct | None]:
    if not products:
        raise ValueError("at least one product is required")
    fcr_prod = None
    afrr_prod = None
    for p in products:
        if p.kind is ProductKind.FCR:
            fcr_prod = p
        elif p.kind is ProductKind.AFRR and p.direction is Direction.POS:
            afrr_prod = p
        else:
            raise ValueError(
                f"cannot allocate revenue for {p.label}: only FCR and aFRR POS carry "
                "capacity prices here"
            )
    return fcr_prod, afrr_prod


def _grid_points(lo: float, hi: float, step: float) -> list[float]:
    first = math.ceil(lo / step - _EPS)
    last = math.floor(hi / step + _EPS)
    return [i * step for i in range(first, last + 1)]


def _quantity_choices(limit_mw: float, product: BalancingProduct) -> list[float]:
    """0 plus every tradable quantity up to the physical limit."""
    inc = product.trade_increment_mw
    top = int(math.floor(limit_mw / inc + _EPS))
    choices = [0.0]
    for lots in range(1, top + 1):
        q = lots * inc
        if q >= product.min_bid_mw - _EPS:
            choices.append(q)
    return choices


def _hydrogen_loss_kg(unit: ElectrolyzerUnit, setpoint_mw: float, hours: float) -> float:
    """Production forgone by holding the setpoint instead of full load."""
    curve = unit.efficiency_curve
    if curve is None:
        raise ValueError(
            "hydrogen opportunity cost needs an efficiency curve on the unit"
        )

    def production_kg(power_mw: float) -> float:
        se = specific_energy_at(curve, power_mw / unit.rated_power_mw)
        return power_mw * hours * 1000.0 / se

    return production_kg(unit.rated_power_mw) - production_kg(setpoint_mw)


def _better(
    score: float,
    reserved: float,
    q_fcr: float,
    setpoint: float,
    best: tuple[float, float, float, float] | None,
) -> bool:
    """Tie-break order: score, then less reserved capacity, then less FCR,
    then the higher setpoint (more hydrogen)."""
    if best is None:
        return True
    b_score, b_reserved, b_fcr, b_sp = best
    if score > b_score + _EPS:
        return True
    if score < b_score - _EPS:
        return False
    if reserved < b_reserved - _EPS:
        return True
    if reserved > b_reserved + _EPS:
        return False
    if q_fcr < b_fcr - _EPS:
        return True
    if q_fcr > b_fcr + _EPS:
        return False
    return setpoint > b_sp + _EPS


def _best_for_block(
    unit: ElectrolyzerUnit,
    fcr_prod: BalancingProduct | None,
    fcr_price: float,
    afrr_prod: BalancingProduct | None,
    afrr_price_block: float,
    options: AllocationOptions,
) -> tuple[float, float, float, float]:
    """Returns (q_fcr, q_afrr, setpoint, score) for one block."""
    min_p, max_p = unit.min_power_mw, unit.rated_power_mw
    slow_ramp = min(unit.ramp_up_mw_per_s, unit.ramp_down_mw_per_s)
    h2_value = options.hydrogen_value_eur_per_kg
    duration = fcr_prod.duration_h if fcr_prod else afrr_prod.duration_h

    best_key = None
    best_choice = (0.0, 0.0, max_p, 0.0)
    for sp in _grid_points(min_p, max_p, options.setpoint_grid_mw):
        h2_cost = (
            h2_value * _hydrogen_loss_kg(unit, sp, duration) if h2_value is not None else 0.0
        )
        if fcr_prod is not None:
            fcr_limit = min(
                sp - min_p,
                max_p - sp,
                slow_ramp * fcr_prod.availability_s,
            )
            fcr_choices = _quantity_choices(fcr_limit, fcr_prod)
            if options.pre_reserved_fcr_mw is not None:
                pinned = options.pre_reserved_fcr_mw
                fcr_choices = [q for q in fcr_choices if abs(q - pinned) <= _EPS]
        else:
            fcr_choices = [0.0]
        for q_fcr in fcr_choices:
            if afrr_prod is not None:
                afrr_limit = min(
                    sp - q_fcr - min_p,
                    unit.ramp_down_mw_per_s * afrr_prod.availability_s,
                )
                afrr_choices = _quantity_choices(afrr_limit, afrr_prod)
            else:
                afrr_choices = [0.0]
            for q_afrr in afrr_choices:
                score = q_fcr * fcr_price + q_afrr * afrr_price_block - h2_cost
                if _better(score, q_fcr + q_afrr, q_fcr, sp, best_key):
                    best_key = (score, q_fcr + q_afrr, q_fcr, sp)
                    best_choice = (q_fcr, q_afrr, sp, score)
    return best_choice


def optimize_day(
    unit: ElectrolyzerUnit,
    products: list[BalancingProduct] | tuple[BalancingProduct, ...],
    fcr_prices: CapacityPriceTable | None,
    afrr_price_per_block_eur: float | None,
    options: AllocationOptions | None = None,
    blocks: tuple[TimeBlock, ...] | None = None,
) -> AllocationResult:
    """Revenue-maximal bid schedule for one delivery day.

    Each block is solved independently.  The objective per block is the
    capacity revenue minus, when ``hydrogen_value_eur_per_kg`` is set, the
    value of production forgone at the reduced setpoint.  An infeasible
    block simply carries no bid; it is never an error.
    """
    options = options or AllocationOptions()
    blocks = blocks if blocks is not None else CANONICAL_BLOCKS
    fcr_prod, afrr_prod = _split_products(tuple(products))

    if fcr_prod is not None:
        if fcr_prices is None:
            raise ValueError("FCR is offered but no capacity price table was given")
        missing = [b.label for b in blocks if b.label not in fcr_prices.prices]
        if missing:
            raise ValueError(f"capacity price table missing blocks: {', '.join(missing)}")
    if afrr_prod is not None:
        if afrr_price_per_block_eur is None:
            raise ValueError("aFRR is offered but no capacity price was given")
        if afrr_price_per_block_eur < 0:
            raise ValueError("afrr_price_per_block_eur must be >= 0")
    if options.pre_reserved_fcr_mw is not None and fcr_prod is None:
        raise ValueError("pre_reserved_fcr_mw given but FCR is not among the products")

    entries: list[ScheduleEntry] = []
    revenue = 0.0
    h2_loss = 0.0
    for block in blocks:
        q_fcr, q_afrr, sp, _ = _best_for_block(
            unit,
            fcr_prod,
            fcr_prices.price(block) if fcr_prod is not None else 0.0,
            afrr_prod,
            afrr_price_per_block_eur if afrr_prod is not None else 0.0,
            options,
        )
        if q_fcr > 0:
            entries.append(ScheduleEntry(block, fcr_prod, q_fcr, Direction.SYM, sp))
            revenue += q_fcr * fcr_prices.price(block)
        if q_afrr > 0:
            entries.append(ScheduleEntry(block, afrr_prod, q_afrr, Direction.POS, sp))
            revenue += q_afrr * afrr_price_per_block_eur
        if options.hydrogen_value_eur_per_kg is not None and (q_fcr > 0 or q_afrr > 0):
            duration = fcr_prod.duration_h if fcr_prod else afrr_prod.duration_h
            h2_loss += _hydrogen_loss_kg(unit, sp, duration)

    schedule = BidSchedule(tuple(entries))
    validate_schedule(unit, schedule)
    objective = revenue
    if options.hydrogen_value_eur_per_kg is not None:
        objective -= h2_loss * options.hydrogen_value_eur_per_kg
    return AllocationResult(schedule, revenue, h2_loss, objective)


def validate_schedule(unit: ElectrolyzerUnit, schedule: BidSchedule) -> None:
    """Re-check a schedule from first principles.

    Every entry must pass ``check_eligibility``, with aFRR evaluated from
    the lower edge of any FCR band reserved in the same block, and the
    reserved power ranges per block must not overlap.
    """
    by_block: dict[str, list[ScheduleEntry]] = {}
    for entry in schedule.entries:
        by_block.setdefault(entry.block.label, []).append(entry)
    for label, block_entries in by_block.items():
        fcr_entries = [e for e in block_entries if e.product.kind is ProductKind.FCR]
        afrr_entries = [e for e in block_entries if e.product.kind is ProductKind.AFRR]
        if len(fcr_entries) > 1:
            raise ValueError(f"block {label} carries more than one FCR entry")
        for direction in (Direction.POS, Direction.NEG):
            if len([e for e in afrr_entries if e.direction is direction]) > 1:
                raise ValueError(f"block {label} carries duplicate aFRR {direction.value} entries")
        setpoints = {e.setpoint_mw for e in block_entries}
        if len(setpoints) > 1:
            raise ValueError(f"block {label} mixes setpoints {sorted(setpoints)}")
        q_fcr = fcr_entries[0].quantity_mw if fcr_entries else 0.0
        ranges: list[tuple[float, float]] = []
        for entry in block_entries:
            sp = entry.setpoint_mw
            if entry.product.kind is ProductKind.FCR:
                report = check_eligibility(unit, entry.product, entry.quantity_mw, sp)
                ranges.append((sp - entry.quantity_mw, sp + entry.quantity_mw))
            elif entry.direction is Direction.POS:
                origin = sp - q_fcr
                report = check_eligibility(unit, entry.product, entry.quantity_mw, origin)
                ranges.append((origin - entry.quantity_mw, origin))
            else:
                origin = sp + q_fcr
                report = check_eligibility(unit, entry.product, entry.quantity_mw, origin)
                ranges.append((origin, origin + entry.quantity_mw))
            if not report.eligible:
                raise ValueError(
                    f"block {label}: {entry.product.label} {entry.quantity_mw} MW fails "
                    f"{report.limiting_constraint}"
                )
        ranges.sort()
        for (_, hi), (lo, _) in zip(ranges, ranges[1:]):
            if lo < hi - _EPS:
                raise ValueError(f"block {label}: reserved capacity ranges overlap")


def brute_force_oracle(
    unit: ElectrolyzerUnit,
    products: list[BalancingProduct] | tuple[BalancingProduct, ...],
    fcr_prices: CapacityPriceTable | None,
    afrr_price_per_block_eur: float | None,
    options: AllocationOptions | None = None,
    blocks: tuple[TimeBlock, ...] | None = None,
    max_combinations: int = 10**6,
) -> AllocationResult:
    """Reference optimizer: plain cross product over all integer bids.

    Deliberately written without the pruning used by ``optimize_day`` so
    the two can cross-check each other.  Refuses to run when the search
    space exceeds ``max_combinations``.
    """
    options = options or AllocationOptions()
    blocks = blocks if blocks is not None else CANONICAL_BLOCKS
    fcr_prod, afrr_prod = _split_products(tuple(products))

    min_p, max_p = unit.min_power_mw, unit.rated_power_mw
    step = options.setpoint_grid_mw
    setpoints = _grid_points(min_p, max_p, step)
    n_quant = int(math.floor(max_p / 1.0 + _EPS)) + 1
    space = len(blocks) * len(setpoints) * n_quant * n_quant
    if space > max_combinations:
        raise ValueError(
            f"search space of {space} combinations exceeds the oracle bound {max_combinations}"
        )

    def feasible(sp: float, q_f: float, q_a: float) -> bool:
        if options.pre_reserved_fcr_mw is not None:
            if abs(q_f - options.pre_reserved_fcr_mw) > _EPS:
                return False
        if q_f > 0:
            if fcr_prod is None or q_f < fcr_prod.min_bid_mw - _EPS:
                return False
            lots = q_f / fcr_prod.trade_increment_mw
            if abs(lots - round(lots)) > _EPS:
                return False
            if sp - q_f < min_p - _EPS or sp + q_f > max_p + _EPS:
                return False
            slowest = min(unit.ramp_up_mw_per_s, unit.ramp_down_mw_per_s)
            if q_f / slowest > fcr_prod.availability_s + _EPS:
                return False
        if q_a > 0:
            if afrr_prod is None or q_a < afrr_prod.min_bid_mw - _EPS:
                return False
            lots = q_a / afrr_prod.trade_increment_mw
            if abs(lots - round(lots)) > _EPS:
                return False
            if sp - q_f - q_a < min_p - _EPS:
                return False
            if q_a / unit.ramp_down_mw_per_s > afrr_prod.availability_s + _EPS:
                return False
        return True

    h2_value = options.hydrogen_value_eur_per_kg
    entries: list[ScheduleEntry] = []
    revenue = 0.0
    h2_loss_total = 0.0
    for block in blocks:
        fcr_price = fcr_prices.price(block) if fcr_prod is not None else 0.0
        afrr_price = afrr_price_per_block_eur if afrr_prod is not None else 0.0
        best_key = None
        best = (0.0, 0.0, max_p)
        for sp in setpoints:
            if h2_value is not None:
                duration = fcr_prod.duration_h if fcr_prod else afrr_prod.duration_h
                h2_cost = h2_value * _hydrogen_loss_kg(unit, sp, duration)
            else:
                h2_cost = 0.0
            for qf_lots in range(n_quant):
                q_f = float(qf_lots)
                for qa_lots in range(n_quant):
                    q_a = float(qa_lots)
                    if not feasible(sp, q_f, q_a):
                        continue
                    score = q_f * fcr_price + q_a * afrr_price - h2_cost
                    if _better(score, q_f + q_a, q_f, sp, best_key):
                        best_key = (score, q_f + q_a, q_f, sp)
                        best = (q_f, q_a, sp)
        q_f, q_a, sp = best
        if q_f > 0:
            entries.append(ScheduleEntry(block, fcr_prod, q_f, Direction.SYM, sp))
            revenue += q_f * fcr_price
        if q_a > 0:
            entries.append(ScheduleEntry(block, afrr_prod, q_a, Direction.POS, sp))
            revenue += q_a * afrr_price
        if h2_value is not None and (q_f > 0 or q_a > 0):
            duration = fcr_prod.duration_h if fcr_prod else afrr_prod.duration_h
            h2_loss_total += _hydrogen_loss_kg(unit, sp, duration)

    objective = revenue
    if h2_value is not None:
        objective -= h2_loss_total * h2_value
    return AllocationResult(BidSchedule(tuple(entries)), revenue, h2_loss_total, objective)
