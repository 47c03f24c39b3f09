"""Domain model: electrolyzer units, fleets and partial-load efficiency."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Technology(str, Enum):
    """Electrolysis technology families available at MW scale."""

    AEL = "AEL"
    PEM = "PEM"
    SOEC = "SOEC"
    AEM = "AEM"


@dataclass(frozen=True)
class EfficiencyCurve:
    """Piecewise-linear specific energy demand across the load range.

    Breakpoints map load fraction (share of rated power) to specific energy
    in kWh per kg H2.  Datasheet curves are only trusted inside their stated
    range, so queries outside the breakpoints raise instead of extrapolating.
    """

    breakpoints: tuple[tuple[float, float], ...]  # (load fraction, kWh/kg)

    def __post_init__(self) -> None:
        pts = tuple((float(f), float(e)) for f, e in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if len(pts) < 2:
            raise ValueError("efficiency curve needs at least two breakpoints")
        for (f0, _), (f1, _) in zip(pts, pts[1:]):
            if not f0 < f1:
                raise ValueError("breakpoint load fractions must be strictly increasing")
        for f, e in pts:
            if e <= 0:
                raise ValueError(f"specific energy must be > 0, got {e} kWh/kg at load fraction {f}")

    @property
    def domain(self) -> tuple[float, float]:
        """Lowest and highest load fraction covered by the curve."""
        return self.breakpoints[0][0], self.breakpoints[-1][0]


def specific_energy_at(curve: EfficiencyCurve, load_fraction: float) -> float:
    """Specific energy (kWh/kg) at ``load_fraction``, linearly interpolated.

    Raises ValueError outside the curve domain: no extrapolation.
    """
    lo, hi = curve.domain
    if not (lo - 1e-12 <= load_fraction <= hi + 1e-12):
        raise ValueError(
            f"load fraction {load_fraction} outside efficiency curve domain [{lo}, {hi}]"
        )
    pts = curve.breakpoints
    # exact breakpoint hits are returned verbatim
    for f, e in pts:
        if load_fraction == f:
            return e
    for (f0, e0), (f1, e1) in zip(pts, pts[1:]):
        if f0 <= load_fraction <= f1:
            t = (load_fraction - f0) / (f1 - f0)
            return e0 + t * (e1 - e0)
    # only reachable for queries within the 1e-12 tolerance band at the edges
    return pts[0][1] if load_fraction < lo else pts[-1][1]


@dataclass(frozen=True)
class ElectrolyzerUnit:
    """A single electrolyzer plant as seen by the balancing market.

    Ramp rates are stored as fraction of rated power per second (0.0061,
    not "0.61 %"); file parsers convert from the percent notation used by
    manufacturer datasheets.  ``ramp_down`` defaults to ``ramp_up`` when a
    datasheet quotes only one figure.
    """

    name: str
    technology: Technology
    rated_power_mw: float
    min_load_fraction: float  # u: lowest safe continuous load, share of rated
    ramp_up: float  # fraction of rated power per second (load increase)
    ramp_down: float | None = None  # defaults to ramp_up
    efficiency_curve: EfficiencyCurve | None = None

    def __post_init__(self) -> None:
        if self.rated_power_mw <= 0:
            raise ValueError(f"rated_power_mw must be > 0, got {self.rated_power_mw}")
        if not 0 < self.min_load_fraction < 1:
            raise ValueError(
                f"min_load_fraction must be in (0, 1), got {self.min_load_fraction}"
            )
        if self.ramp_up <= 0:
            raise ValueError(f"ramp_up must be > 0, got {self.ramp_up}")
        if self.ramp_down is None:
            object.__setattr__(self, "ramp_down", self.ramp_up)
        if self.ramp_down <= 0:
            raise ValueError(f"ramp_down must be > 0, got {self.ramp_down}")
        if self.efficiency_curve is not None:
            lo, hi = self.efficiency_curve.domain
            if lo < self.min_load_fraction - 1e-9 or hi > 1.0 + 1e-9:
                raise ValueError(
                    "efficiency breakpoints must lie within "
                    f"[{self.min_load_fraction}, 1.0], curve covers [{lo}, {hi}]"
                )

    @property
    def min_power_mw(self) -> float:
        return self.min_load_fraction * self.rated_power_mw

    @property
    def ramp_up_mw_per_s(self) -> float:
        return self.ramp_up * self.rated_power_mw

    @property
    def ramp_down_mw_per_s(self) -> float:
        return self.ramp_down * self.rated_power_mw

    def ramp_mw_per_s(self, direction: str) -> float:
        """Absolute ramp rate for a power move 'up' or 'down'."""
        if direction == "up":
            return self.ramp_up_mw_per_s
        if direction == "down":
            return self.ramp_down_mw_per_s
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


@dataclass(frozen=True)
class Fleet:
    """A pool of electrolyzer units marketed together."""

    units: tuple[ElectrolyzerUnit, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))

    @property
    def rated_power_mw(self) -> float:
        return sum(u.rated_power_mw for u in self.units)

    @property
    def min_power_mw(self) -> float:
        return sum(u.min_power_mw for u in self.units)

    @property
    def ramp_up_mw_per_s(self) -> float:
        return sum(u.ramp_up_mw_per_s for u in self.units)

    @property
    def ramp_down_mw_per_s(self) -> float:
        return sum(u.ramp_down_mw_per_s for u in self.units)


def aggregate(fleet: Fleet) -> ElectrolyzerUnit:
    """Collapse a fleet into a single equivalent unit.

    Rated power and absolute ramp rates add up across units; the minimum
    load fraction and the per-unit ramp fractions are power-weighted
    averages.  No fleet efficiency curve is synthesized: the aggregate
    carries ``efficiency_curve=None`` and hydrogen accounting has to be
    done per unit.
    """
    if not fleet.units:
        raise ValueError("cannot aggregate an empty fleet")
    total = fleet.rated_power_mw
    share_by_tech: dict[Technology, float] = {}
    for u in fleet.units:
        share_by_tech[u.technology] = share_by_tech.get(u.technology, 0.0) + u.rated_power_mw
    # dominant technology by installed capacity; insertion order breaks ties
    tech = max(share_by_tech, key=lambda t: share_by_tech[t])
    return ElectrolyzerUnit(
        name=f"aggregate({len(fleet.units)} units, {total:g} MW)",
        technology=tech,
        rated_power_mw=total,
        min_load_fraction=fleet.min_power_mw / total,
        ramp_up=fleet.ramp_up_mw_per_s / total,
        ramp_down=fleet.ramp_down_mw_per_s / total,
        efficiency_curve=None,
    )
