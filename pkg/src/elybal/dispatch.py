"""Activation dispatch: rate-limited plant response and delivery checking.

Sign convention, used throughout: power is plant consumption in MW.  A
positive reserve supports the grid by *reducing* consumption, so a full
positive activation corresponds to a negative power offset.  For the FCR
droop response this means an under-frequency event (negative deviation)
pulls the electrolyzer down and an over-frequency event pushes it up, at
full activation for deviations of +/-0.2 Hz and beyond.

The plant model is a pure rate limiter: no actuation lag, no setpoint
filtering.  Anything slower in reality only adds to the delays computed
here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .markets import BalancingProduct, Direction
from .model import ElectrolyzerUnit

DROOP_FULL_ACTIVATION_HZ = 0.2
DELIVERY_TOLERANCE = 0.005  # fraction of the bid
DEFAULT_TIMESTEP_S = 1.0

_TOL_MW = 1e-9


class SignalKind(str, Enum):
    FREQUENCY_DEVIATION = "frequency"  # Hz offset from 50 Hz
    SETPOINT_REQUEST = "setpoint"  # requested power offset in MW


@dataclass(frozen=True)
class ActivationSignal:
    """Uniformly sampled activation request starting at t = 0."""

    kind: SignalKind
    values: tuple[float, ...]
    timestep_s: float = DEFAULT_TIMESTEP_S

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.timestep_s <= 0:
            raise ValueError(f"timestep_s must be > 0, got {self.timestep_s}")
        if not self.values:
            raise ValueError("signal needs at least one sample")

    @classmethod
    def from_rows(cls, kind: SignalKind, rows: list[tuple[float, float]]) -> "ActivationSignal":
        """Build from (time_s, value) rows, enforcing t0 = 0 and uniform spacing."""
        if len(rows) < 2:
            raise ValueError("signal file needs at least two rows to fix the timestep")
        times = [t for t, _ in rows]
        if abs(times[0]) > 1e-9:
            raise ValueError(f"signal must start at t = 0 s, got {times[0]}")
        dt = times[1] - times[0]
        if dt <= 0:
            raise ValueError("signal times must be strictly increasing")
        for i, (t0, t1) in enumerate(zip(times, times[1:])):
            if abs((t1 - t0) - dt) > 1e-9 * max(1.0, dt):
                raise ValueError(f"non-uniform timestep between rows {i} and {i + 1}")
        return cls(kind, tuple(v for _, v in rows), dt)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.timestep_s


@dataclass(frozen=True, eq=False)
class PowerTrajectory:
    """Simulated plant consumption, one sample per timestep."""

    timestep_s: float
    powers_mw: np.ndarray = field(repr=False)
    unit: ElectrolyzerUnit

    def __post_init__(self) -> None:
        powers = np.asarray(self.powers_mw, dtype=float)
        object.__setattr__(self, "powers_mw", powers)
        if powers.ndim != 1 or powers.size == 0:
            raise ValueError("trajectory needs a one-dimensional, non-empty sample array")
        if self.timestep_s <= 0:
            raise ValueError("timestep_s must be > 0")
        lo = self.unit.min_power_mw - _TOL_MW
        hi = self.unit.rated_power_mw + _TOL_MW
        if powers.min() < lo or powers.max() > hi:
            raise ValueError("trajectory leaves the operating band of the unit")
        steps = np.diff(powers)
        up_lim = self.unit.ramp_up_mw_per_s * self.timestep_s + _TOL_MW
        down_lim = self.unit.ramp_down_mw_per_s * self.timestep_s + _TOL_MW
        if steps.size and (steps.max() > up_lim or steps.min() < -down_lim):
            raise ValueError("trajectory violates the ramp limits of the unit")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.powers_mw)) * self.timestep_s

    @property
    def duration_s(self) -> float:
        return (len(self.powers_mw) - 1) * self.timestep_s


@dataclass(frozen=True)
class ComplianceResult:
    compliant: bool
    first_violation_time_s: float | None
    max_delivery_delay_s: float
    delivered_energy_mwh: float  # signed, relative to the setpoint

    def to_dict(self) -> dict:
        return {
            "compliant": self.compliant,
            "first_violation_time_s": self.first_violation_time_s,
            "max_delivery_delay_s": self.max_delivery_delay_s,
            "delivered_energy_mwh": self.delivered_energy_mwh,
        }


def droop_target(freq_deviation_hz: float, bid_mw: float) -> float:
    """FCR power offset (MW) for a frequency deviation, saturating at the bid."""
    if bid_mw < 0:
        raise ValueError(f"bid must be >= 0, got {bid_mw}")
    activation = max(-1.0, min(1.0, freq_deviation_hz / DROOP_FULL_ACTIVATION_HZ))
    return activation * bid_mw


def _requested_offset(
    kind: SignalKind, value: float, bid_mw: float, direction: Direction
) -> float:
    if kind is SignalKind.FREQUENCY_DEVIATION:
        offset = droop_target(value, bid_mw)
    else:
        offset = max(-bid_mw, min(bid_mw, value))
    # one-sided products only ever activate into their own band
    if direction is Direction.POS:
        offset = min(offset, 0.0)
    elif direction is Direction.NEG:
        offset = max(offset, 0.0)
    return offset


def _check_band(
    unit: ElectrolyzerUnit, setpoint_mw: float, bid_mw: float, direction: Direction
) -> None:
    min_p, max_p = unit.min_power_mw, unit.rated_power_mw
    if setpoint_mw < min_p - _TOL_MW or setpoint_mw > max_p + _TOL_MW:
        raise ValueError(
            f"setpoint {setpoint_mw} MW outside operating band [{min_p}, {max_p}] MW"
        )
    needs_down = direction in (Direction.SYM, Direction.POS)
    needs_up = direction in (Direction.SYM, Direction.NEG)
    if needs_down and setpoint_mw - bid_mw < min_p - _TOL_MW:
        raise ValueError(
            f"setpoint {setpoint_mw} MW cannot host a {bid_mw} MW downward activation "
            f"above the minimum load {min_p} MW"
        )
    if needs_up and setpoint_mw + bid_mw > max_p + _TOL_MW:
        raise ValueError(
            f"setpoint {setpoint_mw} MW cannot host a {bid_mw} MW upward activation "
            f"below the rated power {max_p} MW"
        )


def simulate(
    unit: ElectrolyzerUnit,
    setpoint_mw: float,
    bid_mw: float,
    signal: ActivationSignal,
    direction: Direction = Direction.SYM,
) -> PowerTrajectory:
    """Rate-limited plant response to an activation signal.

    The output starts at the setpoint and chases the requested level with
    at most ramp * rated_power per second of movement, using the ramp rate
    of the respective direction.  Requests are clipped to the bid and to
    the product direction before being applied.
    """
    if bid_mw < 0:
        raise ValueError(f"bid must be >= 0, got {bid_mw}")
    _check_band(unit, setpoint_mw, bid_mw, direction)
    dt = signal.timestep_s
    up_step = unit.ramp_up_mw_per_s * dt
    down_step = unit.ramp_down_mw_per_s * dt
    lo, hi = unit.min_power_mw, unit.rated_power_mw
    powers = np.empty(len(signal.values))
    powers[0] = setpoint_mw
    for k in range(1, len(signal.values)):
        offset = _requested_offset(signal.kind, signal.values[k - 1], bid_mw, direction)
        target = min(max(setpoint_mw + offset, lo), hi)
        step = target - powers[k - 1]
        step = min(max(step, -down_step), up_step)
        powers[k] = powers[k - 1] + step
    return PowerTrajectory(dt, powers, unit)


def check_compliance(
    trajectory: PowerTrajectory,
    signal: ActivationSignal,
    product: BalancingProduct,
    setpoint_mw: float,
    bid_mw: float,
) -> ComplianceResult:
    """Grade a delivered trajectory against the product's deadline.

    Every sustained full-activation request must be met, within 0.5 % of
    the bid, no later than the availability deadline after its onset.  A
    request that ends before both delivery and deadline is not graded.
    The delivered energy integrates the offset from the setpoint over the
    whole horizon (trapezoidal, in MWh).
    """
    n = len(trajectory.powers_mw)
    if n != len(signal.values):
        raise ValueError(
            f"trajectory ({n} samples) and signal ({len(signal.values)}) differ in horizon"
        )
    if abs(trajectory.timestep_s - signal.timestep_s) > 1e-9 * max(1.0, signal.timestep_s):
        raise ValueError("trajectory and signal timesteps differ")
    dt = trajectory.timestep_s
    powers = trajectory.powers_mw

    energy = 0.0
    for k in range(n - 1):
        energy += 0.5 * ((powers[k] - setpoint_mw) + (powers[k + 1] - setpoint_mw)) * dt
    energy = float(energy) / 3600.0

    if bid_mw <= 0:
        return ComplianceResult(True, None, 0.0, energy)

    offsets = [
        _requested_offset(signal.kind, v, bid_mw, product.direction) for v in signal.values
    ]
    full = [abs(o) >= bid_mw * (1.0 - 1e-9) for o in offsets]
    tol = DELIVERY_TOLERANCE * bid_mw

    delays: list[float] = []
    violations: list[float] = []
    for i in range(n):
        same_request = (
            i > 0 and full[i - 1] and offsets[i - 1] * offsets[i] > 0
        )
        if not full[i] or same_request:
            continue
        # onset of a sustained full activation at index i
        required = setpoint_mw + offsets[i]
        end = i
        while end < n and full[end] and offsets[end] * offsets[i] > 0:
            end += 1
        delivered_at = None
        for j in range(i, end):
            if abs(powers[j] - required) <= tol:
                delivered_at = j
                break
        onset_s = i * dt
        if delivered_at is not None:
            delay = (delivered_at - i) * dt
            delays.append(delay)
            if delay > product.availability_s + 1e-9:
                violations.append(onset_s + product.availability_s)
        else:
            observed = (end - 1 - i) * dt
            if observed > product.availability_s + 1e-9:
                # deadline passed while the request was still standing
                delays.append(observed)
                violations.append(onset_s + product.availability_s)

    return ComplianceResult(
        compliant=not violations,
        first_violation_time_s=min(violations) if violations else None,
        max_delivery_delay_s=max(delays, default=0.0),
        delivered_energy_mwh=energy,
    )


def hydrogen_output(trajectory: PowerTrajectory, curve) -> float:
    """Hydrogen produced over a trajectory, in kg.

    Power is averaged per interval (trapezoidal) and converted with the
    specific energy at that interval's load fraction.  Raises when the
    trajectory leaves the curve domain: datasheet efficiency curves are
    not extrapolated.
    """
    from .model import specific_energy_at

    powers = trajectory.powers_mw
    if len(powers) < 2:
        return 0.0
    dt = trajectory.timestep_s
    rated = trajectory.unit.rated_power_mw
    kg = 0.0
    for k in range(len(powers) - 1):
        p_avg = 0.5 * (powers[k] + powers[k + 1])
        energy_kwh = p_avg * dt / 3600.0 * 1000.0
        kg += energy_kwh / specific_energy_at(curve, p_avg / rated)
    return kg
