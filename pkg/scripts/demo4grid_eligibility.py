#!/usr/bin/env python3
"""Eligibility study for the 4 MW Demo4Grid-class alkaline unit.

Shows why the unit is rejected for FCR (delivery time vs. the 30 s
deadline) while the same megawatt qualifies as aFRR, and how large a
plant of the same ramp class would have to be for FCR.  Optionally
writes the simulated activation trajectory for plotting.
"""

import argparse
from pathlib import Path

from elybal import (
    ActivationSignal,
    Direction,
    SignalKind,
    afrr,
    check_compliance,
    check_eligibility,
    fcr,
    max_offerable,
    min_rated_power,
    preset,
    simulate,
    write_trajectory_csv,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, help="directory for trajectory CSVs")
    args = parser.parse_args()

    unit = preset("demo4grid").to_unit()
    setpoint, bid = 3.0, 1.0

    print(f"unit: {unit.name}, {unit.rated_power_mw:g} MW, "
          f"min load {unit.min_load_fraction:.0%}, ramp {unit.ramp_up:.2%}/s")
    print(f"operating point {setpoint:g} MW, bid {bid:g} MW\n")

    for product in (fcr(), afrr(Direction.POS)):
        report = check_eligibility(unit, product, bid, setpoint)
        ramp_check = report.constraint("ramp_deadline")
        verdict = "eligible" if report.eligible else f"REJECTED ({report.limiting_constraint})"
        print(f"{product.label:>9}: full delivery in {ramp_check.actual:6.2f} s "
              f"(deadline {ramp_check.required:g} s) -> {verdict}")

    q, sp = max_offerable(unit, afrr(Direction.POS), unit.rated_power_mw)
    print(f"\nmarketable aFRR POS at full load: {q:g} MW (setpoint {sp:g} MW)")
    need = min_rated_power(1.0, unit.ramp_up, fcr().availability_s)
    print(f"rated power needed for 1 MW of FCR at this ramp class: {need:.2f} MW")

    # sustained full activation: watch the unit chase the -1 MW request
    signal = ActivationSignal(SignalKind.SETPOINT_REQUEST, tuple([-1.0] * 121), 1.0)
    trajectory = simulate(unit, setpoint, bid, signal)
    for product in (fcr(), afrr(Direction.POS)):
        result = check_compliance(trajectory, signal, product, setpoint, bid)
        status = "compliant" if result.compliant else (
            f"violation at t={result.first_violation_time_s:g} s"
        )
        print(f"{product.label:>9} activation: delivered after "
              f"{result.max_delivery_delay_s:g} s -> {status}")

    if args.out:
        path = write_trajectory_csv(trajectory, args.out / "demo4grid_step_response.csv")
        print(f"\ntrajectory written to {path}")


if __name__ == "__main__":
    main()
