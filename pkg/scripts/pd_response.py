#!/usr/bin/env python3
"""Closed-loop PD step response of the pendulum (the bound-pinning run).

Drives the simulated pendulum to a 0.2 rad target with kp=50, kd=5 at the
physics rate and prints the trajectory envelope plus the steady-state error
caused by gravity (no integral term).
"""

import argparse

from envrig import ControlMode, PDGains, compile_model, load_robot_model
from envrig.engines import EngineHandle, EngineId
from envrig.robot import SimulatedRobot


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kp", type=float, default=50.0)
    parser.add_argument("--kd", type=float, default=5.0)
    parser.add_argument("--target", type=float, default=0.2)
    parser.add_argument("--seconds", type=float, default=5.0)
    parser.add_argument("--dt", type=float, default=1e-3)
    args = parser.parse_args()

    model = load_robot_model("pendulum-swingup")
    robot = SimulatedRobot(model, EngineHandle(compile_model(model), EngineId.EULER_SI))
    robot.set_control_mode("pivot", ControlMode.POSITION_PD)
    robot.set_joint_position_target("pivot", args.target, PDGains(args.kp, args.kd))

    ticks = round(args.seconds / args.dt)
    report_every = max(1, ticks // 20)
    print(f"{'t (s)':>7s} {'theta (rad)':>12s} {'error (rad)':>12s}")
    for k in range(ticks):
        robot.advance_ticks(1, args.dt)
        if (k + 1) % report_every == 0:
            theta = robot.joint_position("pivot")
            print(f"{(k + 1) * args.dt:7.2f} {theta:12.6f} {theta - args.target:12.6f}")

    theta = robot.joint_position("pivot")
    print(
        f"\nsteady state after {args.seconds} s: theta={theta:.6f}, "
        f"|error|={abs(theta - args.target):.6f} (gravity offset, no integral action)"
    )


if __name__ == "__main__":
    main()
