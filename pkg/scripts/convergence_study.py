#!/usr/bin/env python3
"""Integrator calibration study: convergence orders, energy drift, engine gap.

This is the run that pinned the acceptance tolerances: EULER_SI halving ratio
bracket [1.8, 2.2] at dt 1e-3 -> 5e-4, RK4 ratio >= 12 at 8e-3 -> 4e-3, and
the 2% energy oscillation bound.  Reference trajectory is RK4 at dt=1e-5,
cross-checked against scipy when available.
"""

import math

from envrig import EngineId, PendulumDynamics, PhysicsState, engine_step

DYN = PendulumDynamics(1.0, 1.0, "pivot")
THETA0 = 0.5


def rollout(engine: EngineId, dt: float, seconds: float) -> PhysicsState:
    state = PhysicsState((THETA0,), (0.0,))
    for _ in range(round(seconds / dt)):
        state = engine_step(engine, DYN, state, (0.0,), dt)
    return state


def main():
    print(f"pendulum m=1 kg, L=1 m, theta0={THETA0} rad, no torque")
    reference = rollout(EngineId.RK4, 1e-5, 1.0)
    print(f"reference (RK4, dt=1e-5, 1 s): q={reference.q[0]!r} qd={reference.qd[0]!r}")

    try:
        from scipy.integrate import solve_ivp

        sol = solve_ivp(
            lambda t, y: [y[1], -9.81 * math.sin(y[0])],
            (0.0, 1.0),
            [THETA0, 0.0],
            rtol=1e-12,
            atol=1e-14,
        )
        gap = max(abs(reference.q[0] - sol.y[0][-1]), abs(reference.qd[0] - sol.y[1][-1]))
        print(f"scipy cross-check gap: {gap:.3e}")
    except ImportError:
        print("scipy not installed; skipping cross-check")

    def gap(engine, dt):
        s = rollout(engine, dt, 1.0)
        return math.hypot(s.q[0] - reference.q[0], s.qd[0] - reference.qd[0])

    print("\nterminal-state gap vs reference (1 s rollout):")
    print(f"{'engine':10s} {'dt':>8s} {'gap':>12s} {'ratio':>7s}")
    # every dt must divide the 1 s horizon exactly
    for engine, dts in ((EngineId.EULER_SI, (4e-3, 2e-3, 1e-3, 5e-4)),
                        (EngineId.RK4, (8e-3, 4e-3, 2e-3, 1e-3))):
        previous = None
        for dt in dts:
            g = gap(engine, dt)
            ratio = f"{previous / g:7.2f}" if previous else "      -"
            print(f"{engine.value:10s} {dt:8.0e} {g:12.3e} {ratio}")
            previous = g

    print("\nengine-vs-engine terminal gap at dt=1e-4 (1 s): ", end="")
    a = rollout(EngineId.EULER_SI, 1e-4, 1.0)
    b = rollout(EngineId.RK4, 1e-4, 1.0)
    print(f"{max(abs(a.q[0] - b.q[0]), abs(a.qd[0] - b.qd[0])):.3e}")

    print("\nenergy drift, EULER_SI, dt=1e-3, 10 s horizon:")
    state = PhysicsState((THETA0,), (0.0,))
    e0 = DYN.energy(state.q, state.qd)
    worst = 0.0
    for _ in range(10000):
        state = engine_step(EngineId.EULER_SI, DYN, state, (0.0,), 1e-3)
        worst = max(worst, abs(DYN.energy(state.q, state.qd) - e0))
    print(f"E0 = {e0:.6f} J, max |E - E0|/|E0| = {worst / abs(e0):.4%}")


if __name__ == "__main__":
    main()
