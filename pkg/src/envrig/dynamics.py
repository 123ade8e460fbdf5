"""Closed-form forward dynamics for the supported model archetypes.

Two archetypes are recognized:

* pendulum: a single revolute joint swinging a point mass.  The joint angle is
  measured from the hanging (stable) configuration:

      th_dd = -(g/L) * sin(th) + tau / (m * L**2)

* cart-pole: a prismatic cart carrying a revolute pole, in the classic
  point-mass-via-4/3 formulation with the pole angle measured from upright and
  l the pole half-length:

      th_dd = (g*sin(th) + cos(th) * (-F - m*l*thd**2*sin(th)) / (M+m))
              / (l * (4/3 - m*cos(th)**2 / (M+m)))
      x_dd  = (F + m*l*(thd**2*sin(th) - th_dd*cos(th))) / (M+m)

The closed forms are parameterized by link masses and center-of-mass offsets
only; declared link inertia values are validated upstream but are not free
parameters here (the 4/3 factor bakes in the uniform-rod inertia).  The engine
interface is model-agnostic, so a general articulated-body backend can be
added later without touching callers.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from math import cos, sin

from .errors import UnsupportedArchetypeError
from .model import JointKind, RobotModel, strip_fixed_joints

GRAVITY = 9.81  # m/s^2, downward


class DynamicsModel(ABC):
    """Pure map (q, qd, generalized force) -> qdd, plus a mechanical energy."""

    dof: int
    joint_names: tuple[str, ...]

    @abstractmethod
    def forward_dynamics(
        self, q: tuple[float, ...], qd: tuple[float, ...], force: tuple[float, ...]
    ) -> tuple[float, ...]:
        ...

    @abstractmethod
    def energy(self, q: tuple[float, ...], qd: tuple[float, ...]) -> float:
        """Total mechanical energy (J) with zero applied force."""


class PendulumDynamics(DynamicsModel):
    def __init__(self, mass: float, length: float, joint_name: str, gravity: float = GRAVITY):
        self.dof = 1
        self.joint_names = (joint_name,)
        self.mass = mass
        self.length = length
        self.gravity = gravity

    def forward_dynamics(self, q, qd, force):
        th = q[0]
        tau = force[0]
        return (
            -(self.gravity / self.length) * sin(th)
            + tau / (self.mass * self.length * self.length),
        )

    def energy(self, q, qd):
        # Potential zero at the hanging configuration.
        m, length, g = self.mass, self.length, self.gravity
        kinetic = 0.5 * m * length * length * qd[0] * qd[0]
        potential = m * g * length * (1.0 - cos(q[0]))
        return kinetic + potential


class CartPoleDynamics(DynamicsModel):
    def __init__(
        self,
        cart_mass: float,
        pole_mass: float,
        pole_half_length: float,
        cart_joint: str,
        pole_joint: str,
        gravity: float = GRAVITY,
    ):
        self.dof = 2
        self.joint_names = (cart_joint, pole_joint)
        self.cart_mass = cart_mass
        self.pole_mass = pole_mass
        self.pole_half_length = pole_half_length
        self.gravity = gravity

    def forward_dynamics(self, q, qd, force):
        th = q[1]
        thd = qd[1]
        f = force[0]  # only the cart is actuated; force[1] is a pole torque, unused
        m_total = self.cart_mass + self.pole_mass
        m, l, g = self.pole_mass, self.pole_half_length, self.gravity
        sin_th = sin(th)
        cos_th = cos(th)
        temp = (-f - m * l * thd * thd * sin_th) / m_total
        th_dd = (g * sin_th + cos_th * temp) / (
            l * (4.0 / 3.0 - m * cos_th * cos_th / m_total)
        )
        x_dd = (f + m * l * (thd * thd * sin_th - th_dd * cos_th)) / m_total
        return (x_dd, th_dd)

    def energy(self, q, qd):
        # Cart + uniform rod of length 2*l; potential zero at the upright pole.
        th = q[1]
        xd, thd = qd
        big_m, m, l, g = self.cart_mass, self.pole_mass, self.pole_half_length, self.gravity
        kinetic = (
            0.5 * (big_m + m) * xd * xd
            + m * l * xd * thd * cos(th)
            + 0.5 * (4.0 / 3.0) * m * l * l * thd * thd
        )
        potential = m * g * l * (cos(th) - 1.0)
        return kinetic + potential


def compile_model(robot_model: RobotModel) -> DynamicsModel:
    """Match a RobotModel against the supported archetypes.

    Fixed joints are ignored for matching. Raises UnsupportedArchetypeError for
    anything that is not a 1-DoF pendulum or a 2-DoF cart-pole chain.
    """
    moving = strip_fixed_joints(robot_model)

    if len(moving) == 1 and moving[0].kind is JointKind.REVOLUTE:
        joint = moving[0]
        bob = robot_model.link(joint.child_link)
        if bob.com_offset <= 0:
            raise UnsupportedArchetypeError(
                f"pendulum link {bob.name!r} needs a positive center-of-mass offset "
                "(the pendulum length)"
            )
        return PendulumDynamics(mass=bob.mass, length=bob.com_offset, joint_name=joint.name)

    if len(moving) == 2:
        slider, hinge = moving
        chained = hinge.parent_link == slider.child_link
        if (
            slider.kind is JointKind.PRISMATIC
            and hinge.kind is JointKind.REVOLUTE
            and chained
        ):
            cart = robot_model.link(slider.child_link)
            pole = robot_model.link(hinge.child_link)
            if pole.com_offset <= 0:
                raise UnsupportedArchetypeError(
                    f"cart-pole pole link {pole.name!r} needs a positive "
                    "center-of-mass offset (the pole half-length)"
                )
            return CartPoleDynamics(
                cart_mass=cart.mass,
                pole_mass=pole.mass,
                pole_half_length=pole.com_offset,
                cart_joint=slider.name,
                pole_joint=hinge.name,
            )

    raise UnsupportedArchetypeError(
        f"model {robot_model.name!r} with {len(moving)} moving joint(s) matches no "
        "supported archetype; recognized patterns: single revolute joint (pendulum), "
        "prismatic cart + revolute pole chain (cart-pole)"
    )
