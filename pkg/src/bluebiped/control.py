"""Pole-placement gains, reference trajectories, and computed-torque control."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import dynamics
from .model import JointState, RobotModel

NUM_JOINTS = 6


@dataclass(frozen=True)
class Gains:
    """PD gains of the linearized error dynamics edd + kd*ed + kp*e = 0.

    Scalars apply to every joint; 6-vectors give per-joint overrides.
    """

    kp: float | np.ndarray
    kd: float | np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.kp) <= 0) or np.any(np.asarray(self.kd) <= 0):
            raise ValueError("gains must be positive")


def gains_from_poles(p1: float, p2: float) -> Gains:
    """Gains placing the closed-loop poles at -p1 and -p2 (rad/s magnitudes).

    Expanding (s + p1)(s + p2) gives kp = p1*p2 and kd = p1 + p2.
    """
    if p1 <= 0 or p2 <= 0:
        raise ValueError(f"pole magnitudes must be positive (got {p1}, {p2})")
    return Gains(kp=p1 * p2, kd=p1 + p2)


@dataclass
class Reference:
    """Desired position, velocity, and acceleration at one instant."""

    q: np.ndarray     # (6,) rad
    qd: np.ndarray    # (6,) rad/s
    qdd: np.ndarray   # (6,) rad/s^2


@dataclass
class HoldReference:
    """Constant setpoint."""

    q: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)

    def at(self, t: float) -> Reference:
        z = np.zeros(NUM_JOINTS)
        return Reference(q=self.q.copy(), qd=z, qdd=z.copy())


@dataclass
class SinusoidReference:
    """Per-joint q_d = offset + A*sin(w*t + phase) with analytic derivatives."""

    amplitude: np.ndarray
    frequency: np.ndarray   # rad/s
    phase: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    offset: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))

    def __post_init__(self):
        self.amplitude = np.broadcast_to(np.asarray(self.amplitude, dtype=float), (NUM_JOINTS,)).copy()
        self.frequency = np.broadcast_to(np.asarray(self.frequency, dtype=float), (NUM_JOINTS,)).copy()
        self.phase = np.broadcast_to(np.asarray(self.phase, dtype=float), (NUM_JOINTS,)).copy()
        self.offset = np.broadcast_to(np.asarray(self.offset, dtype=float), (NUM_JOINTS,)).copy()

    def at(self, t: float) -> Reference:
        arg = self.frequency * t + self.phase
        s, c = np.sin(arg), np.cos(arg)
        return Reference(
            q=self.offset + self.amplitude * s,
            qd=self.amplitude * self.frequency * c,
            qdd=-self.amplitude * self.frequency ** 2 * s,
        )


@dataclass
class SplineReference:
    """Clamped cubic spline through (t_k, q_k) knots, zero end velocities."""

    knots_t: np.ndarray
    knots_q: np.ndarray   # (nknots, 6)

    def __post_init__(self):
        t = np.asarray(self.knots_t, dtype=float)
        q = np.asarray(self.knots_q, dtype=float)
        if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("spline knots need >= 2 strictly increasing times")
        if q.shape != (len(t), NUM_JOINTS):
            raise ValueError(f"knot values must be ({len(t)}, {NUM_JOINTS})")
        self.knots_t, self.knots_q = t, q
        self._spline = CubicSpline(t, q, axis=0, bc_type="clamped")

    def at(self, t: float) -> Reference:
        t = float(np.clip(t, self.knots_t[0], self.knots_t[-1]))
        return Reference(
            q=self._spline(t),
            qd=self._spline(t, 1),
            qdd=self._spline(t, 2),
        )


def reference_trajectory(kind: str, params: dict, t: float) -> Reference:
    """Evaluate a reference of the given kind at time t."""
    return make_reference(kind, params).at(t)


def make_reference(kind: str, params: dict):
    if kind == "hold":
        return HoldReference(q=np.asarray(params["q"], dtype=float))
    if kind == "sinusoid":
        return SinusoidReference(
            amplitude=params["amplitude"],
            frequency=params["frequency"],
            phase=params.get("phase", np.zeros(NUM_JOINTS)),
            offset=params.get("offset", np.zeros(NUM_JOINTS)),
        )
    if kind == "spline":
        return SplineReference(knots_t=params["knots_t"], knots_q=params["knots_q"])
    raise ValueError(f"unknown reference kind {kind!r}")


def computed_torque(m: RobotModel, s: JointState, ref: Reference, g: Gains) -> np.ndarray:
    """Feedback-linearizing torque tau = D*mu + C*qd + G.

    mu = qdd_des - kp*e - kd*ed with e = q - q_des. On the exact model the
    closed loop reduces to edd + kd*ed + kp*e = 0.
    """
    mats = dynamics.matrices(m, s.q, s.qd)
    e = s.q - ref.q
    ed = s.qd - ref.qd
    mu = ref.qdd - np.asarray(g.kp) * e - np.asarray(g.kd) * ed
    return mats.D @ mu + mats.C @ s.qd + mats.G
