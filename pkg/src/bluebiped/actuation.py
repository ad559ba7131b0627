"""DC gearmotor electrics, belt transmission, and generalized-force mapping."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MotorParams

RPM_TO_RADS = 2.0 * np.pi / 60.0

# Two-stage synchronous-belt ratios back-derived from the published
# speed table (the pitch diameters themselves are not published).
STAGE1_RATIO = 0.75
STAGE2_RATIO = 0.525
# Constant transmitted power consistent with every published torque row.
TABLE_POWER_W = 8.0


@dataclass(frozen=True)
class BeltDescriptor:
    pitch_length_mm: float
    teeth: int
    belt_height_mm: float


@dataclass(frozen=True)
class BeltStage:
    """One synchronous-belt reduction stage (output/input speed ratio)."""

    ratio: float
    pitch_mm: float = 5.08
    teeth_driver: int | None = None
    teeth_driven: int | None = None
    belt: BeltDescriptor | None = None

    def __post_init__(self):
        if not self.ratio > 0:
            raise ValueError(f"stage ratio must be > 0 (got {self.ratio})")
        if self.teeth_driver is not None and self.teeth_driven is not None:
            implied = self.teeth_driver / self.teeth_driven
            if abs(implied - self.ratio) > 1e-9 * max(1.0, self.ratio):
                raise ValueError(
                    f"ratio {self.ratio} inconsistent with tooth counts "
                    f"{self.teeth_driver}/{self.teeth_driven}"
                )


#: The published belt pair used by the actuator.
BELT_70XL = BeltDescriptor(pitch_length_mm=177.80, teeth=35, belt_height_mm=2.3)
BELT_116XL = BeltDescriptor(pitch_length_mm=294.64, teeth=58, belt_height_mm=2.3)

DEFAULT_STAGES = (
    BeltStage(ratio=STAGE1_RATIO, belt=BELT_70XL),
    BeltStage(ratio=STAGE2_RATIO, belt=BELT_116XL),
)


@dataclass
class MotorState:
    """Instantaneous armature state.

    ``stall_limit`` (A, optional) bounds |ia|; exceeded means the model left
    its validity envelope.
    """

    ia: float        # A
    theta_m: float   # rad (motor shaft)
    Va: float        # V applied
    stall_limit: float | None = None

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.ia, self.theta_m, self.Va)):
            raise ValueError("motor state must be finite")
        if self.stall_limit is not None and abs(self.ia) > self.stall_limit:
            raise ValueError(
                f"|ia| = {abs(self.ia):.6g} A exceeds the stall limit "
                f"{self.stall_limit:.6g} A"
            )


def motor_torque(p: MotorParams, ia: float) -> float:
    """Joint-side torque from armature current: Kr * k_phi * ia."""
    return p.Kr * p.k_phi * ia


def current_derivative(p: MotorParams, st: MotorState, omega_m: float) -> float:
    """di_a/dt from the armature voltage equation (back-EMF k_phi*omega_m)."""
    return (st.Va - p.Ra * st.ia - p.k_phi * omega_m) / p.La


def transmission_speeds(stages, omega_int_rpm: float) -> tuple[float, float]:
    """(axle, output) speeds in rpm for a two-stage belt drive."""
    s1, s2 = stages
    omega_axle = s1.ratio * omega_int_rpm
    omega_out = s2.ratio * omega_axle
    return omega_axle, omega_out


def transmission_torques(power_w: float, omega_axle_rpm: float,
                         omega_out_rpm: float) -> tuple[float, float]:
    """(axle, output) torques in N*m at constant transmitted power."""
    if omega_axle_rpm <= 0 or omega_out_rpm <= 0:
        raise ValueError("transmission speeds must be positive")
    tau_axle = power_w / (omega_axle_rpm * RPM_TO_RADS)
    tau_out = power_w / (omega_out_rpm * RPM_TO_RADS)
    return tau_axle, tau_out


def generalized_forces(tau_motor: np.ndarray, beta: np.ndarray,
                       qd: np.ndarray) -> np.ndarray:
    """Q = tau - beta * qd (per-joint viscous damping)."""
    return np.asarray(tau_motor, dtype=float) - np.asarray(beta, dtype=float) * np.asarray(qd, dtype=float)


def sea_torque(stiffness: float, motor_angle: float, joint_angle: float) -> float:
    """Series-elastic spring torque between motor output and link."""
    return stiffness * (motor_angle - joint_angle)


def steady_state_current(p: MotorParams, Va: float, omega_m: float) -> float:
    """Armature current with the inductance transient neglected."""
    return (Va - p.k_phi * omega_m) / p.Ra
