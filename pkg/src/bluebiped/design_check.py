"""Mechanical design-limit calculators for the actuator drivetrain and frame.

Reproduces the published verification numbers: the belt speed/torque table,
the elliptic fatigue criterion, the hollow-shaft alternating-torque
capacity, and the two force-limit solutions for the actuator base and the
femur link. The printed constants of the two solved force cases carry
inconsistent units in the source material; they are treated as opaque
dimensioned scalars and each solved case is a pure-number regression.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .actuation import (RPM_TO_RADS, STAGE1_RATIO, STAGE2_RATIO,
                        TABLE_POWER_W)

# The ten published gearbox output speeds [rpm] of the verification table.
TABLE_SPEEDS_RPM = (29.0, 37.0, 45.0, 51.0, 67.0, 74.0, 81.0, 98.0, 107.0, 121.0)

# Reference minimum transmission-shaft diameters from the stress analysis
# (metadata only: the full load cases behind them are not reconstructible).
TRANSMISSION_SHAFT_D1_M = 6e-3
TRANSMISSION_SHAFT_D2_M = 7.6e-3

# Constants of the solved actuator-base force case.
BASE_SE_PA = 64.93e6
BASE_FS = 2.0
BASE_MOMENT_ARM = 1.57
BASE_SECTION_MODULUS = 5.645e-7
BASE_KF = 1.45

# Constants of the solved femur force case.
FEMUR_SE_PA = 60e6
FEMUR_FS = 2.0
FEMUR_AXIAL_N = 57.5
FEMUR_AREA_M2 = 2.4e-4
FEMUR_C = 190e-5
FEMUR_I = 7.246e-9


@dataclass(frozen=True)
class ShaftSection:
    """Hollow circular cross-section (solid when d = 0)."""

    D: float   # outer diameter, m
    d: float = 0.0   # inner diameter, m

    def __post_init__(self):
        if not self.D > self.d >= 0:
            raise ValueError(f"need D > d >= 0 (got D={self.D}, d={self.d})")

    @property
    def area(self) -> float:
        return math.pi * (self.D ** 2 - self.d ** 2) / 4.0

    @property
    def second_moment(self) -> float:
        return math.pi * (self.D ** 4 - self.d ** 4) / 64.0

    @property
    def c(self) -> float:
        return self.D / 2.0


@dataclass(frozen=True)
class StressInputs:
    """Material, safety, and load data for the shaft fatigue check."""

    Se: float        # endurance limit, Pa
    Sy: float        # yield strength, Pa
    fs: float        # safety factor
    Kf_bend: float   # fatigue stress-concentration factor, bending
    Kf_tors: float   # fatigue stress-concentration factor, torsion
    Ma: float        # alternating moment, N*m
    section: ShaftSection

    def __post_init__(self):
        if not (self.Se > 0 and self.Sy > 0):
            raise ValueError("Se and Sy must be > 0")
        if not self.fs >= 1:
            raise ValueError(f"safety factor must be >= 1 (got {self.fs})")


def speed_torque_table(speeds_rpm=TABLE_SPEEDS_RPM, power_w: float = TABLE_POWER_W,
                       r1: float = STAGE1_RATIO, r2: float = STAGE2_RATIO) -> list[dict]:
    """Speed/torque rows through the two-stage belt drive.

    One row per input speed: omega_out, omega_axle [rpm] and tau_int,
    tau_out, tau_axle [N*m] at constant transmitted power.
    """
    rows = []
    for w_int in speeds_rpm:
        if w_int <= 0:
            raise ValueError(f"input speed must be > 0 rpm (got {w_int})")
        w_axle = r1 * w_int
        w_out = r2 * w_axle
        rows.append({
            "omega_int_rpm": w_int,
            "omega_out_rpm": w_out,
            "omega_axle_rpm": w_axle,
            "tau_int_nm": power_w / (w_int * RPM_TO_RADS),
            "tau_out_nm": power_w / (w_out * RPM_TO_RADS),
            "tau_axle_nm": power_w / (w_axle * RPM_TO_RADS),
        })
    return rows


def asme_elliptic_utilization(Sa: float, Sm: float, Se: float, Sy: float) -> float:
    """(Sa/Se)^2 + (Sm/Sy)^2; a section passes while this is <= 1."""
    if Se <= 0 or Sy <= 0:
        raise ValueError("Se and Sy must be > 0")
    return (Sa / Se) ** 2 + (Sm / Sy) ** 2


def internal_shaft_terms(inputs: StressInputs) -> dict:
    """Intermediate terms of the shaft capacity evaluation (for reporting)."""
    D, d = inputs.section.D, inputs.section.d
    bending = (32.0 * inputs.Kf_bend * inputs.Ma) ** 2
    resist = (math.pi ** 2) * (D ** 4 - d ** 4) ** 2 * inputs.Se ** 2 / (inputs.fs ** 2 * D ** 2)
    radicand = (resist - bending) / (768.0 * inputs.Kf_tors)
    return {
        "bending_term": bending,
        "resisting_term": resist,
        "radicand": radicand,
    }


def internal_shaft_torque_capacity(inputs: StressInputs) -> float:
    """Alternating-torque capacity of the internal shaft section [N*m].

    Evaluates the elliptic-criterion capacity exactly as printed:
    Ta = sqrt( 1/(768 kft) * ( pi^2 (D^4-d^4)^2 Se^2 / (fs^2 D^2)
               - (32 kff Ma)^2 ) ).
    """
    radicand = internal_shaft_terms(inputs)["radicand"]
    if radicand < 0:
        raise ValueError(
            "moment-dominated failure: the section fails in bending alone "
            f"(radicand {radicand:.6g} < 0)"
        )
    return math.sqrt(radicand)


def base_force_limit(Se: float = BASE_SE_PA, fs: float = BASE_FS,
                     moment_arm: float = BASE_MOMENT_ARM,
                     section_modulus: float = BASE_SECTION_MODULUS,
                     Kf: float = BASE_KF) -> float:
    """Maximum force on the actuator base: F = (Se/fs) * W / (arm * Kf)."""
    if min(Se, fs, moment_arm, section_modulus, Kf) <= 0:
        raise ValueError("all base force-limit inputs must be > 0")
    return (Se / fs) * section_modulus / (moment_arm * Kf)


def base_stress(F: float, moment_arm: float = BASE_MOMENT_ARM,
                section_modulus: float = BASE_SECTION_MODULUS,
                Kf: float = BASE_KF) -> float:
    """Stress produced by force F in the base's critical section [Pa]."""
    return F * moment_arm * Kf / section_modulus


def femur_force_limit(Se: float = FEMUR_SE_PA, fs: float = FEMUR_FS,
                      axial_force: float = FEMUR_AXIAL_N,
                      area: float = FEMUR_AREA_M2,
                      c: float = FEMUR_C, I: float = FEMUR_I) -> float:
    """Maximum bending force on the femur under combined tension + bending.

    Solves Se/fs = axial/area + F*c/I for F.
    """
    if min(Se, fs, area, c, I) <= 0 or axial_force < 0:
        raise ValueError("femur force-limit inputs must be positive")
    allowable = Se / fs
    axial_stress = axial_force / area
    margin = allowable - axial_stress
    # exact boundary (margin 0 up to roundoff) is a valid zero-force answer
    if margin < -1e-12 * allowable:
        raise ValueError(
            f"axial stress alone exceeds allowable "
            f"({axial_stress:.6g} Pa > {allowable:.6g} Pa)"
        )
    return max(margin, 0.0) * I / c


def femur_stress(F: float, axial_force: float = FEMUR_AXIAL_N,
                 area: float = FEMUR_AREA_M2, c: float = FEMUR_C,
                 I: float = FEMUR_I) -> float:
    """Combined tension + bending stress in the femur section [Pa]."""
    return axial_force / area + F * c / I
