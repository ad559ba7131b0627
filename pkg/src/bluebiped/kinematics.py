"""Forward kinematics of the six-joint chain.

Uses the four-parameter link transform with the twist/length taken from the
previous joint (proximal convention), composed from the stance-support base
frame outward. Angular velocities follow the model's fixed axis-aligned
composition per body; CoM velocities come from analytic frame Jacobians so
they are exactly linear in the joint rates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import DHRow, JointState, RobotModel

OMEGA_MAP = _kernels.OMEGA_MAP


def dh_transform(row: DHRow, theta: float) -> np.ndarray:
    """4x4 homogeneous transform for one link, joint angle ``theta`` (rad).

    The constant ``row.theta_offset`` is added to the joint variable.
    """
    out = np.empty((4, 4))
    _kernels._dh_fill(out, row.a_prev, row.alpha_prev, row.d,
                      theta + row.theta_offset)
    return out


def base_transform(m: RobotModel, th0: float | None = None) -> np.ndarray:
    """World transform ahead of joint 1: base frame plus the passive row."""
    packed = _kernels.pack_model(m, th0=th0)
    return packed.base


def chain_transforms(m: RobotModel, q: np.ndarray, th0: float | None = None) -> np.ndarray:
    """Cumulative world transforms of frames 1..6, shape (6,4,4).

    Transform k is base * A_1(q_1) * ... * A_k(q_k). The optional ``th0``
    overrides the passive stance-support angle for this evaluation.
    """
    packed = _kernels.pack_model(m, th0=th0)
    q = np.ascontiguousarray(q, dtype=float)
    return _kernels.fk_chain(packed.dh, packed.base, q)


def pose_errors(T: np.ndarray) -> tuple[float, float]:
    """Max orthonormality residual and determinant error of a 4x4 pose."""
    R = T[:3, :3]
    ortho = float(np.abs(R.T @ R - np.eye(3)).max())
    det = float(abs(np.linalg.det(R) - 1.0))
    return ortho, det


@dataclass
class BodyKinematics:
    """Per-body CoM positions/velocities and angular velocities (6 rows each)."""

    r: np.ndarray       # (6,3) m
    rd: np.ndarray      # (6,3) m/s
    omega: np.ndarray   # (6,3) rad/s


def com_jacobians(m: RobotModel, q: np.ndarray, th0: float | None = None):
    """Linear CoM Jacobians (6,3,6) and world CoM positions (6,3)."""
    packed = _kernels.pack_model(m, th0=th0)
    T = _kernels.fk_chain(packed.dh, packed.base, np.ascontiguousarray(q, dtype=float))
    return _kernels.com_jacobians(T, packed.com)


def com_kinematics(m: RobotModel, s: JointState, th0: float | None = None) -> BodyKinematics:
    """CoM positions, CoM velocities, and body angular velocities at a state."""
    Jv, r = com_jacobians(m, s.q, th0=th0)
    rd = Jv @ s.qd
    omega = OMEGA_MAP @ s.qd
    return BodyKinematics(r=r, rd=rd, omega=omega)


@dataclass
class SweepTable:
    """Column-labelled numeric table (CSV-ready)."""

    columns: list[str]
    data: np.ndarray    # (rows, len(columns))


def joint_sweep(m: RobotModel, joints, angle_range: tuple[float, float],
                steps: int) -> SweepTable:
    """Sweep the listed joints together through ``angle_range`` (radians).

    Joint index 0 is the passive stance-support angle th0; indices 1..6 are
    the actuated joints. All swept joints take the same angle at each step;
    non-swept joints stay at zero. One row per step: the swept angles
    followed by the world origin of each joint frame.
    """
    joints = list(joints)
    if not joints:
        raise ValueError("joint sweep needs at least one joint index")
    for j in joints:
        if not 0 <= j <= 6:
            raise ValueError(f"joint index {j} out of range 0..6")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lo, hi = angle_range
    angles = np.linspace(lo, hi, steps)
    columns = [f"th{j}_rad" for j in joints]
    for k in range(1, 7):
        columns += [f"frame{k}_x_m", f"frame{k}_y_m", f"frame{k}_z_m"]
    data = np.empty((steps, len(columns)))
    for row, ang in enumerate(angles):
        q = np.zeros(6)
        th0 = None
        for j in joints:
            if j == 0:
                th0 = ang
            else:
                q[j - 1] = ang
        T = chain_transforms(m, q, th0=th0)
        data[row, : len(joints)] = ang
        data[row, len(joints):] = T[:, :3, 3].ravel()
    return SweepTable(columns=columns, data=data)
