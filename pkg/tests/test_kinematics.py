"""Forward kinematics: link transforms, chain products, CoM velocities."""
import math

import numpy as np
import pytest

from bluebiped.kinematics import (chain_transforms, com_kinematics, dh_transform,
                                  joint_sweep, pose_errors)
from bluebiped.model import DHRow, JointState

from conftest import random_model


def reference_dh(a, alpha, d, theta):
    """Element-by-element evaluation of the link transform (test oracle)."""
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [ct, -st, 0.0, a],
        [st * ca, ct * ca, -sa, -sa * d],
        [st * sa, ct * sa, ca, ca * d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def test_dh_identity():
    T = dh_transform(DHRow(0.0, 0.0, 0.0, 0.0), 0.0)
    assert np.array_equal(T, np.eye(4))


def test_dh_pure_z_rotation():
    T = dh_transform(DHRow(0.0, 0.0, 0.0, 0.0), math.pi / 2)
    expected = np.array([[0.0, -1.0, 0.0, 0.0],
                         [1.0, 0.0, 0.0, 0.0],
                         [0.0, 0.0, 1.0, 0.0],
                         [0.0, 0.0, 0.0, 1.0]])
    assert np.abs(T - expected).max() < 1e-15


def test_dh_derived_case():
    a, alpha, d, theta = 0.1, -math.pi / 2, 0.05, math.radians(15.0)
    T = dh_transform(DHRow(a, alpha, d, 0.0), theta)
    assert np.abs(T - reference_dh(a, alpha, d, theta)).max() < 1e-15
    # spot values as commonly printed (4 decimals)
    assert T[0, 0] == pytest.approx(0.9659, abs=5e-5)
    assert T[0, 1] == pytest.approx(-0.2588, abs=5e-5)
    assert T[1, 2] == pytest.approx(1.0, abs=1e-12)
    assert T[1, 3] == pytest.approx(0.05, abs=1e-12)
    assert T[2, 0] == pytest.approx(-0.2588, abs=5e-5)


def test_dh_theta_offset_added():
    row = DHRow(0.0, 0.0, 0.0, 0.3)
    assert np.allclose(dh_transform(row, 0.2),
                       dh_transform(DHRow(0.0, 0.0, 0.0, 0.0), 0.5), atol=1e-15)


def brute_force_chain(m, q, th0=None):
    T = np.array(m.base_frame)
    if m.base_row is not None or th0 is not None:
        row = m.base_row or DHRow(0.0, 0.0, 0.0, 0.0)
        ang = row.theta_offset if th0 is None else th0
        T = T @ reference_dh(row.a_prev, row.alpha_prev, row.d, ang)
    out = []
    for row, qi in zip(m.dh_table, q):
        T = T @ reference_dh(row.a_prev, row.alpha_prev, row.d, qi + row.theta_offset)
        out.append(T.copy())
    return np.array(out)


def test_chain_matches_brute_force(rng):
    for _ in range(50):
        m = random_model(rng)
        q = rng.uniform(-np.pi, np.pi, 6)
        T = chain_transforms(m, q)
        T_ref = brute_force_chain(m, q)
        assert np.abs(T - T_ref).max() < 1e-12


def test_chain_with_th0_override(rng):
    m = random_model(rng)
    q = rng.uniform(-1, 1, 6)
    T = chain_transforms(m, q, th0=0.4)
    assert np.abs(T - brute_force_chain(m, q, th0=0.4)).max() < 1e-12


def test_chain_recurrence(blue_model, rng):
    q = rng.uniform(-1, 1, 6)
    T = chain_transforms(blue_model, q)
    A6 = dh_transform(blue_model.dh_table[5], q[5])
    assert np.abs(T[5] - T[4] @ A6).max() < 1e-14


def test_chain_at_zero_is_offset_product(blue_model):
    T = chain_transforms(blue_model, np.zeros(6))
    assert np.abs(T - brute_force_chain(blue_model, np.zeros(6))).max() < 1e-13


def test_poses_orthonormal(rng):
    for _ in range(50):
        m = random_model(rng)
        q = rng.uniform(-np.pi, np.pi, 6)
        for T in chain_transforms(m, q):
            ortho, det = pose_errors(T)
            assert ortho < 1e-10 and det < 1e-10
            assert np.array_equal(T[3], [0.0, 0.0, 0.0, 1.0])


def test_com_velocity_finite_difference(rng):
    h = 1e-6
    for _ in range(20):
        m = random_model(rng)
        q = rng.uniform(-np.pi, np.pi, 6)
        qd = rng.uniform(-2, 2, 6)
        bk = com_kinematics(m, JointState(0.0, q, qd))
        rp = com_kinematics(m, JointState(0.0, q + qd * h, qd)).r
        rm = com_kinematics(m, JointState(0.0, q - qd * h, qd)).r
        rd_fd = (rp - rm) / (2.0 * h)
        assert np.abs(bk.rd - rd_fd).max() < 1e-6


def test_omega_composition_single_joint(blue_model):
    qd = np.zeros(6)
    qd[0] = 1.0
    bk = com_kinematics(blue_model, JointState(0.0, np.zeros(6), qd))
    for i in range(6):
        assert np.array_equal(bk.omega[i], [1.0, 0.0, 0.0])


def test_omega_composition_general(blue_model):
    qd = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    bk = com_kinematics(blue_model, JointState(0.0, np.zeros(6), qd))
    assert np.array_equal(bk.omega[0], [1.0, 0.0, 0.0])
    assert np.array_equal(bk.omega[1], [3.0, 0.0, 0.0])
    assert np.array_equal(bk.omega[2], [3.0, 3.0, 0.0])
    assert np.array_equal(bk.omega[3], [3.0, 7.0, 0.0])
    assert np.array_equal(bk.omega[4], [8.0, 7.0, 0.0])
    assert np.array_equal(bk.omega[5], [14.0, 7.0, 0.0])


def test_rest_state_has_zero_rates(blue_model, rng):
    q = rng.uniform(-1, 1, 6)
    bk = com_kinematics(blue_model, JointState(0.0, q, np.zeros(6)))
    assert np.array_equal(bk.rd, np.zeros((6, 3)))
    assert np.array_equal(bk.omega, np.zeros((6, 3)))


def test_velocity_linearity(rng):
    m = random_model(rng)
    q = rng.uniform(-1, 1, 6)
    qd = rng.uniform(-2, 2, 6)
    rd1 = com_kinematics(m, JointState(0.0, q, qd)).rd
    rd3 = com_kinematics(m, JointState(0.0, q, 3.0 * qd)).rd
    assert np.abs(rd3 - 3.0 * rd1).max() < 1e-12


def test_distal_perturbation_leaves_proximal_bitwise(blue_model, rng):
    q = rng.uniform(-1, 1, 6)
    T = chain_transforms(blue_model, q)
    for k in range(1, 6):
        q2 = q.copy()
        q2[k] += 0.37
        T2 = chain_transforms(blue_model, q2)
        assert np.array_equal(T[:k], T2[:k])


def test_sweep_constant_range(blue_model):
    t = joint_sweep(blue_model, [1], (0.0, 0.0), 2)
    assert t.data.shape[0] == 2
    assert np.array_equal(t.data[0], t.data[1])


def test_sweep_monotone_16_steps(blue_model):
    t = joint_sweep(blue_model, [0, 1, 4], (0.0, math.radians(15.0)), 16)
    assert t.data.shape[0] == 16
    ang = t.data[:, 0]
    assert np.all(np.diff(ang) > 0)
    assert ang[0] == 0.0
    assert ang[-1] == pytest.approx(math.radians(15.0))
    # swept columns carry the same angle
    assert np.array_equal(t.data[:, 0], t.data[:, 1])
    assert np.array_equal(t.data[:, 0], t.data[:, 2])


def test_sweep_rows_match_fresh_fk(blue_model):
    t = joint_sweep(blue_model, [0, 1, 4], (0.0, math.radians(15.0)), 5)
    for row in t.data:
        ang = row[0]
        q = np.zeros(6)
        q[0] = ang   # joint 1
        q[3] = ang   # joint 4
        T = chain_transforms(blue_model, q, th0=ang)
        assert np.abs(row[3:] - T[:, :3, 3].ravel()).max() < 1e-15


def test_sweep_errors(blue_model):
    with pytest.raises(ValueError, match="at least one joint"):
        joint_sweep(blue_model, [], (0.0, 1.0), 4)
    with pytest.raises(ValueError, match="steps"):
        joint_sweep(blue_model, [1], (0.0, 1.0), 1)
    with pytest.raises(ValueError, match="out of range"):
        joint_sweep(blue_model, [7], (0.0, 1.0), 4)


def test_sweep_column_labels(blue_model):
    t = joint_sweep(blue_model, [0, 2], (0.0, 0.1), 3)
    assert t.columns[:2] == ["th0_rad", "th2_rad"]
    assert t.columns[2] == "frame1_x_m"
    assert len(t.columns) == 2 + 18
