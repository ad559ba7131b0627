"""Compiled numeric core for kinematics and dynamics.

Everything here operates on packed float64 arrays so the hot paths (random
property sweeps, fixed-step integration) run at compiled speed. The public
modules wrap these kernels behind the documented interfaces.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

# Body angular-velocity composition: omega_i = OMEGA_MAP[i] @ qd.
# Axis-aligned sums for bodies A..F; constant by construction.
OMEGA_MAP = np.zeros((6, 3, 6))
OMEGA_MAP[0, 0, 0] = 1.0                                    # A: [th1d, 0, 0]
OMEGA_MAP[1, 0, :2] = 1.0                                   # B: [th1d+th2d, 0, 0]
OMEGA_MAP[2, 0, :2] = 1.0
OMEGA_MAP[2, 1, 2] = 1.0                                    # C: [th1d+th2d, th3d, 0]
OMEGA_MAP[3, 0, :2] = 1.0
OMEGA_MAP[3, 1, 2:4] = 1.0                                  # D: [th1d+th2d, th3d+th4d, 0]
OMEGA_MAP[4, 0, :2] = 1.0
OMEGA_MAP[4, 0, 4] = 1.0
OMEGA_MAP[4, 1, 2:4] = 1.0                                  # E: [th1d+th2d+th5d, th3d+th4d, 0]
OMEGA_MAP[5, 0, :2] = 1.0
OMEGA_MAP[5, 0, 4:6] = 1.0
OMEGA_MAP[5, 1, 2:4] = 1.0                                  # F: [th1d+th2d+th5d+th6d, th3d+th4d, 0]
OMEGA_MAP.setflags(write=False)


class PackedModel(NamedTuple):
    masses: np.ndarray    # (6,)
    com: np.ndarray       # (6,3)
    inertia: np.ndarray   # (6,3,3), symmetrized
    rot_qf: np.ndarray    # (6,6)  sum_i OMEGA_MAP[i]^T I_i OMEGA_MAP[i]
    dh: np.ndarray        # (6,4)  [a_prev, alpha_prev, d, theta_offset]
    base: np.ndarray      # (4,4)  base_frame composed with the passive row
    gravity: float


def pack_model(model, th0: float | None = None) -> PackedModel:
    """Flatten a RobotModel into contiguous arrays for the kernels."""
    masses = np.array([l.mass for l in model.links], dtype=float)
    com = np.ascontiguousarray([l.com_offset for l in model.links], dtype=float)
    inertia = np.empty((6, 3, 3))
    for i, l in enumerate(model.links):
        inertia[i] = 0.5 * (l.inertia + l.inertia.T)
    rot_qf = np.zeros((6, 6))
    for i in range(6):
        rot_qf += OMEGA_MAP[i].T @ inertia[i] @ OMEGA_MAP[i]
    rot_qf = 0.5 * (rot_qf + rot_qf.T)
    dh = np.array(
        [[r.a_prev, r.alpha_prev, r.d, r.theta_offset] for r in model.dh_table],
        dtype=float,
    )
    base = np.array(model.base_frame, dtype=float)
    row = model.base_row
    if th0 is not None or row is not None:
        if row is None:
            a = alpha = d = 0.0
            theta = float(th0)
        else:
            a, alpha, d = row.a_prev, row.alpha_prev, row.d
            theta = row.theta_offset if th0 is None else float(th0)
        A = np.empty((4, 4))
        _dh_fill(A, a, alpha, d, theta)
        base = base @ A
    return PackedModel(masses, com, inertia, rot_qf, dh,
                       np.ascontiguousarray(base), float(model.gravity))


@njit(cache=True)
def _dh_fill(out, a, alpha, d, theta):
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    out[0, 0] = ct
    out[0, 1] = -st
    out[0, 2] = 0.0
    out[0, 3] = a
    out[1, 0] = st * ca
    out[1, 1] = ct * ca
    out[1, 2] = -sa
    out[1, 3] = -sa * d
    out[2, 0] = st * sa
    out[2, 1] = ct * sa
    out[2, 2] = ca
    out[2, 3] = ca * d
    out[3, 0] = 0.0
    out[3, 1] = 0.0
    out[3, 2] = 0.0
    out[3, 3] = 1.0


@njit(cache=True)
def fk_chain(dh, base, q):
    """Cumulative world transforms of the six joint frames, (6,4,4)."""
    T = np.empty((6, 4, 4))
    A = np.empty((4, 4))
    prev = base
    for i in range(6):
        _dh_fill(A, dh[i, 0], dh[i, 1], dh[i, 2], q[i] + dh[i, 3])
        T[i] = prev @ A
        prev = T[i]
    return T


@njit(cache=True)
def com_positions(T, com):
    r = np.empty((6, 3))
    for i in range(6):
        for m in range(3):
            r[i, m] = (T[i, m, 0] * com[i, 0] + T[i, m, 1] * com[i, 1]
                       + T[i, m, 2] * com[i, 2] + T[i, m, 3])
    return r


@njit(cache=True)
def com_jacobians(T, com):
    """Linear CoM Jacobians Jv (6,3,6) and world CoM positions (6,3).

    Revolute axes: column k of body i's Jacobian is z_k x (r_i - p_k) for
    k <= i, zero beyond the body's own joint.
    """
    r = com_positions(T, com)
    Jv = np.zeros((6, 3, 6))
    for i in range(6):
        for k in range(i + 1):
            zx, zy, zz = T[k, 0, 2], T[k, 1, 2], T[k, 2, 2]
            dx = r[i, 0] - T[k, 0, 3]
            dy = r[i, 1] - T[k, 1, 3]
            dz = r[i, 2] - T[k, 2, 3]
            Jv[i, 0, k] = zy * dz - zz * dy
            Jv[i, 1, k] = zz * dx - zx * dz
            Jv[i, 2, k] = zx * dy - zy * dx
    return Jv, r


@njit(cache=True)
def mass_matrix(masses, com, rot_qf, dh, base, q):
    """D(q) = sum_i m_i Jv_i^T Jv_i + (constant rotational quadratic form)."""
    T = fk_chain(dh, base, q)
    Jv, _ = com_jacobians(T, com)
    D = rot_qf.copy()
    for i in range(6):
        m_i = masses[i]
        for a in range(6):
            for b in range(a, 6):
                s = (Jv[i, 0, a] * Jv[i, 0, b] + Jv[i, 1, a] * Jv[i, 1, b]
                     + Jv[i, 2, a] * Jv[i, 2, b])
                D[a, b] += m_i * s
                if b != a:
                    D[b, a] += m_i * s
    return D


@njit(cache=True)
def mass_matrix_partials(masses, com, rot_qf, dh, base, q):
    """dD/dq_k by central differences, step 1e-6*max(1,|q_k|); (6,6,6)."""
    dD = np.empty((6, 6, 6))
    qp = q.copy()
    for k in range(6):
        h = 1e-6 * max(1.0, abs(q[k]))
        qp[k] = q[k] + h
        Dp = mass_matrix(masses, com, rot_qf, dh, base, qp)
        qp[k] = q[k] - h
        Dm = mass_matrix(masses, com, rot_qf, dh, base, qp)
        qp[k] = q[k]
        dD[k] = (Dp - Dm) / (2.0 * h)
    return dD


@njit(cache=True)
def coriolis_matrix(masses, com, rot_qf, dh, base, q, qd):
    """Christoffel-symbol Coriolis matrix from the mass-matrix partials."""
    dD = mass_matrix_partials(masses, com, rot_qf, dh, base, q)
    C = np.empty((6, 6))
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(6):
                s += (dD[k, i, j] + dD[j, i, k] - dD[i, j, k]) * qd[k]
            C[i, j] = 0.5 * s
    return C


@njit(cache=True)
def gravity_vector(masses, com, dh, base, q, g):
    """G = dV/dq via the z-rows of the CoM Jacobians."""
    T = fk_chain(dh, base, q)
    Jv, _ = com_jacobians(T, com)
    G = np.zeros(6)
    for i in range(6):
        w = masses[i] * g
        for k in range(6):
            G[k] += w * Jv[i, 2, k]
    return G


@njit(cache=True)
def body_omegas(qd):
    """Body angular velocities per the fixed axis-aligned composition, (6,3)."""
    w = np.zeros((6, 3))
    s12 = qd[0] + qd[1]
    s34 = qd[2] + qd[3]
    w[0, 0] = qd[0]
    w[1, 0] = s12
    w[2, 0] = s12
    w[2, 1] = qd[2]
    w[3, 0] = s12
    w[3, 1] = s34
    w[4, 0] = s12 + qd[4]
    w[4, 1] = s34
    w[5, 0] = s12 + qd[4] + qd[5]
    w[5, 1] = s34
    return w


@njit(cache=True)
def kinetic_energy(masses, com, inertia, dh, base, q, qd):
    T = fk_chain(dh, base, q)
    Jv, _ = com_jacobians(T, com)
    w = body_omegas(qd)
    E = 0.0
    for i in range(6):
        vx = vy = vz = 0.0
        for k in range(6):
            vx += Jv[i, 0, k] * qd[k]
            vy += Jv[i, 1, k] * qd[k]
            vz += Jv[i, 2, k] * qd[k]
        E += 0.5 * masses[i] * (vx * vx + vy * vy + vz * vz)
        rot = 0.0
        for a in range(3):
            for b in range(3):
                rot += w[i, a] * inertia[i, a, b] * w[i, b]
        E += 0.5 * rot
    return E


@njit(cache=True)
def potential_energy(masses, com, dh, base, q, g):
    T = fk_chain(dh, base, q)
    r = com_positions(T, com)
    V = 0.0
    for i in range(6):
        V += masses[i] * g * r[i, 2]
    return V


@njit(cache=True)
def forward_dynamics(masses, com, inertia, rot_qf, dh, base, q, qd, Q, g):
    """Solve D qdd = Q - C qd - G by Cholesky factorization.

    Non-finite states (a diverging integration) yield a NaN acceleration
    instead of tripping the linear algebra, so callers can detect and
    report the divergence time.
    """
    for j in range(6):
        if not (np.isfinite(q[j]) and np.isfinite(qd[j]) and np.isfinite(Q[j])):
            return np.full(6, np.nan)
    D = mass_matrix(masses, com, rot_qf, dh, base, q)
    C = coriolis_matrix(masses, com, rot_qf, dh, base, q, qd)
    G = gravity_vector(masses, com, dh, base, q, g)
    rhs = Q - C @ qd - G
    for j in range(6):
        if not np.isfinite(rhs[j]):
            return np.full(6, np.nan)
    L = np.linalg.cholesky(D)
    y = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, y)


@njit(cache=True)
def _passive_rhs(masses, com, inertia, rot_qf, dh, base, q, qd, ia, beta,
                 g, electrical, Ra, La, kphi, Kr):
    """State derivative for the unactuated plant (optional electrical states)."""
    Q = -beta * qd
    dia = np.zeros(6)
    if electrical:
        for j in range(6):
            Q[j] += Kr[j] * kphi[j] * ia[j]
            dia[j] = (-Ra[j] * ia[j] - kphi[j] * Kr[j] * qd[j]) / La[j]
    qdd = forward_dynamics(masses, com, inertia, rot_qf, dh, base, q, qd, Q, g)
    return qdd, dia, Q


@njit(cache=True)
def simulate_passive(masses, com, inertia, rot_qf, dh, base, q0, qd0, ia0,
                     beta, g, dt, nsteps, electrical, Ra, La, kphi, Kr,
                     use_rk4):
    """Fixed-step integration of the zero-input plant.

    Output rows are [q(6), qd(6), Q(6), ia(6), T, V] (26 columns). On
    divergence the array is truncated after the first non-finite state; the
    caller detects this by the row count.
    """
    out = np.empty((nsteps + 1, 26))
    q = q0.copy()
    qd = qd0.copy()
    ia = ia0.copy()
    for n in range(nsteps + 1):
        k1v, k1i, Q = _passive_rhs(masses, com, inertia, rot_qf, dh, base,
                                   q, qd, ia, beta, g, electrical, Ra, La, kphi, Kr)
        out[n, 0:6] = q
        out[n, 6:12] = qd
        out[n, 12:18] = Q
        out[n, 18:24] = ia
        out[n, 24] = kinetic_energy(masses, com, inertia, dh, base, q, qd)
        out[n, 25] = potential_energy(masses, com, dh, base, q, g)
        if n == nsteps:
            break
        if use_rk4:
            q2 = q + 0.5 * dt * qd
            v2 = qd + 0.5 * dt * k1v
            i2 = ia + 0.5 * dt * k1i
            k2v, k2i, _ = _passive_rhs(masses, com, inertia, rot_qf, dh, base,
                                       q2, v2, i2, beta, g, electrical, Ra, La, kphi, Kr)
            q3 = q + 0.5 * dt * v2
            v3 = qd + 0.5 * dt * k2v
            i3 = ia + 0.5 * dt * k2i
            k3v, k3i, _ = _passive_rhs(masses, com, inertia, rot_qf, dh, base,
                                       q3, v3, i3, beta, g, electrical, Ra, La, kphi, Kr)
            q4 = q + dt * v3
            v4 = qd + dt * k3v
            i4 = ia + dt * k3i
            k4v, k4i, _ = _passive_rhs(masses, com, inertia, rot_qf, dh, base,
                                       q4, v4, i4, beta, g, electrical, Ra, La, kphi, Kr)
            qn = q + (dt / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4)
            vn = qd + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            inx = ia + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            q, qd, ia = qn, vn, inx
        else:
            # semi-implicit Euler: velocity first, then position
            qd = qd + dt * k1v
            ia = ia + dt * k1i
            q = q + dt * qd
        ok = True
        for j in range(6):
            if not (np.isfinite(q[j]) and np.isfinite(qd[j])):
                ok = False
        if not ok:
            return out[: n + 1]
    return out


def warm_up() -> None:
    """Trigger JIT compilation of every kernel (cached across processes)."""
    dh = np.zeros((6, 4))
    dh[:, 0] = 0.1
    base = np.eye(4)
    masses = np.ones(6)
    com = np.full((6, 3), 0.05)
    inertia = np.ascontiguousarray(np.broadcast_to(np.eye(3) * 1e-3, (6, 3, 3)))
    rot_qf = np.eye(6) * 1e-3
    q = np.zeros(6)
    qd = np.ones(6)
    z = np.zeros(6)
    mass_matrix(masses, com, rot_qf, dh, base, q)
    coriolis_matrix(masses, com, rot_qf, dh, base, q, qd)
    gravity_vector(masses, com, dh, base, q, 9.81)
    kinetic_energy(masses, com, inertia, dh, base, q, qd)
    potential_energy(masses, com, dh, base, q, 9.81)
    forward_dynamics(masses, com, inertia, rot_qf, dh, base, q, qd, z, 9.81)
    simulate_passive(masses, com, inertia, rot_qf, dh, base, q, qd, z,
                     z, 9.81, 1e-3, 2, False, np.ones(6), np.ones(6),
                     np.ones(6), np.ones(6), True)
    simulate_passive(masses, com, inertia, rot_qf, dh, base, q, qd, z,
                     z, 9.81, 1e-3, 2, True, np.ones(6), np.ones(6),
                     np.ones(6), np.ones(6), False)
