"""Energies, Lagrangian, and the manipulator-form equations of motion.

The mass matrix is assembled analytically from the CoM Jacobians and the
constant body-rotation quadratic form; the Coriolis matrix comes from
Christoffel symbols of D with central-difference partials; gravity is the
analytic gradient of the potential. Forward dynamics solves the symmetric
positive-definite system by Cholesky factorization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateModelError
from .model import JointState, RobotModel


@dataclass
class DynamicsMatrices:
    D: np.ndarray   # (6,6) kg*m^2
    C: np.ndarray   # (6,6) kg*m^2/s
    G: np.ndarray   # (6,)  N*m


@dataclass
class EnergyReport:
    T: float   # J, total kinetic
    V: float   # J, total potential
    L: float   # J, Lagrangian T - V


def _arr(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=float)


def energies(m: RobotModel, s: JointState) -> EnergyReport:
    """Total kinetic and potential energy and the Lagrangian at a state."""
    p = _kernels.pack_model(m)
    q, qd = _arr(s.q), _arr(s.qd)
    T = float(_kernels.kinetic_energy(p.masses, p.com, p.inertia, p.dh, p.base, q, qd))
    V = float(_kernels.potential_energy(p.masses, p.com, p.dh, p.base, q, p.gravity))
    return EnergyReport(T=T, V=V, L=T - V)


def mass_matrix(m: RobotModel, q: np.ndarray) -> np.ndarray:
    p = _kernels.pack_model(m)
    return _kernels.mass_matrix(p.masses, p.com, p.rot_qf, p.dh, p.base, _arr(q))


def coriolis_matrix(m: RobotModel, q: np.ndarray, qd: np.ndarray) -> np.ndarray:
    p = _kernels.pack_model(m)
    return _kernels.coriolis_matrix(p.masses, p.com, p.rot_qf, p.dh, p.base,
                                    _arr(q), _arr(qd))


def gravity_vector(m: RobotModel, q: np.ndarray) -> np.ndarray:
    p = _kernels.pack_model(m)
    return _kernels.gravity_vector(p.masses, p.com, p.dh, p.base, _arr(q), p.gravity)


def matrices(m: RobotModel, q: np.ndarray, qd: np.ndarray) -> DynamicsMatrices:
    """D, C, G evaluated in one pass (single model packing)."""
    p = _kernels.pack_model(m)
    q, qd = _arr(q), _arr(qd)
    return DynamicsMatrices(
        D=_kernels.mass_matrix(p.masses, p.com, p.rot_qf, p.dh, p.base, q),
        C=_kernels.coriolis_matrix(p.masses, p.com, p.rot_qf, p.dh, p.base, q, qd),
        G=_kernels.gravity_vector(p.masses, p.com, p.dh, p.base, q, p.gravity),
    )


def inverse_dynamics(m: RobotModel, q: np.ndarray, qd: np.ndarray,
                     qdd: np.ndarray) -> np.ndarray:
    """Generalized forces tau = D qdd + C qd + G."""
    mats = matrices(m, q, qd)
    return mats.D @ _arr(qdd) + mats.C @ _arr(qd) + mats.G


def forward_dynamics(m: RobotModel, s: JointState, tau: np.ndarray) -> np.ndarray:
    """Joint accelerations from applied generalized forces.

    Raises DegenerateModelError when the mass matrix is not positive
    definite (e.g. a zero-mass distal chain).
    """
    p = _kernels.pack_model(m)
    try:
        return _kernels.forward_dynamics(p.masses, p.com, p.inertia, p.rot_qf,
                                         p.dh, p.base, _arr(s.q), _arr(s.qd),
                                         _arr(tau), p.gravity)
    except np.linalg.LinAlgError as e:
        raise DegenerateModelError(f"mass matrix factorization failed: {e}") from e
