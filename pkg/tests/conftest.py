"""Shared fixtures: synthetic robot models and kernel warm-up."""
import numpy as np
import pytest

from bluebiped import _kernels
from bluebiped.model import DHRow, LinkParams, MotorParams, RobotModel

# Base rotation mapping the chain x-axis to world -z: a chain pointing
# along +x hangs straight down, so q = 0 is the stable equilibrium.
HANGING_BASE = np.eye(4)
HANGING_BASE[:3, :3] = np.array([[0.0, 1.0, 0.0],
                                 [0.0, 0.0, -1.0],
                                 [-1.0, 0.0, 0.0]])


def random_rotation(rng) -> np.ndarray:
    A = rng.standard_normal((3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q @ np.diag(np.sign(np.diag(R)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_inertia(rng, mass: float) -> np.ndarray:
    # box inertia satisfies the principal-moment triangle inequalities
    a, b, c = rng.uniform(0.05, 0.4, 3)
    principal = mass / 12.0 * np.array([b * b + c * c, a * a + c * c, a * a + b * b])
    R = random_rotation(rng)
    I = R @ np.diag(principal) @ R.T
    return 0.5 * (I + I.T)


def default_motor(beta: float = 0.05) -> MotorParams:
    return MotorParams(Ra=2.0, La=0.0023, k_phi=0.01, Kr=150.0, beta=beta,
                       rated_power=8.0)


def random_model(rng, with_base_row: bool = True) -> RobotModel:
    links = []
    for _ in range(6):
        mass = rng.uniform(0.3, 3.0)
        links.append(LinkParams(
            mass=mass,
            com_offset=rng.uniform(-0.15, 0.15, 3),
            inertia=random_inertia(rng, mass),
        ))
    dh = [DHRow(a_prev=rng.uniform(0.05, 0.4),
                alpha_prev=rng.uniform(-np.pi * 0.999, np.pi),
                d=rng.uniform(-0.1, 0.1),
                theta_offset=rng.uniform(-np.pi * 0.999, np.pi))
          for _ in range(6)]
    motors = [MotorParams(Ra=rng.uniform(0.5, 5.0), La=rng.uniform(1e-3, 1e-2),
                          k_phi=rng.uniform(0.005, 0.05), Kr=rng.uniform(10, 200),
                          beta=rng.uniform(0.0, 0.2), rated_power=rng.uniform(5, 20))
              for _ in range(6)]
    base = np.eye(4)
    base[:3, :3] = random_rotation(rng)
    base[:3, 3] = rng.uniform(-0.2, 0.2, 3)
    base_row = None
    if with_base_row:
        base_row = DHRow(a_prev=rng.uniform(0.0, 0.3),
                         alpha_prev=rng.uniform(-np.pi * 0.999, np.pi),
                         d=rng.uniform(-0.05, 0.05),
                         theta_offset=rng.uniform(-np.pi * 0.999, np.pi))
    return RobotModel(links=tuple(links), dh_table=tuple(dh), motors=tuple(motors),
                      gravity=9.81, base_frame=base, base_row=base_row,
                      name="synthetic")


def hanging_micro_model(rng=None) -> RobotModel:
    """Millimeter-scale planar chain whose hanging equilibrium is q = 0.

    Natural frequencies ~ sqrt(g/l) ~ 100 rad/s with bounded small-amplitude
    motion: on this model RK4 truncation error dominates the Coriolis
    finite-difference noise floor, making integrator-order measurements
    meaningful at dt = 1e-4.
    """
    rng = rng or np.random.default_rng(2024)
    links = []
    for _ in range(6):
        mass = rng.uniform(0.3, 1.0)
        lc = rng.uniform(0.0006, 0.0012)
        I = np.diag([0.2, 1.0, 1.0]) * mass * lc * lc
        links.append(LinkParams(mass=mass, com_offset=np.array([lc, 0.0, 0.0]),
                                inertia=I))
    dh = [DHRow(a_prev=rng.uniform(0.0012, 0.002), alpha_prev=0.0, d=0.0,
                theta_offset=0.0) for _ in range(6)]
    motors = tuple(default_motor(beta=0.0) for _ in range(6))
    return RobotModel(links=tuple(links), dh_table=tuple(dh), motors=motors,
                      gravity=9.81, base_frame=HANGING_BASE.copy(),
                      base_row=None, name="hanging-micro")


def pendulum_model(mass=1.4, lc=0.21, ixx=0.02, distal_eps=0.0) -> RobotModel:
    """Single swinging link about a horizontal axis; bodies B..F degenerate.

    ``distal_eps`` > 0 gives the distal chain tiny masses/inertias so the
    mass matrix stays factorizable while the dynamics remain the analytic
    pendulum to within eps-level coupling.
    """
    links = [LinkParams(mass=mass, com_offset=np.array([lc, 0.0, 0.0]),
                        inertia=np.diag([ixx, ixx, ixx]))]
    for _ in range(5):
        links.append(LinkParams(mass=distal_eps,
                                com_offset=np.zeros(3),
                                inertia=np.eye(3) * distal_eps))
    dh = [DHRow(a_prev=0.0, alpha_prev=0.0, d=0.0, theta_offset=0.0)
          for _ in range(6)]
    motors = tuple(default_motor(beta=0.0) for _ in range(6))
    return RobotModel(links=tuple(links), dh_table=tuple(dh), motors=motors,
                      gravity=9.81, base_frame=HANGING_BASE.copy(),
                      base_row=None, name="pendulum")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    _kernels.warm_up()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def blue_model():
    from bluebiped.model import default_model

    return default_model()
