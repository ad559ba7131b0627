"""Fixed-step simulation scenarios and deterministic CSV trajectory output."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import tomli

from . import _kernels, control, dynamics, kinematics
from .errors import ConfigError, DivergenceError
from .model import JointState, RobotModel

CONFIG_SCHEMA = 1
NUM_JOINTS = 6


@dataclass
class ControllerConfig:
    kp: float | np.ndarray = 320.0
    kd: float | np.ndarray = 48.0
    apply_damping: bool = False
    plant_mass_scale: float = 1.0
    sea_stiffness: float = 0.0   # N*m/rad; 0 disables the series spring


@dataclass
class ReferenceConfig:
    kind: str = "hold"
    params: dict = field(default_factory=dict)


@dataclass
class SweepConfig:
    joints: tuple[int, ...] = (0, 1, 4)
    start: float = 0.0            # rad
    stop: float = math.radians(15.0)
    steps: int = 16


@dataclass
class SimConfig:
    """One scenario run: integration grid, scenario kind, and sub-configs."""

    dt: float = 1e-3
    t_end: float = 5.0
    integrator: str = "rk4"          # rk4 | semi_implicit_euler
    scenario: str = "zero_input"     # zero_input | tracking | sweep
    q0: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    qd0: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    controller: ControllerConfig | None = None
    reference: ReferenceConfig | None = None
    sweep: SweepConfig | None = None
    electrical: bool = False
    seed: int | None = None
    output: str | None = None

    def validate(self) -> None:
        if not (0 < self.dt <= 0.01):
            raise ConfigError(f"dt must be in (0, 0.01] s (got {self.dt})")
        if not self.t_end > self.dt:
            raise ConfigError(f"t_end ({self.t_end}) must exceed dt ({self.dt})")
        if self.integrator not in ("rk4", "semi_implicit_euler"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.scenario not in ("zero_input", "tracking", "sweep"):
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "tracking" and self.reference is None:
            raise ConfigError("tracking scenario needs a [reference] table")

    @property
    def nsteps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass
class Trajectory:
    """Column-labelled result table plus run metadata."""

    columns: list[str]
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


# ---------------------------------------------------------------------------
# integrators

def rk4_step(m: RobotModel, s: JointState, tau_fn, dt: float) -> JointState:
    """One classical Runge-Kutta step of the mechanical state.

    ``tau_fn(t, q, qd)`` supplies the generalized force at each stage.
    """
    t, q, qd = s.t, s.q, s.qd

    def acc(ts, qs, qds):
        return dynamics.forward_dynamics(m, JointState(ts, qs, qds), tau_fn(ts, qs, qds))

    k1v = acc(t, q, qd)
    q2, v2 = q + 0.5 * dt * qd, qd + 0.5 * dt * k1v
    k2v = acc(t + 0.5 * dt, q2, v2)
    q3, v3 = q + 0.5 * dt * v2, qd + 0.5 * dt * k2v
    k3v = acc(t + 0.5 * dt, q3, v3)
    q4, v4 = q + dt * v3, qd + dt * k3v
    k4v = acc(t + dt, q4, v4)
    qn = q + (dt / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4)
    vn = qd + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    if not (np.all(np.isfinite(qn)) and np.all(np.isfinite(vn))):
        raise DivergenceError(t + dt)
    return JointState(t + dt, qn, vn)


def semi_implicit_euler_step(m: RobotModel, s: JointState, tau_fn, dt: float) -> JointState:
    qdd = dynamics.forward_dynamics(m, s, tau_fn(s.t, s.q, s.qd))
    vn = s.qd + dt * qdd
    qn = s.q + dt * vn
    if not (np.all(np.isfinite(qn)) and np.all(np.isfinite(vn))):
        raise DivergenceError(s.t + dt)
    return JointState(s.t + dt, qn, vn)


# ---------------------------------------------------------------------------
# scenarios

def _base_columns(tracking: bool, electrical: bool) -> list[str]:
    cols = ["t_s"]
    cols += [f"q{i}_rad" for i in range(1, 7)]
    cols += [f"qd{i}_rads" for i in range(1, 7)]
    cols += [f"tau{i}_Nm" for i in range(1, 7)]
    cols += ["T_J", "V_J", "E_J"]
    if tracking:
        cols += [f"e{i}_rad" for i in range(1, 7)]
    if electrical:
        cols += [f"ia{i}_A" for i in range(1, 7)]
    return cols


def _run_zero_input(cfg: SimConfig, m: RobotModel) -> Trajectory:
    p = _kernels.pack_model(m)
    beta = m.beta_vector()
    Ra = np.array([mt.Ra for mt in m.motors])
    La = np.array([mt.La for mt in m.motors])
    kphi = np.array([mt.k_phi for mt in m.motors])
    Kr = np.array([mt.Kr for mt in m.motors])
    n = cfg.nsteps
    raw = _kernels.simulate_passive(
        p.masses, p.com, p.inertia, p.rot_qf, p.dh, p.base,
        np.ascontiguousarray(cfg.q0, dtype=float),
        np.ascontiguousarray(cfg.qd0, dtype=float),
        np.zeros(NUM_JOINTS), beta, p.gravity, cfg.dt, n,
        cfg.electrical, Ra, La, kphi, Kr, cfg.integrator == "rk4",
    )
    if raw.shape[0] != n + 1:
        raise DivergenceError(raw.shape[0] * cfg.dt)
    t = np.arange(n + 1) * cfg.dt
    cols = _base_columns(tracking=False, electrical=cfg.electrical)
    data = np.empty((n + 1, len(cols)))
    data[:, 0] = t
    data[:, 1:13] = raw[:, 0:12]
    data[:, 13:19] = raw[:, 12:18]
    data[:, 19] = raw[:, 24]
    data[:, 20] = raw[:, 25]
    data[:, 21] = raw[:, 24] + raw[:, 25]
    if cfg.electrical:
        data[:, 22:28] = raw[:, 18:24]
    return Trajectory(columns=cols, data=data)


def _scaled_plant(m: RobotModel, scale: float) -> RobotModel:
    if scale == 1.0:
        return m
    links = tuple(
        replace(l, mass=l.mass * scale, inertia=l.inertia * scale) for l in m.links
    )
    return replace(m, links=links)


def _run_tracking(cfg: SimConfig, m: RobotModel) -> Trajectory:
    cc = cfg.controller or ControllerConfig()
    rc = cfg.reference
    ref = control.make_reference(rc.kind, rc.params)
    gains = control.Gains(kp=cc.kp, kd=cc.kd)
    plant = _scaled_plant(m, cc.plant_mass_scale)
    beta = m.beta_vector()
    Ra = np.array([mt.Ra for mt in m.motors])
    La = np.array([mt.La for mt in m.motors])
    kphi = np.array([mt.k_phi for mt in m.motors])
    Kr = np.array([mt.Kr for mt in m.motors])

    electrical = cfg.electrical
    n = cfg.nsteps
    cols = _base_columns(tracking=True, electrical=electrical)
    data = np.empty((n + 1, len(cols)))

    def command(t, q, qd):
        r = ref.at(t)
        if cc.sea_stiffness > 0.0:
            return cc.sea_stiffness * (r.q - q)
        return control.computed_torque(m, JointState(t, q, qd), r, gains)

    def applied(t, q, qd, ia):
        tau = command(t, q, qd)
        if electrical:
            tau = Kr * kphi * ia
        if cc.apply_damping:
            return tau - beta * qd
        return tau

    def rhs(t, y):
        q, qd = y[0:6], y[6:12]
        ia = y[12:18] if electrical else None
        Q = applied(t, q, qd, ia)
        qdd = dynamics.forward_dynamics(plant, JointState(t, q, qd), Q)
        dy = np.empty_like(y)
        dy[0:6] = qd
        dy[6:12] = qdd
        if electrical:
            tau_cmd = command(t, q, qd)
            Va = Ra * tau_cmd / (Kr * kphi) + kphi * Kr * qd
            dy[12:18] = (Va - Ra * ia - kphi * Kr * qd) / La
        return dy

    nstate = 18 if electrical else 12
    y = np.zeros(nstate)
    y[0:6] = cfg.q0
    y[6:12] = cfg.qd0
    if electrical:
        # start at steady-state current for the initial command
        tau0 = command(0.0, y[0:6], y[6:12])
        y[12:18] = tau0 / (Kr * kphi)

    use_rk4 = cfg.integrator == "rk4"
    # overflow to inf/nan is how divergence is detected, not an error per se
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(n + 1):
            t = step * cfg.dt
            q, qd = y[0:6], y[6:12]
            ia = y[12:18] if electrical else None
            Q = applied(t, q, qd, ia)
            r = ref.at(t)
            en = dynamics.energies(plant, JointState(t, q, qd))
            row = [t, *q, *qd, *Q, en.T, en.V, en.T + en.V, *(q - r.q)]
            if electrical:
                row += list(ia)
            data[step] = row
            if step == n:
                break
            if use_rk4:
                k1 = rhs(t, y)
                k2 = rhs(t + 0.5 * cfg.dt, y + 0.5 * cfg.dt * k1)
                k3 = rhs(t + 0.5 * cfg.dt, y + 0.5 * cfg.dt * k2)
                k4 = rhs(t + cfg.dt, y + cfg.dt * k3)
                y = y + (cfg.dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            else:
                dy = rhs(t, y)
                y = y.copy()
                y[6:12] += cfg.dt * dy[6:12]
                if electrical:
                    y[12:18] += cfg.dt * dy[12:18]
                y[0:6] += cfg.dt * y[6:12]
            if not np.all(np.isfinite(y)):
                raise DivergenceError(t + cfg.dt)
    return Trajectory(columns=cols, data=data)


def run_scenario(cfg: SimConfig, m: RobotModel) -> Trajectory:
    """Execute one scenario; deterministic for identical (config, model)."""
    cfg.validate()
    if cfg.scenario == "zero_input":
        tr = _run_zero_input(cfg, m)
    elif cfg.scenario == "tracking":
        tr = _run_tracking(cfg, m)
    else:
        sw = cfg.sweep or SweepConfig()
        table = kinematics.joint_sweep(m, sw.joints, (sw.start, sw.stop), sw.steps)
        tr = Trajectory(columns=table.columns, data=table.data)
    tr.meta["scenario"] = cfg.scenario
    if cfg.seed is not None:
        tr.meta["seed"] = cfg.seed
    return tr


# ---------------------------------------------------------------------------
# CSV I/O: 17 significant digits, fixed-width fields, byte-exact re-read

_FIELD_WIDTH = 25


def format_csv(tr: Trajectory) -> str:
    lines = []
    for key in sorted(tr.meta):
        lines.append(f"# {key} = {tr.meta[key]}")
    lines.append(",".join(f"{name:>{_FIELD_WIDTH}}" for name in tr.columns))
    for row in tr.data:
        lines.append(",".join(f"{x:>{_FIELD_WIDTH}.17g}" for x in row))
    return "\n".join(lines) + "\n"


def write_csv(tr: Trajectory, path: str | Path) -> None:
    Path(path).write_text(format_csv(tr), encoding="utf-8", newline="\n")


def read_csv(path: str | Path) -> Trajectory:
    meta: dict = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
            continue
        if columns is None:
            columns = [c.strip() for c in line.split(",")]
            continue
        rows.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValueError(f"{path}: no header row")
    n = len(rows)
    data = np.array(rows, dtype=float) if n else np.empty((0, len(columns)))
    return Trajectory(columns=columns, data=data, meta=meta)


# ---------------------------------------------------------------------------
# configuration files

def _vecN(table: dict, key: str, default=None) -> np.ndarray:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing required field '{key}'")
        return np.asarray(default, dtype=float)
    v = table[key]
    if isinstance(v, (int, float)):
        return np.full(NUM_JOINTS, float(v))
    if not (isinstance(v, list) and len(v) == NUM_JOINTS):
        raise ConfigError(f"'{key}' must be a scalar or a {NUM_JOINTS}-element array")
    return np.asarray(v, dtype=float)


def config_from_dict(doc: dict) -> SimConfig:
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported config schema {doc.get('schema')!r} "
                          f"(expected {CONFIG_SCHEMA})")
    scenario = doc.get("scenario", "zero_input")
    sim = doc.get("sim", {})
    init = doc.get("initial", {})
    cfg = SimConfig(
        dt=float(sim.get("dt_s", 1e-3)),
        t_end=float(sim.get("t_end_s", 5.0)),
        integrator=str(sim.get("integrator", "rk4")),
        scenario=str(scenario),
        q0=_vecN(init, "q_rad", default=np.zeros(NUM_JOINTS)),
        qd0=_vecN(init, "qd_rads", default=np.zeros(NUM_JOINTS)),
        electrical=bool(sim.get("electrical", False)),
        output=doc.get("output", {}).get("path"),
    )
    if "controller" in doc:
        c = doc["controller"]
        if "poles" in c:
            p1, p2 = (float(x) for x in c["poles"])
            g = control.gains_from_poles(p1, p2)
            kp, kd = g.kp, g.kd
        else:
            kp = _vecN(c, "kp", default=320.0) if isinstance(c.get("kp"), list) else float(c.get("kp", 320.0))
            kd = _vecN(c, "kd", default=48.0) if isinstance(c.get("kd"), list) else float(c.get("kd", 48.0))
        cfg.controller = ControllerConfig(
            kp=kp, kd=kd,
            apply_damping=bool(c.get("apply_damping", False)),
            plant_mass_scale=float(c.get("plant_mass_scale", 1.0)),
            sea_stiffness=float(c.get("sea_stiffness_Nm", 0.0)),
        )
    if "reference" in doc:
        r = dict(doc["reference"])
        kind = r.pop("kind", "hold")
        params: dict = {}
        if kind == "hold":
            params["q"] = _vecN(r, "q_rad")
        elif kind == "sinusoid":
            params["amplitude"] = _vecN(r, "amplitude_rad")
            params["frequency"] = _vecN(r, "frequency_rads")
            params["phase"] = _vecN(r, "phase_rad", default=np.zeros(NUM_JOINTS))
            params["offset"] = _vecN(r, "offset_rad", default=np.zeros(NUM_JOINTS))
        elif kind == "spline":
            if "knots_s" not in r or "knots_q_rad" not in r:
                raise ConfigError("spline reference needs 'knots_s' and 'knots_q_rad'")
            params["knots_t"] = np.asarray(r["knots_s"], dtype=float)
            params["knots_q"] = np.asarray(r["knots_q_rad"], dtype=float)
        else:
            raise ConfigError(f"unknown reference kind {kind!r}")
        cfg.reference = ReferenceConfig(kind=kind, params=params)
    if "sweep" in doc:
        s = doc["sweep"]
        cfg.sweep = SweepConfig(
            joints=tuple(int(j) for j in s.get("joints", (0, 1, 4))),
            start=math.radians(float(s.get("from_deg", 0.0))),
            stop=math.radians(float(s.get("to_deg", 15.0))),
            steps=int(s.get("steps", 16)),
        )
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"{path}: parse error: {e}") from e
    try:
        return config_from_dict(doc)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from None
