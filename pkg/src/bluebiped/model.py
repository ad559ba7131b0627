"""Robot parameter model: loading, validation, and canonical serialization.

The robot description lives in a TOML document (schema = 1) with units in
the field names. Every parameter consumed by kinematics, dynamics,
actuation, and control comes from here; the model is immutable after load
and safe to share between concurrent scenario runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import tomli

from .errors import ModelError

SCHEMA_VERSION = 1
LINK_NAMES = ("A", "B", "C", "D", "E", "F")
NUM_JOINTS = 6

# Tolerances for the tensor invariants; file values are decimal literals,
# so anything beyond roundoff is a genuine violation.
_SYM_TOL = 1e-9
_PSD_TOL = 1e-9


@dataclass(frozen=True)
class LinkParams:
    """Mass, CoM offset, and inertia tensor of one rigid body (link frame)."""

    mass: float                 # kg
    com_offset: np.ndarray      # (3,) m, in the link's DH frame
    inertia: np.ndarray         # (3,3) kg*m^2, about the CoM, link frame

    def __post_init__(self):
        object.__setattr__(self, "com_offset", np.asarray(self.com_offset, dtype=float))
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float))


@dataclass(frozen=True)
class DHRow:
    """One Denavit-Hartenberg row: a_{i-1}, alpha_{i-1}, d_i, constant theta offset."""

    a_prev: float         # m
    alpha_prev: float     # rad, in (-pi, pi]
    d: float              # m
    theta_offset: float   # rad, in (-pi, pi], added to the joint variable


@dataclass(frozen=True)
class MotorParams:
    """DC gearmotor electrical constants and joint-side transmission data."""

    Ra: float           # armature resistance, ohm
    La: float           # armature inductance, H
    k_phi: float        # back-EMF / torque constant, V*s/rad
    Kr: float           # total gear + belt reduction (output torque multiplier)
    beta: float         # viscous damping at the joint, N*m*s/rad
    rated_power: float  # W


@dataclass(frozen=True)
class RobotModel:
    """Full physical description of the six-joint chain."""

    links: tuple[LinkParams, ...]     # 6, indexed A..F
    dh_table: tuple[DHRow, ...]       # 6 rows, joints theta_1..theta_6
    motors: tuple[MotorParams, ...]   # 6
    gravity: float = 9.81             # m/s^2, acting along world -z
    base_frame: np.ndarray = field(default_factory=lambda: np.eye(4))
    base_row: DHRow | None = None     # optional passive stance-support row (th0)
    name: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "dh_table", tuple(self.dh_table))
        object.__setattr__(self, "motors", tuple(self.motors))
        object.__setattr__(self, "base_frame", np.asarray(self.base_frame, dtype=float))

    @property
    def total_mass(self) -> float:
        return float(sum(l.mass for l in self.links))

    def beta_vector(self) -> np.ndarray:
        return np.array([m.beta for m in self.motors])

    def with_base_angle(self, th0: float) -> "RobotModel":
        """Copy of the model with the passive stance angle set to ``th0``."""
        row = self.base_row or DHRow(0.0, 0.0, 0.0, 0.0)
        return replace(self, base_row=replace(row, theta_offset=float(th0)))


@dataclass
class JointState:
    """Generalized positions and velocities at a time instant."""

    t: float
    q: np.ndarray    # (6,) rad
    qd: np.ndarray   # (6,) rad/s

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.qd = np.asarray(self.qd, dtype=float)


# ---------------------------------------------------------------------------
# validation

def _check_link(name: str, link: LinkParams, out: list[str]) -> None:
    prefix = f"links[{name}]"
    if not (link.mass > 0):
        out.append(f"{prefix}.mass must be > 0 (got {link.mass})")
    if link.com_offset.shape != (3,) or not np.all(np.isfinite(link.com_offset)):
        out.append(f"{prefix}.com_offset must be a finite 3-vector")
    I = link.inertia
    if I.shape != (3, 3) or not np.all(np.isfinite(I)):
        out.append(f"{prefix}.inertia must be a finite 3x3 tensor")
        return
    scale = float(np.abs(I).max()) or 1.0
    if np.abs(I - I.T).max() > _SYM_TOL * scale:
        out.append(f"{prefix}.inertia not symmetric")
        return
    eig = np.linalg.eigvalsh(0.5 * (I + I.T))
    if eig.min() < -_PSD_TOL * scale:
        out.append(f"{prefix}.inertia not positive semi-definite (min eigenvalue {eig.min():.3g})")
        return
    lam = np.sort(eig)
    if lam[0] + lam[1] < lam[2] - _PSD_TOL * scale:
        out.append(
            f"{prefix}.inertia violates the triangle inequality on principal moments "
            f"({lam[0]:.6g} + {lam[1]:.6g} < {lam[2]:.6g})"
        )


def _check_dh(label: str, row: DHRow, out: list[str]) -> None:
    vals = (row.a_prev, row.alpha_prev, row.d, row.theta_offset)
    if not all(math.isfinite(v) for v in vals):
        out.append(f"{label} has non-finite entries")
        return
    for fname, v in (("alpha_prev", row.alpha_prev), ("theta_offset", row.theta_offset)):
        if not (-math.pi < v <= math.pi):
            out.append(f"{label}.{fname} must be in (-pi, pi] (got {v})")


def _check_motor(idx: int, mp: MotorParams, out: list[str]) -> None:
    prefix = f"motors[{idx}]"
    for fname, cond in (
        ("Ra", mp.Ra > 0),
        ("La", mp.La > 0),
        ("k_phi", mp.k_phi > 0),
        ("rated_power", mp.rated_power > 0),
    ):
        if not cond:
            out.append(f"{prefix}.{fname} must be > 0 (got {getattr(mp, fname)})")
    if not (mp.Kr >= 1):
        out.append(f"{prefix}.Kr must be >= 1 (got {mp.Kr})")
    if not (mp.beta >= 0):
        out.append(f"{prefix}.beta must be >= 0 (got {mp.beta})")


def validate_model(m: RobotModel) -> list[str]:
    """Return a list of invariant violations; empty means the model is valid.

    Total function: never raises, each entry names the offending field and
    the observed value.
    """
    out: list[str] = []
    if len(m.links) != NUM_JOINTS:
        out.append(f"links must have exactly {NUM_JOINTS} entries (got {len(m.links)})")
    if len(m.dh_table) != NUM_JOINTS:
        out.append(f"dh table must have exactly {NUM_JOINTS} rows (got {len(m.dh_table)})")
    if len(m.motors) != NUM_JOINTS:
        out.append(f"motors must have exactly {NUM_JOINTS} entries (got {len(m.motors)})")
    for name, link in zip(LINK_NAMES, m.links):
        _check_link(name, link, out)
    for i, row in enumerate(m.dh_table):
        _check_dh(f"dh[{i}]", row, out)
    if m.base_row is not None:
        _check_dh("base_row", m.base_row, out)
    for i, mp in enumerate(m.motors):
        _check_motor(i, mp, out)
    if not math.isfinite(m.gravity):
        out.append(f"gravity must be finite (got {m.gravity})")
    if m.base_frame.shape != (4, 4) or not np.all(np.isfinite(m.base_frame)):
        out.append("base_frame must be a finite 4x4 transform")
    else:
        R = m.base_frame[:3, :3]
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-9 or abs(np.linalg.det(R) - 1) > 1e-9:
            out.append("base_frame rotation must be orthonormal with det +1")
        if np.abs(m.base_frame[3] - np.array([0, 0, 0, 1.0])).max() > 0:
            out.append("base_frame bottom row must be [0 0 0 1]")
    if m.links and not (m.total_mass > 0):
        out.append(f"total mass must be > 0 (got {m.total_mass})")
    return out


# ---------------------------------------------------------------------------
# TOML parsing

def _need(table: dict, key: str, ctx: str):
    if key not in table:
        raise ModelError(f"{ctx}: missing required field '{key}'")
    return table[key]


def _num(table: dict, key: str, ctx: str) -> float:
    v = _need(table, key, ctx)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ModelError(f"{ctx}.{key}: expected a number, got {type(v).__name__}")
    return float(v)


def _vec3(table: dict, key: str, ctx: str) -> np.ndarray:
    v = _need(table, key, ctx)
    if not (isinstance(v, list) and len(v) == 3 and all(isinstance(x, (int, float)) for x in v)):
        raise ModelError(f"{ctx}.{key}: expected a 3-element numeric array")
    return np.array(v, dtype=float)


def _mat(table: dict, key: str, ctx: str, shape: tuple[int, int]) -> np.ndarray:
    v = _need(table, key, ctx)
    ok = isinstance(v, list) and len(v) == shape[0] and all(
        isinstance(r, list) and len(r) == shape[1] and all(isinstance(x, (int, float)) for x in r)
        for r in v
    )
    if not ok:
        raise ModelError(f"{ctx}.{key}: expected a {shape[0]}x{shape[1]} numeric array")
    return np.array(v, dtype=float)


def _parse_dh_row(table: dict, ctx: str) -> DHRow:
    return DHRow(
        a_prev=_num(table, "a_prev_m", ctx),
        alpha_prev=_num(table, "alpha_prev_rad", ctx),
        d=_num(table, "d_m", ctx),
        theta_offset=_num(table, "theta_offset_rad", ctx),
    )


def model_from_dict(doc: dict) -> RobotModel:
    """Build a RobotModel from a parsed TOML document (no validation)."""
    schema = _need(doc, "schema", "document")
    if schema != SCHEMA_VERSION:
        raise ModelError(f"document: unsupported schema {schema!r} (expected {SCHEMA_VERSION})")

    links = []
    raw_links = _need(doc, "links", "document")
    if not isinstance(raw_links, list):
        raise ModelError("document.links: expected an array of tables")
    for i, t in enumerate(raw_links):
        name = t.get("name", LINK_NAMES[i] if i < 6 else str(i))
        ctx = f"links[{name}]"
        links.append(LinkParams(
            mass=_num(t, "mass_kg", ctx),
            com_offset=_vec3(t, "com_offset_m", ctx),
            inertia=_mat(t, "inertia_kgm2", ctx, (3, 3)),
        ))

    raw_dh = _need(doc, "dh", "document")
    if not isinstance(raw_dh, list):
        raise ModelError("document.dh: expected an array of tables")
    dh_rows = [_parse_dh_row(t, f"dh[{i}]") for i, t in enumerate(raw_dh)]

    raw_motors = _need(doc, "motors", "document")
    if not isinstance(raw_motors, list):
        raise ModelError("document.motors: expected an array of tables")
    motors = []
    for i, t in enumerate(raw_motors):
        ctx = f"motors[{i}]"
        motors.append(MotorParams(
            Ra=_num(t, "Ra_ohm", ctx),
            La=_num(t, "La_H", ctx),
            k_phi=_num(t, "k_phi_Vs", ctx),
            Kr=_num(t, "Kr", ctx),
            beta=_num(t, "beta_Nms", ctx),
            rated_power=_num(t, "rated_power_W", ctx),
        ))

    base_frame = np.eye(4)
    if "base_frame" in doc:
        bf = doc["base_frame"]
        R = _mat(bf, "rotation", "base_frame", (3, 3))
        p = _vec3(bf, "translation_m", "base_frame")
        base_frame[:3, :3] = R
        base_frame[:3, 3] = p

    base_row = _parse_dh_row(doc["base_row"], "base_row") if "base_row" in doc else None

    return RobotModel(
        links=tuple(links),
        dh_table=tuple(dh_rows),
        motors=tuple(motors),
        gravity=_num(doc, "gravity_mps2", "document"),
        base_frame=base_frame,
        base_row=base_row,
        name=str(doc.get("name", "unnamed")),
    )


def loads_model(text: str) -> RobotModel:
    """Parse and validate a model document from TOML text."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ModelError(f"model parse error: {e}") from e
    m = model_from_dict(doc)
    violations = validate_model(m)
    if violations:
        raise ModelError("invalid model: " + "; ".join(violations))
    return m


def load_model(path: str | Path) -> RobotModel:
    """Load and validate a robot model file."""
    path = Path(path)
    if not path.exists():
        raise ModelError(f"model file not found: {path}")
    try:
        return loads_model(path.read_text(encoding="utf-8"))
    except ModelError as e:
        raise ModelError(f"{path}: {e}") from None


def default_model() -> RobotModel:
    """The BLUE model shipped with the package (placeholder estimates)."""
    text = resources.files("bluebiped.data").joinpath("blue_default.toml").read_text("utf-8")
    return loads_model(text)


def default_model_text() -> str:
    return resources.files("bluebiped.data").joinpath("blue_default.toml").read_text("utf-8")


# ---------------------------------------------------------------------------
# canonical serialization

def _fmt(v: float) -> str:
    # repr() is the shortest decimal that round-trips the double exactly
    if isinstance(v, float) and v == int(v) and abs(v) < 1e16:
        return f"{v:.1f}"
    return repr(float(v))


def _fmt_vec(v: np.ndarray) -> str:
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def _fmt_mat(m: np.ndarray) -> str:
    rows = ",\n    ".join(_fmt_vec(r) for r in m)
    return "[\n    " + rows + ",\n]"


def dumps_model(m: RobotModel) -> str:
    """Canonical TOML serialization: fixed key order, round-trip-exact floats."""
    out = []
    out.append("# BLUE robot model (canonical form)")
    out.append(f"schema = {SCHEMA_VERSION}")
    out.append(f'name = "{m.name}"')
    out.append(f"gravity_mps2 = {_fmt(m.gravity)}")
    out.append("")
    out.append("[base_frame]")
    out.append(f"rotation = {_fmt_mat(m.base_frame[:3, :3])}")
    out.append(f"translation_m = {_fmt_vec(m.base_frame[:3, 3])}")
    if m.base_row is not None:
        r = m.base_row
        out.append("")
        out.append("[base_row]")
        out.append(f"a_prev_m = {_fmt(r.a_prev)}")
        out.append(f"alpha_prev_rad = {_fmt(r.alpha_prev)}")
        out.append(f"d_m = {_fmt(r.d)}")
        out.append(f"theta_offset_rad = {_fmt(r.theta_offset)}")
    for name, link in zip(LINK_NAMES, m.links):
        out.append("")
        out.append("[[links]]")
        out.append(f'name = "{name}"')
        out.append(f"mass_kg = {_fmt(link.mass)}")
        out.append(f"com_offset_m = {_fmt_vec(link.com_offset)}")
        out.append(f"inertia_kgm2 = {_fmt_mat(link.inertia)}")
    for row in m.dh_table:
        out.append("")
        out.append("[[dh]]")
        out.append(f"a_prev_m = {_fmt(row.a_prev)}")
        out.append(f"alpha_prev_rad = {_fmt(row.alpha_prev)}")
        out.append(f"d_m = {_fmt(row.d)}")
        out.append(f"theta_offset_rad = {_fmt(row.theta_offset)}")
    for mp in m.motors:
        out.append("")
        out.append("[[motors]]")
        out.append(f"Ra_ohm = {_fmt(mp.Ra)}")
        out.append(f"La_H = {_fmt(mp.La)}")
        out.append(f"k_phi_Vs = {_fmt(mp.k_phi)}")
        out.append(f"Kr = {_fmt(mp.Kr)}")
        out.append(f"beta_Nms = {_fmt(mp.beta)}")
        out.append(f"rated_power_W = {_fmt(mp.rated_power)}")
    return "\n".join(out) + "\n"


def save_model(m: RobotModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8", newline="\n")
