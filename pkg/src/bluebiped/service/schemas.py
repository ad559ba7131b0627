"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field

Vector6 = list[float]


class HealthResponse(BaseModel):
    status: str
    name: str
    version: str


class GainsRequest(BaseModel):
    p1: float = Field(..., gt=0, description="magnitude of the first stable pole [1/s]")
    p2: float = Field(..., gt=0, description="magnitude of the second stable pole [1/s]")


class GainsResponse(BaseModel):
    kp: float
    kd: float


class DrivetrainRequest(BaseModel):
    speeds_rpm: list[float] = Field(..., min_length=1)
    power_w: float = 8.0
    r1: float = 0.75
    r2: float = 0.525


class DrivetrainRow(BaseModel):
    omega_int_rpm: float
    omega_out_rpm: float
    omega_axle_rpm: float
    tau_int_nm: float
    tau_out_nm: float
    tau_axle_nm: float


class DrivetrainResponse(BaseModel):
    rows: list[DrivetrainRow]


class UtilizationRequest(BaseModel):
    sa_pa: float = Field(..., ge=0)
    sm_pa: float = Field(..., ge=0)
    se_pa: float = Field(..., gt=0)
    sy_pa: float = Field(..., gt=0)


class UtilizationResponse(BaseModel):
    utilization: float
    passes: bool


class ShaftCapacityRequest(BaseModel):
    outer_diameter_m: float = Field(..., gt=0)
    inner_diameter_m: float = Field(0.0, ge=0)
    se_pa: float = Field(..., gt=0)
    sy_pa: float = Field(1e9, gt=0)
    fs: float = Field(2.0, ge=1)
    kf_bend: float = Field(1.0, gt=0)
    kf_tors: float = Field(1.0, gt=0)
    ma_nm: float = Field(0.0, ge=0)


class ShaftCapacityResponse(BaseModel):
    torque_capacity_nm: float


class BaseForceRequest(BaseModel):
    se_pa: float = 64.93e6
    fs: float = 2.0
    moment_arm: float = 1.57
    section_modulus: float = 5.645e-7
    kf: float = 1.45


class FemurForceRequest(BaseModel):
    se_pa: float = 60e6
    fs: float = 2.0
    axial_force_n: float = 57.5
    area_m2: float = 2.4e-4
    c: float = 190e-5
    i: float = 7.246e-9


class ForceLimitResponse(BaseModel):
    force_limit_n: float
    allowable_stress_pa: float


class ModelledRequest(BaseModel):
    """Base for requests that may carry an inline model document."""

    model_toml: str | None = Field(
        None, description="model document (TOML); the built-in default when omitted"
    )


class DynamicsRequest(ModelledRequest):
    q_rad: Vector6
    qd_rads: Vector6 = Field(default_factory=lambda: [0.0] * 6)


class DynamicsResponse(BaseModel):
    d: list[Vector6]
    c: list[Vector6]
    g: Vector6
    kinetic_j: float
    potential_j: float
    lagrangian_j: float


class FkRequest(ModelledRequest):
    q_rad: Vector6
    th0_rad: float | None = None


class FkResponse(BaseModel):
    transforms: list[list[list[float]]]  # six 4x4 matrices


class SweepRequest(ModelledRequest):
    joints: list[int] = Field(default_factory=lambda: [0, 1, 4])
    from_deg: float = 0.0
    to_deg: float = 15.0
    steps: int = Field(16, ge=2)


class TableResponse(BaseModel):
    columns: list[str]
    rows: list[list[float]]


class SimulateRequest(ModelledRequest):
    config_toml: str = Field(..., description="scenario configuration (TOML)")
    seed: int | None = None


class ValidateModelRequest(BaseModel):
    model_toml: str


class ValidateModelResponse(BaseModel):
    valid: bool
    violations: list[str]
