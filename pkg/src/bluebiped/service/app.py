"""FastAPI service wrapping the core package.

Stateless compute endpoints: every handler is a pure function of its
request, so the service can run multiple clients concurrently. Simulation
results come back as CSV (text/csv) to preserve the deterministic on-disk
format; the smaller calculators return JSON.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__, control, design_check, dynamics, kinematics, sim
from ..errors import ConfigError, DivergenceError, ModelError
from ..model import JointState, default_model, loads_model, model_from_dict, validate_model
from . import schemas

import tomli


def _model_from(req: schemas.ModelledRequest):
    if req.model_toml is None:
        return default_model()
    try:
        return loads_model(req.model_toml)
    except ModelError as e:
        raise HTTPException(status_code=422, detail=str(e))


def create_app() -> FastAPI:
    app = FastAPI(
        title="bluebiped",
        version=__version__,
        description="Kinematics, dynamics, control, and design checks for the "
                    "BLUE six-joint biped.",
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", name="bluebiped", version=__version__)

    @app.get("/model/default", response_class=PlainTextResponse)
    def model_default() -> str:
        from ..model import default_model_text

        return default_model_text()

    @app.post("/model/validate", response_model=schemas.ValidateModelResponse)
    def model_validate(req: schemas.ValidateModelRequest):
        try:
            doc = tomli.loads(req.model_toml)
            m = model_from_dict(doc)
        except (ModelError, tomli.TOMLDecodeError) as e:
            return schemas.ValidateModelResponse(valid=False, violations=[str(e)])
        violations = validate_model(m)
        return schemas.ValidateModelResponse(valid=not violations, violations=violations)

    @app.post("/control/gains", response_model=schemas.GainsResponse)
    def gains(req: schemas.GainsRequest):
        g = control.gains_from_poles(req.p1, req.p2)
        return schemas.GainsResponse(kp=float(g.kp), kd=float(g.kd))

    @app.post("/drivetrain/table", response_model=schemas.DrivetrainResponse)
    def drivetrain_table(req: schemas.DrivetrainRequest):
        try:
            rows = design_check.speed_torque_table(
                req.speeds_rpm, power_w=req.power_w, r1=req.r1, r2=req.r2)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return schemas.DrivetrainResponse(rows=[schemas.DrivetrainRow(**r) for r in rows])

    @app.post("/design/utilization", response_model=schemas.UtilizationResponse)
    def utilization(req: schemas.UtilizationRequest):
        u = design_check.asme_elliptic_utilization(req.sa_pa, req.sm_pa,
                                                   req.se_pa, req.sy_pa)
        return schemas.UtilizationResponse(utilization=u, passes=u <= 1.0)

    @app.post("/design/shaft-capacity", response_model=schemas.ShaftCapacityResponse)
    def shaft_capacity(req: schemas.ShaftCapacityRequest):
        try:
            section = design_check.ShaftSection(D=req.outer_diameter_m,
                                                d=req.inner_diameter_m)
            inputs = design_check.StressInputs(
                Se=req.se_pa, Sy=req.sy_pa, fs=req.fs, Kf_bend=req.kf_bend,
                Kf_tors=req.kf_tors, Ma=req.ma_nm, section=section)
            ta = design_check.internal_shaft_torque_capacity(inputs)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return schemas.ShaftCapacityResponse(torque_capacity_nm=ta)

    @app.post("/design/base-force", response_model=schemas.ForceLimitResponse)
    def base_force(req: schemas.BaseForceRequest):
        try:
            F = design_check.base_force_limit(
                Se=req.se_pa, fs=req.fs, moment_arm=req.moment_arm,
                section_modulus=req.section_modulus, Kf=req.kf)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return schemas.ForceLimitResponse(force_limit_n=F,
                                          allowable_stress_pa=req.se_pa / req.fs)

    @app.post("/design/femur-force", response_model=schemas.ForceLimitResponse)
    def femur_force(req: schemas.FemurForceRequest):
        try:
            F = design_check.femur_force_limit(
                Se=req.se_pa, fs=req.fs, axial_force=req.axial_force_n,
                area=req.area_m2, c=req.c, I=req.i)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return schemas.ForceLimitResponse(force_limit_n=F,
                                          allowable_stress_pa=req.se_pa / req.fs)

    @app.post("/dynamics/matrices", response_model=schemas.DynamicsResponse)
    def dynamics_matrices(req: schemas.DynamicsRequest):
        m = _model_from(req)
        q = np.asarray(req.q_rad, dtype=float)
        qd = np.asarray(req.qd_rads, dtype=float)
        mats = dynamics.matrices(m, q, qd)
        en = dynamics.energies(m, JointState(0.0, q, qd))
        return schemas.DynamicsResponse(
            d=mats.D.tolist(), c=mats.C.tolist(), g=mats.G.tolist(),
            kinetic_j=en.T, potential_j=en.V, lagrangian_j=en.L)

    @app.post("/kinematics/fk", response_model=schemas.FkResponse)
    def fk(req: schemas.FkRequest):
        m = _model_from(req)
        T = kinematics.chain_transforms(m, np.asarray(req.q_rad, dtype=float),
                                        th0=req.th0_rad)
        return schemas.FkResponse(transforms=T.tolist())

    @app.post("/kinematics/sweep", response_model=schemas.TableResponse)
    def sweep(req: schemas.SweepRequest):
        m = _model_from(req)
        try:
            table = kinematics.joint_sweep(
                m, req.joints,
                (np.radians(req.from_deg), np.radians(req.to_deg)), req.steps)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return schemas.TableResponse(columns=table.columns, rows=table.data.tolist())

    @app.post("/simulate", response_class=PlainTextResponse)
    def simulate(req: schemas.SimulateRequest) -> str:
        m = _model_from(req)
        try:
            cfg = sim.config_from_dict(tomli.loads(req.config_toml))
        except (ConfigError, tomli.TOMLDecodeError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        if req.seed is not None:
            cfg.seed = req.seed
        try:
            tr = sim.run_scenario(cfg, m)
        except DivergenceError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return PlainTextResponse(sim.format_csv(tr), media_type="text/csv")

    return app


app = create_app()
