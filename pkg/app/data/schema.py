"""Pydantic models for configuration files and the HTTP API

Every file-level model carries ``schema_version`` and rejects unknown keys.
"""
from __future__ import annotations

from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.interface.front import FrontFunction
from app.physics.eos import ThermoParams
from app.physics.jumps import FrontGeometry
from app.physics.kinematics import PrimitiveState


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsModel(StrictModel):
    """EOS constants and margins"""
    gamma: float = 4.0 / 3.0
    A: float = 1.0
    pbar: float = 0.1
    nu: float = 0.05
    kappa: float = 0.1
    epsilon: float = 0.1
    allow_stiff: bool = False
    
    @classmethod
    def from_settings(cls) -> "ParamsModel":
        p = ThermoParams.from_settings()
        return cls(gamma=p.gamma, A=p.A, pbar=p.pbar, nu=p.nu, kappa=p.kappa,
                   epsilon=p.epsilon, allow_stiff=p.allow_stiff)
    
    def to_params(self) -> ThermoParams:
        return ThermoParams(**self.model_dump())


class StateModel(StrictModel):
    """One primitive state (p, v, H, S)"""
    schema_version: Literal[1] = 1
    p: float
    v: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    H: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    S: float = 0.0
    params: Optional[ParamsModel] = None
    
    @field_validator("v", "H")
    @classmethod
    def _two_or_three(cls, value: List[float]) -> List[float]:
        if len(value) not in (2, 3):
            raise ValueError(f"expected 2 or 3 components, got {len(value)}")
        return value
    
    def to_state(self) -> PrimitiveState:
        return PrimitiveState(p=self.p, v=tuple(self.v), H=tuple(self.H), S=self.S)


class FrontModel(StrictModel):
    """Local front slopes, optionally with a sampled front phi(x2) and its rate"""
    schema_version: Literal[1] = 1
    dtphi: float = 0.0
    d2phi: float = 0.0
    d3phi: float = 0.0
    phi: Optional[List[float]] = None
    phi_t: Optional[List[float]] = None
    
    @model_validator(mode="after")
    def _sampled_front(self) -> "FrontModel":
        if self.phi_t is not None and self.phi is None:
            raise ValueError("phi_t given without phi")
        if self.phi is not None and self.phi_t is not None and len(self.phi_t) != len(self.phi):
            raise ValueError(f"phi has {len(self.phi)} nodes, phi_t {len(self.phi_t)}")
        return self
    
    def geometry(self) -> FrontGeometry:
        return FrontGeometry.from_slopes(self.dtphi, self.d2phi, self.d3phi)
    
    def front_function(self) -> Optional[FrontFunction]:
        """The sampled front on x2 = k / n2, or None for a flat front"""
        if self.phi is None:
            return None
        phi_t = None if self.phi_t is None else np.asarray(self.phi_t, dtype=float)
        return FrontFunction(np.asarray(self.phi, dtype=float), phi_t)


class GridSpec(StrictModel):
    n1: int = 64
    n2: int = 32
    L1: float = 10.0
    T: float = 1.0
    cfl: float = settings.CFL


class BasicStateSpec(StrictModel):
    """Contact basic state on the straightened grid

    ``constant``: uniform p, v, H; ``rayleigh_taylor``: shifted pressure
    pressure_slope * x1 * chi(x1) on both sides, fluid at rest;
    ``gridded``: node values (p, u1, u2, H1, H2, S) of shape
    (2, n1 + 1, n2, 6), + side first. ``front`` samples phi-hat and its
    rate on the n2 nodes; without it the front is flat.
    """
    kind: Literal["constant", "rayleigh_taylor", "gridded"] = "constant"
    p: float = 1.0
    v: List[float] = Field(default_factory=lambda: [0.0, 0.2])
    H: List[float] = Field(default_factory=lambda: [0.8, 0.3])
    S_plus: float = 0.5
    S_minus: float = -0.5
    pressure_slope: float = 0.3
    values: Optional[List[List[List[List[float]]]]] = None
    front: Optional[FrontModel] = None
    
    @model_validator(mode="after")
    def _gridded_values(self) -> "BasicStateSpec":
        if self.kind == "gridded" and self.values is None:
            raise ValueError("gridded basic state needs values")
        if self.kind != "gridded" and self.values is not None:
            raise ValueError(f"values are only read for kind 'gridded', not {self.kind!r}")
        return self


class SourceSpec(StrictModel):
    """Interior and boundary sources

    ``manufactured``: forcing of a smooth exact solution t^2 F(x);
    ``gaussian``: compact bump f with a smooth ramp, g = 0;
    ``normal_field``: magnetic source with [f_H . N] != 0 at x1 = 0, g = 0.
    """
    kind: Literal["zero", "manufactured", "gaussian", "normal_field"] = "zero"
    amplitude: float = 1.0
    center: List[float] = Field(default_factory=lambda: [2.5, 0.5])
    width: float = 0.3
    ramp_time: float = 0.25


class ScenarioModel(StrictModel):
    """Linearized run configuration file"""
    schema_version: Literal[1] = 1
    name: str = "scenario"
    params: ParamsModel = Field(default_factory=ParamsModel)
    basic_state: BasicStateSpec = Field(default_factory=BasicStateSpec)
    source: SourceSpec = Field(default_factory=SourceSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    mode: Literal["direct", "lifted", "lifted_no_g6"] = "direct"
    dissipation: float = settings.DISSIPATION
    cadence: int = 1
    seed: Optional[int] = None


class PeriodicModel(StrictModel):
    """Nonlinear periodic run configuration file"""
    schema_version: Literal[1] = 1
    name: str = "periodic"
    params: ParamsModel = Field(default_factory=ParamsModel)
    n: int = 64
    n_steps: Optional[int] = 100
    T: Optional[float] = None
    amplitude: float = 0.2
    cfl: float = settings.CFL
    dissipation: float = settings.DISSIPATION
    cadence: int = 1


class RunSummary(StrictModel):
    """JSON summary written next to the diagnostics"""
    schema_version: Literal[1] = 1
    command: str
    seed: Optional[int] = None
    generator: Optional[str] = None
    passed: bool = True
    flags: Dict[str, bool] = Field(default_factory=dict)
    orders: Dict[str, float] = Field(default_factory=dict)
    fit: Dict[str, float] = Field(default_factory=dict)
    values: Dict[str, float] = Field(default_factory=dict)
    messages: List[str] = Field(default_factory=list)


# HTTP models

class ConditionResult(BaseModel):
    description: str
    passed: bool
    margin: Optional[float] = None


class StateCheckResponse(BaseModel):
    """Response from /state/check"""
    admissible: bool
    checks: Dict[str, ConditionResult]
    failures: List[str]


class SpeedsRequest(BaseModel):
    state: StateModel
    N: List[float] = Field(default_factory=lambda: [1.0, 0.0])


class SpeedsResponse(BaseModel):
    """Response from /state/speeds"""
    eigenvalues: List[float]
    speeds: Dict[str, float]
    margin: float


class JumpRequest(BaseModel):
    """Left (-) and right (+) traces with the local front"""
    left: StateModel
    right: StateModel
    front: FrontModel = Field(default_factory=FrontModel)
    tol: float = 1e-9


class ClassifyResponse(BaseModel):
    """Response from /jumps/classify"""
    kind: str
    mass_flux: float
    residuals: Dict[str, float]
    residual_norm: float


class ReductionResponse(BaseModel):
    """Response from /jumps/reduction"""
    passed: bool
    failed_steps: List[str]
    first_failure: Optional[str] = None
    steps: Dict[str, float]
    equations: Dict[str, float] = Field(default_factory=dict)
    contact_residuals: Dict[str, float]


class CutoffRequest(BaseModel):
    s: List[float]
    kind: Literal["quintic", "smooth"] = "quintic"


class CutoffResponse(BaseModel):
    """Response from /interface/cutoff"""
    kind: str
    chi: List[float]
    dchi: List[float]
    max_slope: float
