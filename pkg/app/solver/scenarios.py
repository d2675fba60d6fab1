"""Scenario builders for the linearized solver

A scenario file (``ScenarioModel``) names a basic state, a source kind and
a grid; this module turns it into a ``ScenarioConfig``. The named presets
are the runs used by the convergence and growth checks.
"""
from __future__ import annotations

from typing import Callable, Dict, Optional
import logging

import numpy as np

from app.config import settings
from app.data.schema import BasicStateSpec, GridSpec, ScenarioModel, SourceSpec
from app.errors import ConfigError
from app.interface.front import Cutoff, FrontFunction, periodic_derivative
from app.linear.basic_state import H1, P, PLUS, U1, U2, BasicState, ShiftConstants
from app.linear.operators import PerturbationFields, boundary_operator_apply
from app.physics.eos import ThermoParams
from app.physics.kinematics import lorentz_extend
from app.solver.grid import Grid
from app.solver.linearized import LiftingMode, ScenarioConfig, SourceTerms
from app.verification.samplers import make_rng

logger = logging.getLogger(__name__)

# (p, u1, u2, H1, H2, S) weights of the compact source on each side
GAUSSIAN_DIRECTION = np.array([
    [1.0, 0.5, -0.5, 0.3, 0.2, 0.1],
    [0.8, -0.4, 0.3, -0.2, 0.1, -0.1],
])
MMS_FRONT_AMPLITUDE = 0.1


def smooth_ramp(t: float, ramp_time: float) -> float:
    """sin^2 switch-on from 0 at t = 0 to 1 at t = ramp_time"""
    if t <= 0.0:
        return 0.0
    if t >= ramp_time:
        return 1.0
    return float(np.sin(0.5 * np.pi * t / ramp_time) ** 2)


def build_basic_state(params: ThermoParams, spec: BasicStateSpec, grid: Grid, cutoff: Optional[Cutoff] = None) -> BasicState:
    """Basic state on the grid, with the sampled front when the basic_state entry carries one"""
    cutoff = cutoff or Cutoff(settings.CUTOFF_KIND)
    shift = ShiftConstants(params.pbar, spec.S_plus, spec.S_minus)
    front = spec.front.front_function() if spec.front is not None else None
    if front is not None and front.n2 != grid.n2:
        raise ConfigError(f"front has {front.n2} nodes, grid has n2 = {grid.n2}")
    if spec.kind == "gridded":
        values = np.asarray(spec.values, dtype=float)
        expected = (2, grid.n1 + 1, grid.n2, 6)
        if values.shape != expected:
            raise ConfigError(f"gridded basic state has shape {values.shape}, grid needs {expected}")
        U = values - shift.vector()[:, None, None, :]
        return BasicState(params, U, front or FrontFunction.flat(grid.n2), grid.L1 / grid.n1, shift, cutoff)
    try:
        _, u = lorentz_extend(np.asarray(spec.v[:2], dtype=float))
    except ValueError as e:
        raise ConfigError(f"basic-state velocity: {e}")
    
    def profile(side, X1, X2):
        row = np.zeros(X1.shape + (6,))
        row[..., P] = spec.p - params.pbar
        if spec.kind == "rayleigh_taylor":
            row[..., P] += spec.pressure_slope * X1 * cutoff(X1)
        row[..., U1:U2 + 1] = u[:2]
        row[..., H1:H1 + 2] = spec.H[:2]
        return row
    
    return BasicState.from_profiles(params, profile, grid.n1, grid.n2, grid.L1, shift, front=front, cutoff=cutoff)


def _mesh(basic: BasicState):
    x2 = np.arange(basic.n2) * basic.h2
    return basic.x1[:, None, None], x2[None, :, None], x2


def manufactured_sources(basic: BasicState, seed: int, amplitude: float = 0.1) -> SourceTerms:
    """Forcing for U-dot* = t^2 F(x), phi* = t^2 phi0(x2)
    
    F = a cos(pi x1 + b) sin(2 pi x2 + c) per side and component, with
    (a, b, c) drawn from the seeded generator.
    """
    rng = make_rng(seed)
    a = amplitude * rng.uniform(0.5, 1.0, (2, 6))
    b = rng.uniform(0.0, 2.0 * np.pi, (2, 6))
    c = rng.uniform(0.0, 2.0 * np.pi, (2, 6))
    X1, X2, x2 = _mesh(basic)
    
    F = np.empty_like(basic.U)
    dF1 = np.empty_like(basic.U)
    dF2 = np.empty_like(basic.U)
    for side in range(2):
        ph1 = np.pi * X1 + b[side]
        ph2 = 2.0 * np.pi * X2 + c[side]
        F[side] = a[side] * np.cos(ph1) * np.sin(ph2)
        dF1[side] = -np.pi * a[side] * np.sin(ph1) * np.sin(ph2)
        dF2[side] = 2.0 * np.pi * a[side] * np.cos(ph1) * np.cos(ph2)
    phi0 = MMS_FRONT_AMPLITUDE * np.sin(2.0 * np.pi * x2)
    d2phi0 = 2.0 * np.pi * MMS_FRONT_AMPLITUDE * np.cos(2.0 * np.pi * x2)
    
    A0F = basic.apply(basic.A0, F)
    LF = basic.apply(basic.At1, dF1) + basic.apply(basic.A2, dF2) + basic.apply(basic.C, F)
    
    G0 = boundary_operator_apply(basic, PerturbationFields(F, phi0, np.zeros_like(phi0)))
    G0[4] += basic.v[PLUS, 0, :, 1] * (d2phi0 - periodic_derivative(phi0))
    E5 = np.zeros_like(G0)
    E5[4] = phi0
    
    return SourceTerms(
        f=lambda t: 2.0 * t * A0F + t * t * LF,
        g=lambda t: t * t * G0 + 2.0 * t * E5,
        dtg=lambda t: 2.0 * t * G0 + 2.0 * E5,
        exact=lambda t: (t * t * F, t * t * phi0),
    )


def gaussian_source(basic: BasicState, spec: SourceSpec) -> SourceTerms:
    """Compactly supported bump in (x1, x2) switched on smoothly, g = 0"""
    X1, X2, _ = _mesh(basic)
    c1, c2 = spec.center
    w = spec.width
    dx2 = (X2 - c2 + 0.5) % 1.0 - 0.5
    r = np.hypot(X1 - c1, dx2)[..., 0]
    q = np.exp(-(r / w) ** 2) * basic.cutoff(r / w)
    shape = q[None, :, :, None] * GAUSSIAN_DIRECTION[:, None, None, :]
    if np.any(shape[:, 0] != 0.0) or np.any(shape[:, -1] != 0.0):
        logger.warning("⚠️ gaussian source reaches the boundary of the strip")
    zero_g = np.zeros((5, basic.n2))
    return SourceTerms(
        f=lambda t: spec.amplitude * smooth_ramp(t, spec.ramp_time) * shape,
        g=lambda t: zero_g,
        dtg=lambda t: zero_g,
    )


def normal_field_source(basic: BasicState, spec: SourceSpec) -> SourceTerms:
    """Magnetic source on the + side near x1 = 0 with [f_H . N] != 0, g = 0"""
    X1, X2, _ = _mesh(basic)
    w = spec.width
    profile = np.exp(-(X1[..., 0] / w) ** 2) * basic.cutoff(X1[..., 0] / w) * np.sin(2.0 * np.pi * X2[..., 0])
    shape = np.zeros_like(basic.U)
    shape[PLUS, ..., H1] = profile
    zero_g = np.zeros((5, basic.n2))
    return SourceTerms(
        f=lambda t: spec.amplitude * smooth_ramp(t, spec.ramp_time) * shape,
        g=lambda t: zero_g,
        dtg=lambda t: zero_g,
    )


def build_sources(basic: BasicState, spec: SourceSpec, seed: int) -> SourceTerms:
    if spec.kind == "zero":
        return SourceTerms.zero(basic)
    if spec.kind == "manufactured":
        return manufactured_sources(basic, seed, spec.amplitude)
    if spec.kind == "gaussian":
        return gaussian_source(basic, spec)
    if spec.kind == "normal_field":
        return normal_field_source(basic, spec)
    raise ConfigError(f"unknown source kind {spec.kind!r}")


def build_scenario(
    model: ScenarioModel,
    grid: Optional[Grid] = None,
    seed: Optional[int] = None,
) -> ScenarioConfig:
    """ScenarioConfig from a validated scenario model
    
    Args:
        model: the scenario file contents
        grid: overrides the model's grid (``--grid``)
        seed: overrides the model's seed (``--seed``)
    """
    params = model.params.to_params()
    if grid is None:
        grid = Grid(**model.grid.model_dump())
    if seed is None:
        seed = model.seed if model.seed is not None else settings.DEFAULT_SEED
    basic = build_basic_state(params, model.basic_state, grid)
    sources = build_sources(basic, model.source, seed)
    logger.info(f"📦 scenario '{model.name}': {model.basic_state.kind} state, {model.source.kind} source, {grid.n1}x{grid.n2}")
    return ScenarioConfig(
        name=model.name,
        basic=basic,
        sources=sources,
        grid=grid,
        mode=LiftingMode(model.mode),
        dissipation=model.dissipation,
        cadence=model.cadence,
        bound_K=settings.BASIC_STATE_BOUND_K,
    )


# presets

def zero_model(n1: int = 32, n2: int = 16, T: float = 0.5) -> ScenarioModel:
    return ScenarioModel(name="zero", grid=GridSpec(n1=n1, n2=n2, L1=settings.DOMAIN_DEPTH, T=T))


def mms_model(n: int = 32, T: float = 0.5, mode: str = "direct") -> ScenarioModel:
    """Constant contact state, manufactured solution on [0, 1] x T"""
    return ScenarioModel(
        name=f"mms_{mode}_{n}",
        basic_state=BasicStateSpec(kind="constant", p=1.0, v=[0.0, 0.2], H=[0.8, 0.3]),
        source=SourceSpec(kind="manufactured", amplitude=0.1),
        grid=GridSpec(n1=n, n2=n, L1=1.0, T=T),
        mode=mode,
    )


def gronwall_model(n1: int = 64, n2: int = 32, T: float = 1.0) -> ScenarioModel:
    """Fluid at rest with p-hat = 0.3 x1 chi(x1), compact ramped source"""
    params = ThermoParams.from_settings()
    return ScenarioModel(
        name="gronwall",
        basic_state=BasicStateSpec(
            kind="rayleigh_taylor", p=params.pbar, v=[0.0, 0.0], H=[0.8, 0.2], pressure_slope=0.3,
        ),
        source=SourceSpec(kind="gaussian", amplitude=1.0, center=[3.0, 0.5], width=0.5, ramp_time=0.25),
        grid=GridSpec(n1=n1, n2=n2, L1=settings.DOMAIN_DEPTH, T=T),
    )


def normal_field_model(n: int = 32, mode: str = "lifted", T: float = 0.5) -> ScenarioModel:
    """[f_H . N] != 0 at the boundary; compare lifted against lifted_no_g6"""
    return ScenarioModel(
        name=f"normal_field_{mode}_{n}",
        basic_state=BasicStateSpec(kind="constant", p=1.0, v=[0.0, 0.2], H=[0.8, 0.3]),
        source=SourceSpec(kind="normal_field", amplitude=1.0, width=0.25, ramp_time=0.1),
        grid=GridSpec(n1=n, n2=n, L1=2.0, T=T),
        mode=mode,
    )


PRESETS: Dict[str, Callable[..., ScenarioModel]] = {
    "zero": zero_model,
    "mms": mms_model,
    "gronwall": gronwall_model,
    "normal_field": normal_field_model,
}


def preset(name: str, **kwargs) -> ScenarioModel:
    if name not in PRESETS:
        raise ConfigError(f"unknown scenario preset {name!r} (known: {', '.join(PRESETS)})")
    return PRESETS[name](**kwargs)
