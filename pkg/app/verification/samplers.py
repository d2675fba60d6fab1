"""Seeded random states for the property suites

All sampling goes through a counter-based Philox generator so a seed fully
determines every suite's data, independent of thread count.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.physics.eos import ThermoParams, _density, _enthalpy
from app.physics.kinematics import PrimitiveState

GENERATOR_NAME = "Philox"


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for reproducible suites"""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class StateBatch:
    """n primitive states stored column-wise"""
    
    p: np.ndarray
    v: np.ndarray
    H: np.ndarray
    S: np.ndarray
    
    def __len__(self) -> int:
        return len(self.p)
    
    def unknowns(self) -> np.ndarray:
        """(n, 8) array of U = (p, u, H, S)"""
        gamma = 1.0 / np.sqrt(1.0 - np.sum(self.v * self.v, axis=-1))
        u = gamma[:, None] * self.v
        return np.concatenate([self.p[:, None], u, self.H, self.S[:, None]], axis=-1)
    
    def state(self, i: int) -> PrimitiveState:
        return PrimitiveState(p=self.p[i], v=self.v[i], H=self.H[i], S=self.S[i])


def _directions(rng: np.random.Generator, n: int, planar: bool) -> np.ndarray:
    d = rng.standard_normal((n, 3))
    if planar:
        d[:, 2] = 0.0
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def sample_states(
    rng: np.random.Generator,
    n: int,
    params: ThermoParams,
    planar: bool = False,
    p_range: Tuple[float, float] = (0.2, 5.0),
    speed_max: float = 0.8,
    field_max: float = 2.0,
    entropy_range: Tuple[float, float] = (-1.0, 1.0),
) -> StateBatch:
    """Admissible states: p >= pbar, |v| <= min(speed_max, 1 - nu)"""
    lo = max(p_range[0], params.pbar)
    p = rng.uniform(lo, p_range[1], n)
    speed = rng.uniform(0.0, min(speed_max, 1.0 - params.nu), n)
    v = speed[:, None] * _directions(rng, n, planar)
    H = rng.uniform(-field_max, field_max, (n, 3))
    if planar:
        H[:, 2] = 0.0
    S = rng.uniform(*entropy_range, n)
    return StateBatch(p=p, v=v, H=H, S=S)


def sample_negative_pressure(rng: np.random.Generator, n: int, params: ThermoParams) -> StateBatch:
    """States with p in [-0.5, 0), otherwise admissible"""
    batch = sample_states(rng, n, params)
    batch.p = -rng.uniform(1e-3, 0.5, n)
    return batch


@dataclass
class ContactBatch:
    """Common p, v, H on both sides, S+ != S-, a front slope and dt phi = v_N"""
    
    plus: StateBatch
    minus: StateBatch
    d2phi: np.ndarray
    dtphi: np.ndarray


def sample_contact_points(
    rng: np.random.Generator,
    n: int,
    params: ThermoParams,
    slope_max: float = 1.0,
    min_entropy_jump: float = 0.1,
) -> ContactBatch:
    """Planar contact points with |H_N| >= kappa on the unnormalized normal"""
    base = sample_states(rng, n, params, planar=True)
    d2phi = rng.uniform(-slope_max, slope_max, n)
    HN = base.H[:, 0] - base.H[:, 1] * d2phi
    # rejection keeps the field-normal margin with a little room
    bad = np.abs(HN) < 1.5 * params.kappa
    while np.any(bad):
        k = int(bad.sum())
        base.H[bad, :2] = rng.uniform(-2.0, 2.0, (k, 2))
        d2phi[bad] = rng.uniform(-slope_max, slope_max, k)
        HN = base.H[:, 0] - base.H[:, 1] * d2phi
        bad = np.abs(HN) < 1.5 * params.kappa
    jump = rng.uniform(min_entropy_jump, 1.0, n) * rng.choice([-1.0, 1.0], n)
    minus = StateBatch(p=base.p, v=base.v, H=base.H, S=base.S)
    plus = StateBatch(p=base.p.copy(), v=base.v.copy(), H=base.H.copy(), S=base.S + jump)
    dtphi = base.v[:, 0] - base.v[:, 1] * d2phi
    return ContactBatch(plus=plus, minus=minus, d2phi=d2phi, dtphi=dtphi)


def sound_speed_sq_batch(params: ThermoParams, batch: StateBatch) -> np.ndarray:
    rho = _density(params, batch.p, batch.S)
    return params.gamma * batch.p / rho / _enthalpy(params, batch.p, rho)


def perturb(rng: np.random.Generator, state: PrimitiveState, size: float = 1e-2,
            planar: Optional[bool] = None) -> PrimitiveState:
    """Small random offset of p, v, H (used as a solver starting guess)"""
    planar = state.is_planar if planar is None else planar
    dv = size * rng.standard_normal(3)
    dH = size * rng.standard_normal(3)
    if planar:
        dv[2] = dH[2] = 0.0
    return state.with_(p=state.p * (1.0 + size * rng.standard_normal()), v=state.v + dv, H=state.H + dH)
