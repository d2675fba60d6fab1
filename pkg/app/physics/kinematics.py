"""Primitive states and special-relativistic kinematics

Primitive storage uses the 3-velocity v; the symmetric system is written in
the unknown U = (p, u1, u2, u3, H1, H2, H3, S) with u = Gamma v.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from app.errors import DomainError
from app.physics.eos import ThermoParams, _density, _enthalpy

# Planar (2-D) unknowns: rows/cols of u3 and H3 removed
PLANAR_INDEX = np.array([0, 1, 2, 4, 5, 7])
UNKNOWNS = ("p", "u1", "u2", "u3", "H1", "H2", "H3", "S")
PLANAR_UNKNOWNS = tuple(UNKNOWNS[i] for i in PLANAR_INDEX)


@dataclass(frozen=True)
class PrimitiveState:
    """(p, v, H, S) at one point"""
    
    p: float
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    H: np.ndarray = field(default_factory=lambda: np.zeros(3))
    S: float = 0.0
    
    def __post_init__(self):
        v = np.zeros(3)
        H = np.zeros(3)
        v[: len(self.v)] = np.asarray(self.v, dtype=float)
        H[: len(self.H)] = np.asarray(self.H, dtype=float)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "S", float(self.S))
    
    @property
    def is_planar(self) -> bool:
        return self.v[2] == 0.0 and self.H[2] == 0.0
    
    def unknowns(self) -> np.ndarray:
        """U = (p, u, H, S)"""
        _, u = lorentz_extend(self.v)
        return np.concatenate([[self.p], u, self.H, [self.S]])
    
    @classmethod
    def from_unknowns(cls, U: np.ndarray) -> "PrimitiveState":
        U = np.asarray(U, dtype=float)
        return cls(p=U[0], v=velocity_from_u(U[1:4]), H=U[4:7], S=U[7])
    
    def with_(self, **changes) -> "PrimitiveState":
        return replace(self, **changes)


@dataclass
class Kinematics:
    """Derived relativistic quantities of one state (or a batch)"""
    
    gamma_lorentz: np.ndarray
    u: np.ndarray
    b0: np.ndarray
    b: np.ndarray
    B2: np.ndarray
    q: np.ndarray
    h: np.ndarray
    rho: np.ndarray


def lorentz_extend(v) -> Tuple[np.ndarray, np.ndarray]:
    """Gamma = (1 - |v|^2)^(-1/2) and u = Gamma v, batched over leading axes"""
    v = np.asarray(v, dtype=float)
    v2 = np.sum(v * v, axis=-1)
    if np.any(v2 >= 1.0):
        raise DomainError(f"|v| >= 1 (max |v| = {np.sqrt(np.max(v2)):.6g})", condition="|v|<1")
    gamma = 1.0 / np.sqrt(1.0 - v2)
    return gamma, gamma[..., None] * v


def velocity_from_u(u) -> np.ndarray:
    """Inverse map v = u / sqrt(1 + |u|^2)"""
    u = np.asarray(u, dtype=float)
    return u / np.sqrt(1.0 + np.sum(u * u, axis=-1))[..., None]


def lorentz_jacobian(v, dv) -> np.ndarray:
    """Directional derivative of u(v): du = Gamma (dv + (u.dv) u)"""
    gamma, u = lorentz_extend(v)
    dv = np.asarray(dv, dtype=float)
    return gamma[..., None] * (dv + np.sum(u * dv, axis=-1)[..., None] * u)


def magnetic_four(v, H) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """b0 = u.H, b = H/Gamma + (u.H) v and B^2 = |b|^2 - b0^2"""
    gamma, u = lorentz_extend(v)
    H = np.asarray(H, dtype=float)
    v = np.asarray(v, dtype=float)
    b0 = np.sum(u * H, axis=-1)
    b = H / gamma[..., None] + b0[..., None] * v
    B2 = np.sum(b * b, axis=-1) - b0 * b0
    return b0, b, B2


def b_squared_closed_form(v, H) -> np.ndarray:
    """B^2 = |H|^2 / Gamma^2 + (v.H)^2"""
    v = np.asarray(v, dtype=float)
    H = np.asarray(H, dtype=float)
    gamma, _ = lorentz_extend(v)
    vH = np.sum(v * H, axis=-1)
    return np.sum(H * H, axis=-1) / gamma ** 2 + vH ** 2


def full_kinematics(params: ThermoParams, state: PrimitiveState) -> Kinematics:
    """Every derived field of one admissible state"""
    if not state.p > 0.0:
        raise DomainError(f"pressure must be positive, got {state.p}")
    gamma, u = lorentz_extend(state.v)
    b0, b, B2 = magnetic_four(state.v, state.H)
    rho = _density(params, state.p, state.S)
    h = _enthalpy(params, state.p, rho)
    return Kinematics(
        gamma_lorentz=gamma,
        u=u,
        b0=b0,
        b=b,
        B2=B2,
        q=state.p + 0.5 * B2,
        h=h,
        rho=rho,
    )
