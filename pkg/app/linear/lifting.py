"""Lifting of inhomogeneous boundary data

Boundary data g = (g1..g5) and the transported normal-field datum g6 are
absorbed into fields U-tilde = chi(x1) * trace(x2); the remaining problem has
homogeneous boundary conditions and source f - L'_e U-tilde. g6 solves

    dt g6 + d2 (v2+ g6) = [f_H . N]

on the periodic boundary, with f_H = M^-1 (magnetic rows of f).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional
import logging

import numpy as np

from app.linear.basic_state import H1, H2, MINUS, P, PLUS, S, U1, U2, BasicState
from app.linear.operators import velocity_perturbation_to_u
from app.solver.grid import d2_periodic, ssp_rk2_step

logger = logging.getLogger(__name__)


@dataclass
class LiftedFields:
    """U-tilde with its derivatives, the modified source and g6"""
    
    U: np.ndarray
    dtU: np.ndarray
    d1U: np.ndarray
    d2U: np.ndarray
    f: np.ndarray
    g6: np.ndarray


def magnetic_source(basic: BasicState, f: np.ndarray) -> np.ndarray:
    """f_H: right-hand side of the H equations solved for dt H, (2, n1 + 1, n2, 2)"""
    M = basic.A0[..., H1:H2 + 1, H1:H2 + 1]
    return np.linalg.solve(M, f[..., H1:H2 + 1, None])[..., 0]


def normal_source_jump(basic: BasicState, f: np.ndarray) -> np.ndarray:
    """[f_H . N-hat] at x1 = 0 with N-hat = (1, -d2 phi-hat)"""
    fH = magnetic_source(basic, f)[:, 0]
    fN = fH[..., 0] - fH[..., 1] * basic.d2phi
    return fN[PLUS] - fN[MINUS]


def divergence_source(basic: BasicState, f: np.ndarray) -> np.ndarray:
    """f_h = (f_H1 - f_H2 d2 Psi, f_H2 d1 Phi)"""
    fH = magnetic_source(basic, f)
    return np.stack([fH[..., 0] - fH[..., 1] * basic.d2Psi, fH[..., 1] * basic.d1Phi], axis=-1)


def g6_rhs(g6: np.ndarray, v2_plus: np.ndarray, source: np.ndarray, h2: float) -> np.ndarray:
    return source - d2_periodic(v2_plus * g6, h2, axis=-1, order=4)


def transport_g6(
    g6: np.ndarray,
    v2_plus: np.ndarray,
    source: Callable[[float], np.ndarray],
    t0: float,
    dt: float,
    n_steps: int,
) -> np.ndarray:
    """Advance g6 with the solver's two-stage scheme"""
    h2 = 1.0 / g6.size
    
    def rhs(t, y):
        return (g6_rhs(y[0], v2_plus, source(t), h2),)
    
    state = (np.asarray(g6, dtype=float),)
    t = t0
    for _ in range(n_steps):
        state = ssp_rk2_step(rhs, state, t, dt)
        t += dt
    return state[0]


def boundary_trace(basic: BasicState, g: np.ndarray, g6: np.ndarray) -> np.ndarray:
    """Traces (2, n2, 6) with [p] = g1, [v] = (g2, g3), [H_tau] = g4, v_N+ = -g5, [H_N] = g6
    
    The - side carries only the velocity jump; pressure and field perturbations
    live on the + side.
    """
    g = np.asarray(g, dtype=float)
    s = basic.d2phi
    ell2 = 1.0 + s * s
    n2 = basic.n2
    
    v_plus = np.stack([-g[4], np.zeros(n2)], axis=-1)
    v_minus = v_plus - g[1:3].T
    trace = np.zeros((2, n2, 6))
    trace[PLUS, :, P] = g[0]
    trace[PLUS, :, H1] = (g6 + s * g[3]) / ell2
    trace[PLUS, :, H2] = (g[3] - s * g6) / ell2
    trace[PLUS, :, U1:U2 + 1] = velocity_perturbation_to_u(v_plus, basic.v[PLUS, 0])
    trace[MINUS, :, U1:U2 + 1] = velocity_perturbation_to_u(v_minus, basic.v[MINUS, 0])
    trace[..., S] = 0.0
    return trace


def lift_boundary_data(
    basic: BasicState,
    g: np.ndarray,
    dtg: np.ndarray,
    f: np.ndarray,
    g6: np.ndarray,
    dtg6: Optional[np.ndarray] = None,
) -> LiftedFields:
    """Lifted fields and modified source at one instant
    
    Args:
        basic: the basic state
        g: boundary data (5, n2)
        dtg: its time derivative
        f: interior source (2, n1 + 1, n2, 6)
        g6: transported normal-field datum (n2,)
        dtg6: its time derivative; taken from the transport equation if omitted
    
    Returns:
        LiftedFields with f-tilde = f - L'_e U-tilde
    """
    f = np.asarray(f, dtype=float)
    g6 = np.asarray(g6, dtype=float)
    if dtg6 is None:
        dtg6 = g6_rhs(g6, basic.v[PLUS, 0, :, 1], normal_source_jump(basic, f), basic.h2)
    
    trace = boundary_trace(basic, g, g6)
    dt_trace = boundary_trace(basic, dtg, dtg6)
    U = basic.chi[None, :, :, None] * trace[:, None]
    dtU = basic.chi[None, :, :, None] * dt_trace[:, None]
    d1U = basic.dchi[None, :, :, None] * trace[:, None]
    d2U = d2_periodic(U, basic.h2, axis=2, order=4)
    
    LU = basic.apply(basic.A0, dtU) + basic.apply(basic.At1, d1U) + basic.apply(basic.A2, d2U) + basic.apply(basic.C, U)
    return LiftedFields(U=U, dtU=dtU, d1U=d1U, d2U=d2U, f=f - LU, g6=g6)
