"""Good unknown, effective interior operator and the linearized boundary operator

The effective interior operator of the linearized problem is

    L'_e V = A0 dt V + At1 d1 V + A2 d2 V + C V,
    At1 = (A1 - A0 dt Psi - A2 d2 Psi) / d1 Phi,
    C Y = (Y, grad A0) dt U + (Y, grad At1) d1 U + (Y, grad A2) d2 U,

all coefficients taken at the real basic state U-hat + U-bar.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np

from app.errors import PreconditionError
from app.interface.front import periodic_derivative
from app.linear.basic_state import (
    H1,
    H2,
    MINUS,
    P,
    PLUS,
    U1,
    U2,
    BasicPoint,
    BasicState,
    perturbation_velocity,
)
from app.physics import symmetrizer
from app.solver.grid import d1, d2_periodic

logger = logging.getLogger(__name__)

__all__ = [
    "PerturbationFields",
    "CoefficientDerivative",
    "front_lift",
    "good_unknown",
    "from_good_unknown",
    "perturbation_velocity",
    "velocity_perturbation_to_u",
    "coefficient_derivative",
    "coefficient_derivative_fd",
    "effective_interior_apply",
    "dropped_zeroth_order",
    "boundary_operator_apply",
]


@dataclass
class PerturbationFields:
    """Good-unknown perturbation U-dot on both sides plus the front perturbation"""
    
    Udot: np.ndarray
    phi: np.ndarray
    dtphi: Optional[np.ndarray] = None
    
    def __post_init__(self):
        self.Udot = np.asarray(self.Udot, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.dtphi is None:
            self.dtphi = np.zeros_like(self.phi)
    
    @classmethod
    def zeros(cls, basic: BasicState) -> "PerturbationFields":
        return cls(np.zeros_like(basic.U), np.zeros(basic.n2))
    
    def vdot(self, basic: BasicState) -> np.ndarray:
        return perturbation_velocity(self.Udot[..., U1:U2 + 1], basic.v)
    
    def vdot_N(self, basic: BasicState) -> np.ndarray:
        v = self.vdot(basic)
        return v[..., 0] - v[..., 1] * basic.d2Psi
    
    def HN(self, basic: BasicState) -> np.ndarray:
        return self.Udot[..., H1] - self.Udot[..., H2] * basic.d2Psi
    
    def Htau(self, basic: BasicState) -> np.ndarray:
        return self.Udot[..., H1] * basic.d2Psi + self.Udot[..., H2]


@dataclass
class CoefficientDerivative:
    """(Y, grad A0), (Y, grad At1), (Y, grad A2) and C Y at one node"""
    
    dA0: np.ndarray
    dAt1: np.ndarray
    dA2: np.ndarray
    CY: np.ndarray


def front_lift(basic: BasicState, phi: np.ndarray) -> np.ndarray:
    """Psi = chi(x1) phi(x2), (n1 + 1, n2), shared by both sides"""
    return basic.chi * np.asarray(phi, dtype=float)


def _gradient_term(basic: BasicState, Psi: np.ndarray) -> np.ndarray:
    Psi = np.asarray(Psi, dtype=float)
    if Psi.ndim == 2:
        Psi = np.broadcast_to(Psi, basic.d1Phi.shape)
    return (Psi / basic.d1Phi)[..., None] * basic.d1U


def good_unknown(U: np.ndarray, Psi: np.ndarray, basic: BasicState) -> PerturbationFields:
    """U-dot = U - (Psi / d1 Phi-hat) d1 U-hat
    
    Args:
        U: perturbation of the shifted unknowns, (2, n1 + 1, n2, 6)
        Psi: front lift, (n1 + 1, n2) or (2, n1 + 1, n2)
        basic: the basic state
    
    Returns:
        PerturbationFields whose front is the x1 = 0 trace of Psi
    """
    Psi = np.asarray(Psi, dtype=float)
    Udot = np.asarray(U, dtype=float) - _gradient_term(basic, Psi)
    phi = Psi[0] if Psi.ndim == 2 else Psi[PLUS, 0]
    return PerturbationFields(Udot, phi.copy())


def from_good_unknown(pert: PerturbationFields, basic: BasicState) -> np.ndarray:
    """Inverse of ``good_unknown``: U = U-dot + (Psi / d1 Phi-hat) d1 U-hat"""
    return pert.Udot + _gradient_term(basic, front_lift(basic, pert.phi))


def velocity_perturbation_to_u(v_dot: np.ndarray, v_hat: np.ndarray) -> np.ndarray:
    """u-dot = Gamma (v-dot + Gamma^2 (v.v-dot) v), inverse of ``perturbation_velocity``"""
    v_dot = np.asarray(v_dot, dtype=float)
    v_hat = np.asarray(v_hat, dtype=float)
    gamma = 1.0 / np.sqrt(1.0 - np.sum(v_hat * v_hat, axis=-1))[..., None]
    vv = np.sum(v_hat * v_dot, axis=-1)[..., None]
    return gamma * (v_dot + gamma ** 2 * vv * v_hat)


def _derivative_matrices(point: BasicPoint, Y: np.ndarray, step: Optional[float]):
    U8 = symmetrizer.embed_planar(point.U)
    Y8 = symmetrizer.embed_planar(Y)
    if step is None:
        mats = symmetrizer.directional_derivatives(point.params, U8, Y8)
    else:
        mats = symmetrizer.directional_derivatives_fd(point.params, U8, Y8, step=step)
    return tuple(symmetrizer.planar(m) for m in mats[:3])


def coefficient_derivative(point: BasicPoint, Y: np.ndarray, step: Optional[float] = None) -> CoefficientDerivative:
    """Directional matrix derivatives along Y and the lower-order term C Y
    
    Forward mode by default; ``step`` switches to central finite differences.
    """
    Y = np.asarray(Y, dtype=float)
    dA0, dA1, dA2 = _derivative_matrices(point, Y, step)
    dAt1 = (dA1 - dA0 * point.dtPsi - dA2 * point.d2Psi) / point.d1Phi
    CY = dA0 @ point.dtU + dAt1 @ point.d1U + dA2 @ point.d2U
    return CoefficientDerivative(dA0, dAt1, dA2, CY)


def coefficient_derivative_fd(point: BasicPoint, Y: np.ndarray, step: float = 1e-6) -> CoefficientDerivative:
    return coefficient_derivative(point, Y, step=step)


def effective_interior_apply(
    basic: BasicState,
    pert: PerturbationFields,
    dtUdot: np.ndarray,
    f: Optional[np.ndarray] = None,
    d1Udot: Optional[np.ndarray] = None,
    d2Udot: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Residual L'_e U-dot - f on the interior nodes 1..n1-1
    
    Space derivatives default to second-order central differences.
    
    Returns:
        array of shape (2, n1 - 1, n2, 6)
    """
    V = pert.Udot
    if d1Udot is None:
        d1Udot = d1(V, basic.h1, axis=1)
    if d2Udot is None:
        d2Udot = d2_periodic(V, basic.h2, axis=2, order=2)
    out = (
        basic.apply(basic.A0, dtUdot)
        + basic.apply(basic.At1, d1Udot)
        + basic.apply(basic.A2, d2Udot)
        + basic.apply(basic.C, V)
    )
    if f is not None:
        out = out - f
    return out[:, 1:-1]


def dropped_zeroth_order(basic: BasicState, Psi: np.ndarray) -> np.ndarray:
    """-(Psi / d1 Phi-hat) d1 {L(U-hat, Psi-hat) U-hat}, reported but never added back"""
    Psi = np.broadcast_to(np.asarray(Psi, dtype=float), basic.d1Phi.shape)
    field = basic.residual_field()
    return -(Psi / basic.d1Phi)[..., None] * d1(field, basic.h1, axis=1)


def boundary_operator_apply(
    basic: BasicState,
    pert: PerturbationFields,
    tol: Optional[float] = None,
) -> np.ndarray:
    """The five boundary rows at x1 = 0, shape (5, n2)
    
        p+ - p- + phi [d1 p]
        v1+ - v1-
        v2+ - v2-
        H_tau+ - H_tau- + phi [d1 H_tau]
        dt phi + v2+ d2 phi - v_N+ - phi d1 v_N+
    """
    if tol is None:
        tol = 10.0 * max(basic.h1, basic.h2) ** 2
    jump = float(np.max(np.abs(basic.jump_d1v)))
    if jump > tol:
        raise PreconditionError(f"[d1 v] = {jump:.3g} exceeds {tol:.3g}", condition="(jc1')")
    
    phi = pert.phi
    trace = pert.Udot[:, 0]
    vdot = pert.vdot(basic)[:, 0]
    Htau = pert.Htau(basic)[:, 0]
    vN_plus = pert.vdot_N(basic)[PLUS, 0]
    v2_plus = basic.v[PLUS, 0, :, 1]
    
    rows = np.empty((5, basic.n2))
    rows[0] = trace[PLUS, :, P] - trace[MINUS, :, P] + phi * basic.jump_d1p
    rows[1:3] = (vdot[PLUS] - vdot[MINUS]).T
    rows[3] = Htau[PLUS] - Htau[MINUS] + phi * basic.jump_d1Htau
    rows[4] = pert.dtphi + v2_plus * periodic_derivative(phi) - vN_plus - phi * basic.d1vN_plus
    return rows
