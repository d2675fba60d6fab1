"""Boundary quadratic form of the linearized contact problem

At x1 = 0 the energy identity leaves -1/2 (frakA1 U.U) with
frakA1 = diag(G+, -G-), G = A_N - A0 dt phi. When [u] = 0 it reduces to

    Gamma {(H_N v2 - H2 v_N)((1 - sigma^2)[H_tau] + sigma sigma_tau [H_N]) - v_N [p]}

with sigma = v_N / ell and sigma_tau = v_tau / ell. The printed variant with
sigma^2 in place of sigma sigma_tau agrees with it whenever [H_N] = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np

from app.interface.front import periodic_derivative
from app.linear.basic_state import H1, H2, MINUS, P, PLUS, U1, U2, BasicState, perturbation_velocity
from app.linear.operators import PerturbationFields
from app.physics import symmetrizer
from app.physics.eos import ThermoParams
from app.physics.kinematics import lorentz_extend, velocity_from_u

logger = logging.getLogger(__name__)

DISCREPANCY_RTOL = 1e-10


@dataclass
class QuadraticForm:
    direct: np.ndarray
    reduced: np.ndarray
    printed: np.ndarray
    
    @property
    def discrepancy(self) -> float:
        return float(np.max(np.abs(self.direct - self.reduced), initial=0.0))


def _closed_forms(Up, Up_dot, Um_dot, d2phi):
    s = np.asarray(d2phi, dtype=float)
    ell = np.sqrt(1.0 + s * s)
    v = velocity_from_u(Up[..., U1:U2 + 1])
    gamma, _ = lorentz_extend(v)
    vdot = perturbation_velocity(Up_dot[..., U1:U2 + 1], v)
    
    sigma = (v[..., 0] - v[..., 1] * s) / ell
    sigma_tau = (v[..., 0] * s + v[..., 1]) / ell
    vN_dot = vdot[..., 0] - vdot[..., 1] * s
    HN = Up[..., H1] - Up[..., H2] * s
    
    jump = Up_dot - Um_dot
    jump_p = jump[..., P]
    jump_HN = jump[..., H1] - jump[..., H2] * s
    jump_Htau = jump[..., H1] * s + jump[..., H2]
    
    shear = HN * vdot[..., 1] - Up[..., H2] * vN_dot
    reduced = gamma * (shear * ((1.0 - sigma ** 2) * jump_Htau + sigma * sigma_tau * jump_HN) - vN_dot * jump_p)
    printed = gamma * (shear * ((1.0 - sigma ** 2) * jump_Htau + sigma ** 2 * jump_HN) - vN_dot * jump_p)
    return reduced, printed


def _boundary_matrix(params: ThermoParams, U: np.ndarray, d2phi: np.ndarray) -> np.ndarray:
    """G = A_N - A0 v_N+ in planar unknowns"""
    U8 = symmetrizer.embed_planar(U)
    N = symmetrizer.co_normal(d2phi)
    AN = symmetrizer.planar(symmetrizer.normal_matrix_unknowns(params, U8, N))
    A0 = symmetrizer.planar(symmetrizer.a0_unknowns(params, U8))
    return AN, A0


def quadratic_form_points(
    params: ThermoParams,
    U_plus: np.ndarray,
    U_minus: np.ndarray,
    d2phi,
    Udot_plus: np.ndarray,
    Udot_minus: np.ndarray,
) -> QuadraticForm:
    """Both evaluations at contact boundary points, batched over leading axes
    
    U_plus/U_minus are real planar unknowns (p, u1, u2, H1, H2, S); the front
    speed is taken as v_N+ so the points must satisfy the contact conditions.
    """
    Up = np.asarray(U_plus, dtype=float)
    Um = np.asarray(U_minus, dtype=float)
    d2phi = np.broadcast_to(np.asarray(d2phi, dtype=float), Up.shape[:-1])
    Vp = np.asarray(Udot_plus, dtype=float)
    Vm = np.asarray(Udot_minus, dtype=float)
    
    v = velocity_from_u(Up[..., U1:U2 + 1])
    dtphi = (v[..., 0] - v[..., 1] * d2phi)[..., None, None]
    AN_p, A0_p = _boundary_matrix(params, Up, d2phi)
    AN_m, A0_m = _boundary_matrix(params, Um, d2phi)
    qp = np.einsum("...i,...ij,...j->...", Vp, AN_p - A0_p * dtphi, Vp)
    qm = np.einsum("...i,...ij,...j->...", Vm, AN_m - A0_m * dtphi, Vm)
    direct = -0.5 * (qp - qm)
    
    reduced, printed = _closed_forms(Up, Vp, Vm, d2phi)
    return QuadraticForm(direct, reduced, printed)


def printed_quadratic_form(params: ThermoParams, U_plus, U_minus, d2phi, Udot_plus, Udot_minus) -> np.ndarray:
    """Closed form with the sigma^2 coefficient on [H_N]"""
    return quadratic_form_points(params, U_plus, U_minus, d2phi, Udot_plus, Udot_minus).printed


def boundary_quadratic_form(basic: BasicState, pert: PerturbationFields) -> QuadraticForm:
    """-1/2 (frakA1 U.U) at x1 = 0 by contraction and by the closed form, per boundary node"""
    V = pert.Udot[:, 0]
    At1 = basic.At1[:, 0]
    direct = -0.5 * np.einsum("sni,snij,snj->n", V, At1, V)
    reduced, printed = _closed_forms(basic.real[PLUS, 0], V[PLUS], V[MINUS], basic.d2phi)
    form = QuadraticForm(direct, reduced, printed)
    
    u_jump = float(np.max(np.abs(V[PLUS, :, U1:U2 + 1] - V[MINUS, :, U1:U2 + 1]), initial=0.0))
    scale = 1.0 + float(np.max(np.abs(V), initial=0.0)) ** 2
    if u_jump <= 1e-12 * scale and form.discrepancy > DISCREPANCY_RTOL * scale:
        logger.warning(f"⚠️ closed-form quadratic form differs from the contraction by {form.discrepancy:.3g}")
    return form


def rt_boundary_term(basic: BasicState, phi: np.ndarray) -> float:
    """sum 1/2 Gamma+ [d1 p] (d2 phi)^2 h2, positive under the Rayleigh-Taylor sign condition"""
    d2 = periodic_derivative(np.asarray(phi, dtype=float))
    gamma = basic.lorentz[PLUS, 0]
    return float(np.sum(0.5 * gamma * basic.jump_d1p * d2 * d2) * basic.h2)


def boundary_energy_flux(basic: BasicState, pert: PerturbationFields) -> float:
    """-1/2 sum (frakA1 U.U)|_{x1=0} h2 by direct contraction"""
    return float(np.sum(boundary_quadratic_form(basic, pert).direct) * basic.h2)
