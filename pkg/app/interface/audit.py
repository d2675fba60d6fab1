"""Admissibility audit of a gridded basic state

Basic states are given in shifted planar unknowns
(p, u1, u2, H1, H2, S) on the straightened half-strip, arrays of shape
(n1 + 1, n2, 6) per side; the real state is the shifted one plus
(pbar, 0, 0, 0, 0, S_bar).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional
import logging

import numpy as np

from app.interface.front import Cutoff, FrontFunction, normal_jump, periodic_derivative
from app.physics.eos import HyperbolicityReport, ThermoParams
from app.physics.kinematics import velocity_from_u
from app.solver.grid import d1

logger = logging.getLogger(__name__)


@dataclass
class AuditReport(HyperbolicityReport):
    """Per-condition pass/fail with worst-case margins"""
    
    warnings: List[str] = field(default_factory=list)
    
    @property
    def passed(self) -> bool:
        return self.admissible
    
    def to_dict(self) -> Dict:
        out = super().to_dict()
        out["passed"] = out.pop("admissible")
        out["warnings"] = list(self.warnings)
        return out


def _max_abs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _velocity(U: np.ndarray) -> np.ndarray:
    return velocity_from_u(U[..., 1:3])


def audit_basic_state(
    params: ThermoParams,
    Uhat_plus: np.ndarray,
    Uhat_minus: np.ndarray,
    front: FrontFunction,
    h1: float,
    cutoff: Optional[Cutoff] = None,
    bound_K: float = 10.0,
    tol: float = 1e-9,
    deriv_tol: Optional[float] = None,
) -> AuditReport:
    """Check every basic-state assumption; never raises
    
    Args:
        params: thermodynamics and margins (pbar, nu, kappa, epsilon)
        Uhat_plus: shifted planar unknowns on the + side, (n1 + 1, n2, 6)
        Uhat_minus: same on the - side
        front: phi-hat with its time derivative
        h1: node spacing in x1
        cutoff: chi used for the straightening
        bound_K: bound on the W^{2,inf} size of the basic state and front
        tol: tolerance for pointwise boundary equalities
        deriv_tol: tolerance for conditions built from grid derivatives,
            10 max(h1, h2)^2 by default
    
    Returns:
        AuditReport keyed by condition label
    """
    chi = cutoff or Cutoff()
    Up = np.asarray(Uhat_plus, dtype=float)
    Um = np.asarray(Uhat_minus, dtype=float)
    report = AuditReport()
    n2 = front.n2
    h2 = front.h2
    if deriv_tol is None:
        deriv_tol = 10.0 * max(h1, h2) ** 2
    
    norm_phi = front.sup_norm
    report.add("(fi)", "front bound ||phi||_inf <= 1", 1.0 - norm_phi)
    if 0.5 < norm_phi <= 1.0:
        msg = f"||phi||_inf = {norm_phi:.4g} lies in (1/2, 1]"
        report.warnings.append(msg)
        logger.warning(f"⚠️ {msg}")
    
    x1 = np.arange(Up.shape[0]) * h1
    chi_x = chi(x1)[:, None]
    dchi_x = chi.derivative(x1)[:, None]
    d2phi = front.d2phi()
    d2Psi = chi_x * d2phi
    d1Phi = {"+": 1.0 + dchi_x * front.phi, "-": -1.0 + dchi_x * front.phi}
    
    sides = {"+": Up, "-": Um}
    v = {k: _velocity(U) for k, U in sides.items()}
    
    # (a5), (ls)
    report.add("(a5)", "relaxed hyperbolicity p >= -pbar/2",
               min(float(np.min(U[..., 0])) for U in sides.values()) + 0.5 * params.pbar)
    speed = max(float(np.max(np.linalg.norm(w, axis=-1))) for w in v.values())
    report.add("(ls)", "light-speed margin 1-|v| >= nu/2", 1.0 - speed - 0.5 * params.nu)
    
    # boundary traces
    tp, tm = Up[0], Um[0]
    vp, vm = v["+"][0], v["-"][0]
    vN_plus = vp[:, 0] - vp[:, 1] * d2phi
    HN = {k: U[..., 3] - U[..., 4] * d2Psi for k, U in sides.items()}
    
    a12 = max(
        _max_abs(tp[:, 0] - tm[:, 0]),
        _max_abs(vp - vm),
        _max_abs(tp[:, 3:5] - tm[:, 3:5]),
        _max_abs(front.dtphi - vN_plus),
    )
    report.add("(a12')", "[p]=0, [v]=0, [H]=0, dt phi = v_N+", tol * (1.0 + _max_abs(tp)) - a12)
    
    report.add("(cdass)", "field-normal margin |H_N| >= kappa/2",
               min(float(np.min(np.abs(HN[k][0]))) for k in sides) - 0.5 * params.kappa)
    report.add("(15.1)", "normal-field continuity [H_N] = 0",
               tol * (1.0 + _max_abs(HN["+"][0])) - _max_abs(HN["+"][0] - HN["-"][0]))
    
    # normal derivatives at x1 = 0 (chi' vanishes there)
    d1U = {k: d1(U, h1, axis=0) for k, U in sides.items()}
    d1v = {k: d1(v[k], h1, axis=0)[0] for k in sides}
    d1HN = {k: d1U[k][0, :, 3] - d1U[k][0, :, 4] * d2phi for k in sides}
    d1vN = {k: d1v[k][:, 0] - d1v[k][:, 1] * d2phi for k in sides}
    
    jump_d1v = normal_jump(d1v["+"], d1v["-"])
    jump_d1HN = normal_jump(d1HN["+"], d1HN["-"])
    jump_d1vN = normal_jump(d1vN["+"], d1vN["-"])
    jump_d1p = normal_jump(d1U["+"][0, :, 0], d1U["-"][0, :, 0])
    
    report.add("(jc1')", "derivative jumps [d1 v]=0, [d1 H_N]=0",
               deriv_tol - max(_max_abs(jump_d1v), _max_abs(jump_d1HN)))
    report.add("(RTL)", "Rayleigh-Taylor [d1 p] >= epsilon/2", float(np.min(jump_d1p)) - 0.5 * params.epsilon)
    report.add("(vn)", "[d1 v_N] = 0", deriv_tol - _max_abs(jump_d1vN))
    report.add("(1v)", "[d1 v_i] = 0 per component", deriv_tol - _max_abs(jump_d1v))
    report.add("(1H_N)", "[d1 H_N] = 0", deriv_tol - _max_abs(jump_d1HN))
    
    # div h = d1 H_N + d2 (H2 d1 Phi) on the slice
    div = max(
        _max_abs(d1(HN[k], h1, axis=0) + periodic_derivative(sides[k][..., 4] * d1Phi[k], axis=1))
        for k in sides
    )
    report.add("(14.1)", "divergence constraint div h = 0", deriv_tol - div)
    
    size = 0.0
    for U in sides.values():
        first = d1(U, h1, axis=0), periodic_derivative(U, axis=1)
        second = (
            d1(first[0], h1, axis=0),
            periodic_derivative(first[0], axis=1),
            periodic_derivative(first[1], axis=1),
        )
        size = max(size, _max_abs(U) + max(_max_abs(a) for a in first) + max(_max_abs(a) for a in second))
    size += norm_phi + _max_abs(d2phi) + _max_abs(front.dtphi)
    report.add("(a22)", "basic-state bound <= K", bound_K - size)
    
    if not report.passed:
        logger.info(f"❌ basic-state audit failed: {', '.join(k for k, c in report.checks.items() if not c.passed)}")
    else:
        logger.info(f"✅ basic-state audit passed on {Up.shape[0]}x{n2} nodes")
    return report
