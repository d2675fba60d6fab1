"""Jump conditions across a discontinuity and their classification

Brackets are [g] = g+ - g-, where ``right`` is the Omega+ side and ``left``
the Omega- side. Every residual is written as a bracket of one-sided
products, which reduces to the familiar j[X] - H_n[Y] form whenever [j] = 0
and [H_n] = 0, and agrees exactly with the weak form -sigma[Q] + [F.n] of
the conservation laws (``flux_residuals``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy import optimize

from app.errors import CausalityError, PreconditionError, SolverError
from app.physics.eos import ThermoParams
from app.physics.kinematics import PrimitiveState, full_kinematics

logger = logging.getLogger(__name__)

PLANAR_FIELDS = ("p", "v1", "v2", "H1", "H2", "S")


@dataclass(frozen=True)
class FrontGeometry:
    """Unit normal, (unnormalized) tangents and speed of a front x1 = phi(t, x')"""
    
    n: np.ndarray
    tau: Tuple[np.ndarray, ...]
    sigma: float
    ell: float = 1.0
    
    @classmethod
    def from_slopes(cls, dtphi: float, d2phi: float = 0.0, d3phi: float = 0.0) -> "FrontGeometry":
        """n = (1, -d2phi, -d3phi)/ell, tau_1 = (d2phi, 1, 0), tau_2 = (d3phi, 0, 1), sigma = dtphi/ell"""
        ell = float(np.sqrt(1.0 + d2phi ** 2 + d3phi ** 2))
        n = np.array([1.0, -d2phi, -d3phi]) / ell
        tau = (np.array([d2phi, 1.0, 0.0]), np.array([d3phi, 0.0, 1.0]))
        return cls(n=n, tau=tau, sigma=float(dtphi) / ell, ell=ell)
    
    @property
    def is_causal(self) -> bool:
        return abs(self.sigma) < 1.0
    
    def rotated(self, angle: float) -> "FrontGeometry":
        R = rotation_matrix(angle)
        return FrontGeometry(n=R @ self.n, tau=tuple(R @ t for t in self.tau), sigma=self.sigma, ell=self.ell)


def rotation_matrix(angle: float) -> np.ndarray:
    """Rotation by ``angle`` in the (x1, x2) plane"""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_planar(state: PrimitiveState, angle: float) -> PrimitiveState:
    """Rotate v and H of a state in the (x1, x2) plane"""
    R = rotation_matrix(angle)
    return state.with_(v=R @ state.v, H=R @ state.H)


@dataclass
class _Side:
    """One-sided quantities entering the jump conditions"""
    
    rho: float
    h: float
    gamma: float
    q: float
    v: np.ndarray
    H: np.ndarray
    vH: float
    H2: float
    j: float
    vn: float
    Hn: float
    B2: float
    b: np.ndarray


def _side(params: ThermoParams, state: PrimitiveState, geom: FrontGeometry) -> _Side:
    k = full_kinematics(params, state)
    vn = float(state.v @ geom.n)
    return _Side(
        rho=float(k.rho),
        h=float(k.h),
        gamma=float(k.gamma_lorentz),
        q=float(k.q),
        v=state.v,
        H=state.H,
        vH=float(state.v @ state.H),
        H2=float(state.H @ state.H),
        j=float(k.rho * k.gamma_lorentz * (vn - geom.sigma)),
        vn=vn,
        Hn=float(state.H @ geom.n),
        B2=float(k.B2),
        b=np.asarray(k.b),
    )


def mass_flux(params: ThermoParams, state: PrimitiveState, geom: FrontGeometry) -> float:
    """j = rho Gamma (v.n - sigma)"""
    return _side(params, state, geom).j


@dataclass
class JumpResiduals:
    """Left-hand sides of the six jump conditions"""
    
    r10: float
    r11: float
    r12: np.ndarray
    r13: float
    r14: np.ndarray
    r15: float
    
    def as_vector(self, planar: bool = True) -> np.ndarray:
        k = 1 if planar else 2
        return np.concatenate([[self.r10, self.r11], self.r12[:k], [self.r13], self.r14[:k], [self.r15]])
    
    def norm(self) -> float:
        return float(np.max(np.abs(self.as_vector(planar=False))))
    
    def to_dict(self) -> Dict:
        return {
            "r10": self.r10,
            "r11": self.r11,
            "r12": [float(x) for x in self.r12],
            "r13": self.r13,
            "r14": [float(x) for x in self.r14],
            "r15": self.r15,
        }


def _advected_momentum(s: _Side, t: np.ndarray) -> float:
    """X_t, the bracket multiplying j in the momentum conditions"""
    vt = float(s.v @ t)
    Ht = float(s.H @ t)
    return (s.h * s.gamma + s.H2 / (s.rho * s.gamma)) * vt - s.vH * Ht / (s.rho * s.gamma)


def _momentum_term(s: _Side, t: np.ndarray) -> float:
    """j X_t - H_n (H_t/Gamma^2 + (v.H) v_t) along a direction t"""
    vt = float(s.v @ t)
    Ht = float(s.H @ t)
    return s.j * _advected_momentum(s, t) - s.Hn * (Ht / s.gamma ** 2 + s.vH * vt)


def _residuals(plus: _Side, minus: _Side, geom: FrontGeometry) -> JumpResiduals:
    def jump(fn):
        return fn(plus) - fn(minus)
    
    n = geom.n
    r12 = np.array([jump(lambda s, t=t: _momentum_term(s, t)) for t in geom.tau])
    r14 = np.array([
        jump(lambda s, t=t: s.j * float(s.H @ t) / (s.rho * s.gamma) - s.Hn * float(s.v @ t))
        for t in geom.tau
    ])
    return JumpResiduals(
        r10=jump(lambda s: s.j),
        r11=jump(lambda s: _momentum_term(s, n) + s.q),
        r12=r12,
        r13=jump(lambda s: s.Hn),
        r14=r14,
        r15=jump(
            lambda s: s.j * (s.h * s.gamma + (s.H2 - s.q) / (s.rho * s.gamma)) - s.Hn * s.vH + s.vn * s.q
        ),
    )


def rh_residuals(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    geom: FrontGeometry,
) -> JumpResiduals:
    """Residuals of the mass, momentum, field and energy jump conditions"""
    return _residuals(_side(params, right, geom), _side(params, left, geom), geom)


def conservation_densities(params: ThermoParams, state: PrimitiveState) -> Dict[str, np.ndarray]:
    """Conserved densities of particle number, momentum, energy and field"""
    k = full_kinematics(params, state)
    v, H = state.v, state.H
    rhohG2 = k.rho * k.h * k.gamma_lorentz ** 2
    return {
        "mass": np.array([k.rho * k.gamma_lorentz]),
        "momentum": rhohG2 * v + (H @ H) * v - (v @ H) * H,
        "energy": np.array([rhohG2 + H @ H - k.q]),
        "induction": H.copy(),
    }


def conservation_fluxes(params: ThermoParams, state: PrimitiveState, n: np.ndarray) -> Dict[str, np.ndarray]:
    """Normal fluxes F(U).n of the same conservation laws"""
    k = full_kinematics(params, state)
    v, H = state.v, state.H
    u = k.u
    un = float(u @ n)
    vn = float(v @ n)
    bn = float(k.b @ n)
    return {
        "mass": np.array([k.rho * un]),
        "momentum": (k.rho * k.h + k.B2) * u * un - k.b * bn + k.q * n,
        "energy": np.array([k.rho * k.h * k.gamma_lorentz * un + (H @ H) * vn - (v @ H) * float(H @ n)]),
        "induction": vn * H - v * float(H @ n),
    }


CONSERVED_ORDER = ("mass", "momentum", "energy", "induction")


def conserved_vector(params: ThermoParams, U: np.ndarray, n: Optional[np.ndarray] = None) -> np.ndarray:
    """Densities (n is None) or normal fluxes as one 8-vector at unknowns U = (p, u, H, S)"""
    state = PrimitiveState.from_unknowns(U)
    parts = conservation_densities(params, state) if n is None else conservation_fluxes(params, state, n)
    return np.concatenate([parts[k] for k in CONSERVED_ORDER])


def flux_residuals(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    geom: FrontGeometry,
) -> Dict[str, np.ndarray]:
    """Weak-form jump -sigma[Q] + [F.n] for each conservation law"""
    Qp, Qm = conservation_densities(params, right), conservation_densities(params, left)
    Fp, Fm = conservation_fluxes(params, right, geom.n), conservation_fluxes(params, left, geom.n)
    return {k: -geom.sigma * (Qp[k] - Qm[k]) + (Fp[k] - Fm[k]) for k in Qp}


def flux_residuals_projected(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    geom: FrontGeometry,
) -> JumpResiduals:
    """Weak-form jumps arranged like ``JumpResiduals``
    
    The normal induction component is -sigma [H_n], so r13 is recovered by
    dividing by -sigma when sigma != 0 and taken from the field directly
    otherwise.
    """
    R = flux_residuals(params, left, right, geom)
    n = geom.n
    r13 = float(right.H @ n - left.H @ n)
    return JumpResiduals(
        r10=float(R["mass"][0]),
        r11=float(R["momentum"] @ n),
        r12=np.array([float(R["momentum"] @ t) for t in geom.tau]),
        r13=r13,
        r14=np.array([float(R["induction"] @ t) for t in geom.tau]),
        r15=float(R["energy"][0]),
    )


class DiscontinuityClass(str, Enum):
    CONTACT = "Contact"
    SHOCK = "Shock"
    CURRENT_VORTEX_SHEET = "CurrentVortexSheet"
    ALFVEN = "Alfven"
    NOT_A_DISCONTINUITY = "NotADiscontinuity"


def residual_scale(params: ThermoParams, left: PrimitiveState, right: PrimitiveState) -> float:
    """max(1, |state magnitudes|) used to normalize tolerances"""
    mags = [1.0]
    for st in (left, right):
        k = full_kinematics(params, st)
        mags += [abs(st.p), float(np.max(np.abs(st.H))), float(k.rho * k.h * k.gamma_lorentz ** 2)]
    return max(mags)


def decide_class(
    residual_norm: float,
    state_jump: float,
    j: float,
    Hn: float,
    rho_jump: float,
    tol: float,
) -> DiscontinuityClass:
    """Pure classification rule on already-normalized quantities"""
    if residual_norm > tol or state_jump <= tol:
        return DiscontinuityClass.NOT_A_DISCONTINUITY
    if abs(j) <= tol:
        if abs(Hn) > tol:
            return DiscontinuityClass.CONTACT
        return DiscontinuityClass.CURRENT_VORTEX_SHEET
    if abs(rho_jump) > tol:
        return DiscontinuityClass.SHOCK
    return DiscontinuityClass.ALFVEN


def classify(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    geom: FrontGeometry,
    tol: float = 1e-9,
) -> DiscontinuityClass:
    """Contact | Shock | CurrentVortexSheet | Alfven | NotADiscontinuity"""
    scale = residual_scale(params, left, right)
    res = rh_residuals(params, left, right, geom)
    plus, minus = _side(params, right, geom), _side(params, left, geom)
    state_jump = float(np.max(np.abs(right.unknowns() - left.unknowns())))
    result = decide_class(
        residual_norm=res.norm() / scale,
        state_jump=state_jump / scale,
        j=0.5 * (plus.j + minus.j) / scale,
        Hn=0.5 * (plus.Hn + minus.Hn) / scale,
        rho_jump=(plus.rho - minus.rho) / scale,
        tol=tol,
    )
    logger.debug(f"classified as {result.value} (residual {res.norm():.3g})")
    return result


@dataclass
class ReductionStep:
    """One link of the reduction: the jump it concludes and the equation it reads"""
    name: str
    residual: float
    passed: bool
    equation: float = 0.0


@dataclass
class ReductionReport:
    """Step-by-step check of {j = 0, H_n != 0, |sigma| < 1} => [p] = [v] = [H] = 0"""
    
    steps: List[ReductionStep] = field(default_factory=list)
    contact_residuals: Dict[str, float] = field(default_factory=dict)
    
    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)
    
    def failed_steps(self) -> List[str]:
        return [s.name for s in self.steps if not s.passed]
    
    @property
    def first_failure(self) -> Optional[str]:
        failed = self.failed_steps()
        return failed[0] if failed else None
    
    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "first_failure": self.first_failure,
            "steps": [
                {"name": s.name, "residual": s.residual, "equation": s.equation, "passed": s.passed}
                for s in self.steps
            ],
            "contact_residuals": self.contact_residuals,
        }


def contact_reduction_check(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    geom: FrontGeometry,
    tol: float = 1e-9,
) -> ReductionReport:
    """Walk the chain (10) -> (14) -> (12) -> (16) -> (13) -> (11) on the given traces

    Each step feeds the hypotheses gathered so far into one jump condition
    and reports the jump that condition then determines (``residual``) next
    to the full left-hand side of the condition on the data (``equation``).
    With j = 0 and a common H_n:

        (14) reads -H_n [v_tau] = 0,
        (12) with [v] = 0 reads -H_n (1 - sigma^2)[H_tau] = 0,
        (11) with [v] = [H] = 0 reads [q] = [p] = 0.

    The first failed step names the broken link.
    """
    if not geom.is_causal:
        raise CausalityError(f"front speed |sigma| = {abs(geom.sigma):.6g} >= 1")
    scale = residual_scale(params, left, right)
    plus, minus = _side(params, right, geom), _side(params, left, geom)
    if max(abs(plus.j), abs(minus.j)) > tol * scale:
        raise PreconditionError(f"mass flux j = {plus.j:.3g} is not zero", condition="(10)")
    if min(abs(plus.Hn), abs(minus.Hn)) <= tol * scale:
        raise PreconditionError(f"H_n = {plus.Hn:.3g} vanishes", condition="(mf.1)")
    
    def jump(fn):
        return fn(plus) - fn(minus)
    
    res = _residuals(plus, minus, geom)
    Hn = 0.5 * (plus.Hn + minus.Hn)
    
    # (10): j+- = 0 puts both normal velocities on sigma
    vn_jump = abs(plus.vn - minus.vn)
    sigma_gap = max(abs(plus.vn - geom.sigma), abs(minus.vn - geom.sigma))
    
    # (14) without its j term
    reduced14 = res.r14 - np.array([jump(lambda s, t=t: s.j * float(s.H @ t) / (s.rho * s.gamma)) for t in geom.tau])
    vtau_jump = -reduced14 / Hn
    
    # (12) without its j term, divided by -H_n: (1 - sigma^2)[H_tau] once [v] = [H_n] = 0
    reduced12 = res.r12 - np.array([jump(lambda s, t=t: s.j * _advected_momentum(s, t)) for t in geom.tau])
    htau_scaled = -reduced12 / Hn
    htau_jump = htau_scaled / (1.0 - geom.sigma ** 2)
    
    dH = right.H - left.H
    # (11) without its j and H_n terms leaves [q]
    q_jump = res.r11 - jump(lambda s: s.j * _advected_momentum(s, geom.n)) + jump(
        lambda s: s.Hn * (s.Hn / s.gamma ** 2 + s.vH * s.vn)
    )
    
    chain = [
        ("(10) [v_n] = 0", vn_jump, sigma_gap),
        ("(13) [H_n] = 0", abs(res.r13), abs(res.r13)),
        ("(14) [v_tau] = 0", float(np.max(np.abs(vtau_jump))), float(np.max(np.abs(res.r14)))),
        ("(16) (1-sigma^2)[H_tau] = 0", float(np.max(np.abs(htau_scaled))), float(np.max(np.abs(res.r12)))),
        ("(16) |sigma| < 1 gives [H_tau] = 0", float(np.max(np.abs(htau_jump))), 1.0 - geom.sigma ** 2),
        ("(13) [H] = 0", float(np.max(np.abs(dH))), abs(res.r13)),
        ("(11) [p] = 0", abs(q_jump), abs(res.r11)),
        ("(15) energy", abs(res.r15), abs(res.r15)),
    ]
    report = ReductionReport()
    for name, r, eq in chain:
        report.steps.append(ReductionStep(name, float(r), bool(r <= tol * scale), float(eq)))
    report.contact_residuals = {
        "[p]": float(right.p - left.p),
        "[v]": float(np.max(np.abs(right.v - left.v))),
        "[H]": float(np.max(np.abs(dH))),
    }
    if not report.passed:
        logger.debug(f"contact reduction breaks at {report.first_failure}")
    return report


def contact_partner(
    params: ThermoParams,
    left: PrimitiveState,
    entropy_jump: float,
    d2phi: float = 0.0,
) -> Tuple[PrimitiveState, FrontGeometry]:
    """Omega+ state and front forming a contact discontinuity with ``left``
    
    p, v and H are copied, S jumps by ``entropy_jump`` and dt phi = v_N.
    """
    vN = float(left.v[0] - left.v[1] * d2phi)
    right = left.with_(S=left.S + entropy_jump)
    return right, FrontGeometry.from_slopes(vN, d2phi)


def _planar_vector(state: PrimitiveState) -> Dict[str, float]:
    return dict(zip(PLANAR_FIELDS, (state.p, state.v[0], state.v[1], state.H[0], state.H[1], state.S)))


def _planar_state(values: Dict[str, float]) -> PrimitiveState:
    return PrimitiveState(
        p=values["p"],
        v=(values["v1"], values["v2"]),
        H=(values["H1"], values["H2"]),
        S=values["S"],
    )


def rh_partner(
    params: ThermoParams,
    left: PrimitiveState,
    geom: FrontGeometry,
    fixed: Optional[Dict[str, float]] = None,
    guess: Optional[PrimitiveState] = None,
    tol: float = 1e-10,
) -> PrimitiveState:
    """Solve the planar jump conditions for the Omega+ state
    
    Args:
        params: EOS parameters
        left: Omega- state
        geom: front geometry
        fixed: right-state fields held fixed (names from ``PLANAR_FIELDS``)
        guess: starting point; defaults to ``left``
        tol: acceptance threshold on the normalized residual
    
    Returns:
        Omega+ state satisfying the jump conditions
    """
    fixed = dict(fixed or {})
    unknown = [k for k in PLANAR_FIELDS if k not in fixed]
    start = _planar_vector(guess if guess is not None else left)
    x0 = np.array([start[k] for k in unknown])
    scale = residual_scale(params, left, left)
    
    def residual(x: np.ndarray) -> np.ndarray:
        values = dict(fixed)
        values.update(zip(unknown, x))
        if values["p"] <= 0.0 or values["v1"] ** 2 + values["v2"] ** 2 >= 1.0:
            return np.full(6, 1e3)
        return rh_residuals(params, left, _planar_state(values), geom).as_vector() / scale
    
    if len(unknown) == 6:
        sol = optimize.root(residual, x0, method="hybr", options={"xtol": 1e-14})
    else:
        sol = optimize.root(residual, x0, method="lm", options={"xtol": 1e-15, "ftol": 1e-15})
    values = dict(fixed)
    values.update(zip(unknown, sol.x))
    final = float(np.max(np.abs(residual(sol.x))))
    if not np.isfinite(final) or final > tol:
        logger.warning(f"⚠️ jump-condition partner did not converge: residual {final:.3g} ({sol.message})")
        raise SolverError(f"jump-condition partner did not converge: residual {final:.3g}", condition="rh-partner")
    return _planar_state(values)
