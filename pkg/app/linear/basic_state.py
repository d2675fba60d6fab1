"""Gridded basic state and its derived coefficient fields

Fields are stored in shifted planar unknowns (p, u1, u2, H1, H2, S) as one
array of shape (2, n1 + 1, n2, 6): side 0 is Omega+, side 1 is Omega-,
both on the straightened half-strip [0, L1] x T. The basic state is steady.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence
import logging

import numpy as np

from app.errors import ConfigError, DomainError, PreconditionError
from app.interface.audit import AuditReport, audit_basic_state
from app.interface.front import Cutoff, FrontFunction, normal_jump
from app.physics import symmetrizer
from app.physics.characteristics import boundary_signature_batch
from app.physics.eos import ThermoParams
from app.physics.kinematics import lorentz_extend, velocity_from_u
from app.solver.grid import d1, d2_periodic

logger = logging.getLogger(__name__)

PLUS, MINUS = 0, 1
SIDES = ("+", "-")
P, U1, U2, H1, H2, S = range(6)


@dataclass(frozen=True)
class ShiftConstants:
    """U-bar = (pbar, 0, 0, S-bar) per side"""
    
    pbar: float
    S_plus: float = 0.0
    S_minus: float = 0.0
    
    def vector(self) -> np.ndarray:
        out = np.zeros((2, 6))
        out[:, P] = self.pbar
        out[PLUS, S] = self.S_plus
        out[MINUS, S] = self.S_minus
        return out


def perturbation_velocity(u_dot: np.ndarray, v_hat: np.ndarray) -> np.ndarray:
    """v-dot = (u-dot - (v.u-dot) v) / Gamma, batched; the linearization of v(u)"""
    u_dot = np.asarray(u_dot, dtype=float)
    v_hat = np.asarray(v_hat, dtype=float)
    gamma, _ = lorentz_extend(v_hat)
    vu = np.sum(v_hat * u_dot, axis=-1)[..., None]
    return (u_dot - vu * v_hat) / gamma[..., None]


@dataclass
class BasicState:
    """Frozen background (U-hat, phi-hat) of the linearized problem"""
    
    params: ThermoParams
    U: np.ndarray
    front: FrontFunction
    h1: float
    shift: ShiftConstants
    cutoff: Cutoff = field(default_factory=Cutoff)
    
    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float)
        if self.U.ndim != 4 or self.U.shape[0] != 2 or self.U.shape[-1] != 6:
            raise ConfigError(f"basic state must have shape (2, n1+1, n2, 6), got {self.U.shape}")
        if self.U.shape[2] != self.front.n2:
            raise ConfigError(f"front has {self.front.n2} nodes, basic state {self.U.shape[2]}")
        if not np.all(np.isfinite(self.U)):
            raise DomainError("basic state contains non-finite values", condition="finite")
        if np.min(self.real[..., P]) <= 0.0:
            raise DomainError(f"basic state pressure not positive (min {np.min(self.real[..., P]):.6g})")
        self.front.check()
    
    @classmethod
    def from_profiles(
        cls,
        params: ThermoParams,
        profile: Callable[[int, np.ndarray, np.ndarray], np.ndarray],
        n1: int,
        n2: int,
        L1: float,
        shift: ShiftConstants,
        front: Optional[FrontFunction] = None,
        cutoff: Optional[Cutoff] = None,
    ) -> "BasicState":
        """Sample ``profile(side, X1, X2) -> (..., 6)`` on the grid"""
        x1 = np.linspace(0.0, L1, n1 + 1)
        x2 = np.arange(n2) / n2
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        U = np.stack([np.broadcast_to(profile(side, X1, X2), X1.shape + (6,)) for side in (PLUS, MINUS)])
        return cls(params, U, front or FrontFunction.flat(n2), L1 / n1, shift, cutoff or Cutoff())
    
    @classmethod
    def constant(
        cls,
        params: ThermoParams,
        p: float,
        v: Sequence[float],
        H: Sequence[float],
        S_plus: float,
        S_minus: float,
        n1: int,
        n2: int,
        L1: float,
    ) -> "BasicState":
        """Uniform contact state with an entropy jump and a flat front"""
        _, u = lorentz_extend(np.asarray(v, dtype=float))
        row = np.array([p - params.pbar, u[0], u[1], H[0], H[1], 0.0])
        shift = ShiftConstants(params.pbar, S_plus, S_minus)
        return cls.from_profiles(params, lambda side, X1, X2: row, n1, n2, L1, shift)
    
    # geometry
    
    @property
    def n1(self) -> int:
        return self.U.shape[1] - 1
    
    @property
    def n2(self) -> int:
        return self.U.shape[2]
    
    @property
    def h2(self) -> float:
        return 1.0 / self.n2
    
    @cached_property
    def x1(self) -> np.ndarray:
        return np.arange(self.n1 + 1) * self.h1
    
    @cached_property
    def chi(self) -> np.ndarray:
        return self.cutoff(self.x1)[:, None]
    
    @cached_property
    def dchi(self) -> np.ndarray:
        return self.cutoff.derivative(self.x1)[:, None]
    
    @cached_property
    def d2phi(self) -> np.ndarray:
        return self.front.d2phi()
    
    @cached_property
    def ell(self) -> np.ndarray:
        return np.sqrt(1.0 + self.d2phi ** 2)
    
    @cached_property
    def Psi(self) -> np.ndarray:
        """Psi-hat on both sides, (n1 + 1, n2); chi is even"""
        return self.chi * self.front.phi
    
    @cached_property
    def dtPsi(self) -> np.ndarray:
        return self.chi * self.front.dtphi
    
    @cached_property
    def d2Psi(self) -> np.ndarray:
        return self.chi * self.d2phi
    
    @cached_property
    def d1Phi(self) -> np.ndarray:
        """(2, n1 + 1, n2): 1 + chi' phi and -1 + chi' phi"""
        lift = self.dchi * self.front.phi
        return np.stack([1.0 + lift, -1.0 + lift])
    
    # state fields
    
    @cached_property
    def real(self) -> np.ndarray:
        return self.U + self.shift.vector()[:, None, None, :]
    
    @cached_property
    def unknowns(self) -> np.ndarray:
        """Real state as (2, n1 + 1, n2, 8) unknowns with u3 = H3 = 0"""
        return symmetrizer.embed_planar(self.real)
    
    @cached_property
    def v(self) -> np.ndarray:
        return velocity_from_u(self.U[..., U1:U2 + 1])
    
    @cached_property
    def lorentz(self) -> np.ndarray:
        return lorentz_extend(self.v)[0]
    
    @cached_property
    def d1U(self) -> np.ndarray:
        return d1(self.U, self.h1, axis=1)
    
    @cached_property
    def d2U(self) -> np.ndarray:
        return d2_periodic(self.U, self.h2, axis=2, order=4)
    
    @cached_property
    def d1v(self) -> np.ndarray:
        return perturbation_velocity(self.d1U[..., U1:U2 + 1], self.v)
    
    @cached_property
    def vN(self) -> np.ndarray:
        return self.v[..., 0] - self.v[..., 1] * self.d2Psi
    
    @cached_property
    def HN(self) -> np.ndarray:
        return self.U[..., H1] - self.U[..., H2] * self.d2Psi
    
    @cached_property
    def Htau(self) -> np.ndarray:
        return self.U[..., H1] * self.d2Psi + self.U[..., H2]
    
    @cached_property
    def w(self) -> np.ndarray:
        """w-hat = (v_N - dt Psi, v2 d1 Phi)"""
        return np.stack([self.vN - self.dtPsi, self.v[..., 1] * self.d1Phi], axis=-1)
    
    @cached_property
    def h_field(self) -> np.ndarray:
        """h-hat = (H_N, H2 d1 Phi)"""
        return np.stack([self.HN, self.U[..., H2] * self.d1Phi], axis=-1)
    
    # boundary quantities at x1 = 0
    
    @cached_property
    def sigma(self) -> np.ndarray:
        """Normalized front speed v_N+ / ell"""
        return self.vN[PLUS, 0] / self.ell
    
    @cached_property
    def sigma_tau(self) -> np.ndarray:
        v = self.v[PLUS, 0]
        return (v[:, 0] * self.d2phi + v[:, 1]) / self.ell
    
    @cached_property
    def jump_d1p(self) -> np.ndarray:
        return normal_jump(self.d1U[PLUS, 0, :, P], self.d1U[MINUS, 0, :, P])
    
    @cached_property
    def jump_d1Htau(self) -> np.ndarray:
        d = self.d1U[:, 0]
        d1Htau = d[..., H1] * self.d2phi + d[..., H2]
        return normal_jump(d1Htau[PLUS], d1Htau[MINUS])
    
    @cached_property
    def jump_d1v(self) -> np.ndarray:
        return normal_jump(self.d1v[PLUS, 0], self.d1v[MINUS, 0])
    
    @cached_property
    def d1vN_plus(self) -> np.ndarray:
        d = self.d1v[PLUS, 0]
        return d[:, 0] - d[:, 1] * self.d2phi
    
    # coefficient matrices, planar 6x6 per node
    
    @cached_property
    def matrices(self):
        A0, A1, A2 = symmetrizer.assemble_unknowns(self.params, self.unknowns, dims=2)
        return symmetrizer.planar(A0), symmetrizer.planar(A1), symmetrizer.planar(A2)
    
    @property
    def A0(self) -> np.ndarray:
        return self.matrices[0]
    
    @property
    def A2(self) -> np.ndarray:
        return self.matrices[2]
    
    def straightened(self, A0: np.ndarray, A1: np.ndarray, A2: np.ndarray) -> np.ndarray:
        """(A1 - A0 dt Psi - A2 d2 Psi) / d1 Phi for node-shaped matrix fields"""
        dtPsi, d2Psi = self.dtPsi[..., None, None], self.d2Psi[..., None, None]
        return (A1 - A0 * dtPsi - A2 * d2Psi) / self.d1Phi[..., None, None]
    
    @cached_property
    def At1(self) -> np.ndarray:
        A0, A1, A2 = self.matrices
        return self.straightened(A0, A1, A2)
    
    @cached_property
    def C(self) -> np.ndarray:
        """Lower-order matrix: column k is C e_k"""
        C = np.zeros(self.U.shape + (6,))
        for k in range(6):
            Y = np.zeros(6)
            Y[k] = 1.0
            dA0, dA1, dA2, _ = symmetrizer.directional_derivatives(
                self.params, self.unknowns, symmetrizer.embed_planar(Y)
            )
            dA0, dA1, dA2 = (symmetrizer.planar(a) for a in (dA0, dA1, dA2))
            dAt1 = self.straightened(dA0, dA1, dA2)
            C[..., k] = np.einsum("...ij,...j->...i", dAt1, self.d1U) + np.einsum("...ij,...j->...i", dA2, self.d2U)
        return C
    
    @cached_property
    def A0inv(self) -> np.ndarray:
        return np.linalg.inv(self.A0)
    
    def apply(self, M: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.einsum("...ij,...j->...i", M, Y)
    
    def residual_field(self) -> np.ndarray:
        """L(U-hat, Psi-hat) U-hat = A0 dt U + At1 d1 U + A2 d2 U (steady, so no dt term)"""
        return self.apply(self.At1, self.d1U) + self.apply(self.A2, self.d2U)
    
    # checks
    
    def audit(self, bound_K: float = 10.0, tol: float = 1e-9) -> AuditReport:
        return audit_basic_state(
            self.params, self.U[PLUS], self.U[MINUS], self.front, self.h1, self.cutoff, bound_K=bound_K, tol=tol
        )
    
    def require_admissible(self, bound_K: float = 10.0, tol: float = 1e-9) -> AuditReport:
        """Audit and raise on the conditions the linearized solver cannot run without"""
        report = self.audit(bound_K, tol)
        hard = ("(fi)", "(a5)", "(ls)", "(a12')", "(cdass)", "(jc1')", "(15.1)")
        bad = [k for k in hard if not report.checks[k].passed]
        if bad:
            raise PreconditionError(f"basic state fails {', '.join(bad)}: {report.failures()}", condition=bad[0])
        for k in ("(RTL)", "(14.1)", "(a22)", "(vn)"):
            if not report.checks[k].passed:
                logger.warning(f"⚠️ basic state fails {k} (margin {report.checks[k].margin:.3g})")
        return report
    
    def boundary_signature(self, rtol: float = 1e-9) -> dict:
        """Signature of the boundary pencil at every boundary node"""
        trace = self.unknowns[:, 0]
        return boundary_signature_batch(
            self.params, trace[PLUS], trace[MINUS], self.d2phi, self.front.dtphi, rtol=rtol
        )


@dataclass(frozen=True)
class BasicPoint:
    """Basic state and its first derivatives at one node, real planar unknowns"""
    
    params: ThermoParams
    U: np.ndarray
    d1U: np.ndarray
    d2U: np.ndarray
    dtU: np.ndarray
    dtPsi: float = 0.0
    d2Psi: float = 0.0
    d1Phi: float = 1.0
    
    @classmethod
    def from_basic(cls, basic: BasicState, side: int, i: int, j: int) -> "BasicPoint":
        return cls(
            params=basic.params,
            U=basic.real[side, i, j].copy(),
            d1U=basic.d1U[side, i, j].copy(),
            d2U=basic.d2U[side, i, j].copy(),
            dtU=np.zeros(6),
            dtPsi=float(basic.dtPsi[i, j]),
            d2Psi=float(basic.d2Psi[i, j]),
            d1Phi=float(basic.d1Phi[side, i, j]),
        )
