"""Linearized contact problem on the half-strip

Interior: second-order central differences for L'_e plus fourth-order
artificial dissipation, advanced by the two-stage scheme. Boundary x1 = 0:
per node, the outgoing and zero-speed characteristic combinations of each
side are kept from the interior update and four jump conditions are imposed;
the fifth condition advances the front perturbation phi. Far boundary:
zero-order extrapolation unless exact data are supplied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple
import logging

import numpy as np

from app.errors import ConfigError, PreconditionError, SolverError
from app.linear.basic_state import H1, H2, MINUS, P, PLUS, U1, U2, BasicState
from app.linear.lifting import g6_rhs, lift_boundary_data, normal_source_jump
from app.linear.operators import PerturbationFields
from app.linear.quadratic import boundary_quadratic_form, rt_boundary_term
from app.physics.characteristics import generalized_eigh
from app.solver.grid import (
    Grid,
    d1,
    d2_periodic,
    fourth_difference_interior,
    fourth_difference_periodic,
    ssp_rk2_step,
    trapezoid_weights,
)
from app.solver.monitors import DiagnosticsSeries, constraint_monitors, energy_norms

logger = logging.getLogger(__name__)

KEPT_PER_SIDE = 4


class LiftingMode(str, Enum):
    DIRECT = "direct"
    LIFTED = "lifted"
    LIFTED_NO_G6 = "lifted_no_g6"


Field = Callable[[float], np.ndarray]


@dataclass
class SourceTerms:
    """Interior source f(t) (2, n1 + 1, n2, 6) and boundary data g(t) (5, n2)
    
    ``exact`` returns (U-dot*, phi*) for manufactured runs; it closes the far
    boundary and gives the error at T.
    """
    
    f: Field
    g: Field
    dtg: Optional[Field] = None
    exact: Optional[Callable[[float], Tuple[np.ndarray, np.ndarray]]] = None
    
    @classmethod
    def zero(cls, basic: BasicState) -> "SourceTerms":
        shape_f, shape_g = basic.U.shape, (5, basic.n2)
        return cls(f=lambda t: np.zeros(shape_f), g=lambda t: np.zeros(shape_g), dtg=lambda t: np.zeros(shape_g))
    
    def boundary_rate(self, t: float, dt: float = 1e-6) -> np.ndarray:
        if self.dtg is not None:
            return self.dtg(t)
        return (self.g(t + dt) - self.g(t - dt)) / (2.0 * dt)


@dataclass
class ScenarioConfig:
    """Everything a linearized run needs"""
    
    name: str
    basic: BasicState
    sources: SourceTerms
    grid: Grid
    mode: LiftingMode = LiftingMode.DIRECT
    dissipation: float = 0.01
    cadence: int = 1
    bound_K: float = 10.0
    
    def __post_init__(self):
        b, g = self.basic, self.grid
        if (b.n1, b.n2) != (g.n1, g.n2) or not np.isclose(b.h1, g.h1):
            raise ConfigError(f"grid {g.n1}x{g.n2} does not match basic state {b.n1}x{b.n2}", condition="grid")
        if self.cadence < 1:
            raise ConfigError(f"cadence must be >= 1, got {self.cadence}")
        self.mode = LiftingMode(self.mode)


@dataclass
class LinearRunResult:
    series: DiagnosticsSeries
    Udot: np.ndarray
    phi: np.ndarray
    solved: np.ndarray
    g6: np.ndarray
    grid: Grid
    errors: Dict[str, float] = field(default_factory=dict)


class BoundaryClosure:
    """Per-node 12x12 closure at x1 = 0
    
    Rows 0-7 reproduce the kept characteristic combinations r^T A0 Y of both
    sides (eigenvalue <= 0 of the side pencil), rows 8-11 impose
    [p], [v1], [v2], [H_tau].
    """
    
    def __init__(self, basic: BasicState, rtol: float = 1e-9):
        n2 = basic.n2
        self.rows = np.zeros((n2, 2 * KEPT_PER_SIDE, 12))
        M = np.zeros((n2, 12, 12))
        for j in range(n2):
            for side in (PLUS, MINUS):
                K = basic.At1[side, 0, j]
                A0 = basic.A0[side, 0, j]
                lam, R = generalized_eigh(K, A0)
                kept = lam <= rtol * np.max(np.abs(lam))
                if int(np.sum(kept)) != KEPT_PER_SIDE:
                    raise PreconditionError(
                        f"node {j}: {int(np.sum(kept))} non-incoming modes on side {side}, expected {KEPT_PER_SIDE}",
                        condition="(mf.1)",
                    )
                r = slice(side * KEPT_PER_SIDE, (side + 1) * KEPT_PER_SIDE)
                c = slice(side * 6, (side + 1) * 6)
                self.rows[j, r, c] = R[:, kept].T @ A0
        M[:, :8] = self.rows
        
        s = basic.d2phi
        v = basic.v[:, 0]
        gamma = basic.lorentz[:, 0]
        M[:, 8, P] = 1.0
        M[:, 8, 6 + P] = -1.0
        for side, sign in ((PLUS, 1.0), (MINUS, -1.0)):
            proj = (np.eye(2) - v[side][:, :, None] * v[side][:, None, :]) / gamma[side][:, None, None]
            off = 6 * side
            M[:, 9:11, off + U1:off + U2 + 1] = sign * proj
            M[:, 11, off + H1] = sign * s
            M[:, 11, off + H2] = sign
        cond = np.linalg.cond(M)
        if not np.all(np.isfinite(cond)) or np.max(cond) > 1e12:
            raise PreconditionError(f"boundary closure singular (cond {np.max(cond):.3g})", condition="(mf.1)")
        self.Minv = np.linalg.inv(M)
    
    def apply(self, provisional: np.ndarray, jumps: np.ndarray) -> np.ndarray:
        """Boundary traces (2, n2, 6) from provisional traces and the four jump values (4, n2)"""
        Y = provisional.transpose(1, 0, 2).reshape(-1, 12)
        rhs = np.concatenate([np.einsum("nij,nj->ni", self.rows, Y), jumps.T], axis=1)
        out = np.einsum("nij,nj->ni", self.Minv, rhs)
        return out.reshape(-1, 2, 6).transpose(1, 0, 2)


class LinearizedSolver:
    """One run of the linearized problem; state is (V, phi, g6)"""
    
    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.basic = config.basic
        self.grid = config.grid
        self.mode = config.mode
        self.eps = config.dissipation
        self.closure = BoundaryClosure(self.basic)
        self.v2_plus = self.basic.v[PLUS, 0, :, 1]
    
    # sources seen by the solved unknown
    
    def _lift(self, t: float, g6: np.ndarray):
        src = self.config.sources
        # the control keeps g6 frozen, so its rate is zero too
        dtg6 = np.zeros_like(g6) if self.mode is LiftingMode.LIFTED_NO_G6 else None
        return lift_boundary_data(self.basic, src.g(t), src.boundary_rate(t), src.f(t), g6, dtg6)
    
    def effective_source(self, t: float, g6: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(f seen by V, boundary data seen by V)"""
        src = self.config.sources
        if self.mode is LiftingMode.DIRECT:
            return src.f(t), src.g(t)
        return self._lift(t, g6).f, np.zeros((5, self.basic.n2))
    
    def rhs(self, t: float, state):
        V, phi, g6 = state
        b = self.basic
        f, g = self.effective_source(t, g6)
        flux = (
            b.apply(b.At1, d1(V, b.h1, axis=1))
            + b.apply(b.A2, d2_periodic(V, b.h2, axis=2))
            + b.apply(b.C, V)
        )
        dV = b.apply(b.A0inv, f - flux)
        dV -= self.eps * (fourth_difference_periodic(V, axis=2) / b.h2 + fourth_difference_interior(V, axis=1) / b.h1)
        
        pert = PerturbationFields(V, phi)
        vN_plus = pert.vdot_N(b)[PLUS, 0]
        dphi = (
            -self.v2_plus * d2_periodic(phi, b.h2) + vN_plus + phi * b.d1vN_plus + g[4]
            - self.eps * fourth_difference_periodic(phi, axis=0) / b.h2
        )
        if self.mode is LiftingMode.LIFTED:
            dg6 = g6_rhs(g6, self.v2_plus, normal_source_jump(b, self.config.sources.f(t)), b.h2)
        else:
            dg6 = np.zeros_like(g6)
        return dV, dphi, dg6
    
    def project(self, t: float, state):
        V, phi, g6 = state
        b = self.basic
        V = V.copy()
        _, g = self.effective_source(t, g6)
        jumps = np.stack([
            g[0] - phi * b.jump_d1p,
            g[1],
            g[2],
            g[3] - phi * b.jump_d1Htau,
        ])
        V[:, 0] = self.closure.apply(V[:, 0], jumps)
        exact = self.config.sources.exact
        if exact is not None:
            far = exact(t)[0][:, -1]
            if self.mode is not LiftingMode.DIRECT:
                far = far - self._lift(t, g6).U[:, -1]
            V[:, -1] = far
        else:
            V[:, -1] = V[:, -2]
        return V, phi, g6
    
    def total(self, t: float, state) -> Tuple[np.ndarray, np.ndarray]:
        """U-dot = V + U-tilde and its time derivative"""
        V, phi, g6 = state
        dV, dphi, _ = self.rhs(t, state)
        if self.mode is LiftingMode.DIRECT:
            return V, dV
        lifted = self._lift(t, g6)
        return V + lifted.U, dV + lifted.dtU
    
    def record(self, step: int, t: float, state) -> Dict[str, float]:
        V, phi, g6 = state
        b = self.basic
        _, dphi, _ = self.rhs(t, state)
        Udot, dUdot = self.total(t, state)
        solved = PerturbationFields(V, phi, dphi)
        rec = {"step": step, "t": t}
        rec.update(energy_norms(b, Udot, dUdot, phi, dphi))
        rec.update(constraint_monitors(
            b, PerturbationFields(Udot, phi, dphi), PerturbationFields(dUdot, dphi), self.config.sources.f(t), g6,
        ))
        rec["rt_term"] = rt_boundary_term(b, phi)
        rec["boundary_flux"] = float(np.sum(boundary_quadratic_form(b, solved).direct) * b.h2)
        rec["g6_norm"] = float(np.sqrt(np.sum(g6 * g6) * b.h2))
        return rec
    
    def run(self) -> LinearRunResult:
        b, grid = self.basic, self.grid
        n2 = b.n2
        state = (np.zeros_like(b.U), np.zeros(n2), np.zeros(n2))
        series = DiagnosticsSeries()
        dt, n_steps = grid.dt, grid.n_steps
        logger.info(f"🚀 linearized run '{self.config.name}' ({self.mode.value}) on {grid.n1}x{grid.n2}, {n_steps} steps")
        
        series.append(self.record(0, 0.0, state))
        t = 0.0
        for step in range(1, n_steps + 1):
            state = ssp_rk2_step(self.rhs, state, t, dt, project=self.project)
            t = step * dt
            if not all(np.all(np.isfinite(a)) for a in state):
                raise SolverError(f"non-finite values in '{self.config.name}'", condition="NaN", step=step)
            if step % self.config.cadence == 0 or step == n_steps:
                series.append(self.record(step, t, state))
        
        Udot, _ = self.total(t, state)
        result = LinearRunResult(series, Udot, state[1], state[0], state[2], grid)
        exact = self.config.sources.exact
        if exact is not None:
            U_star, phi_star = exact(t)
            w1 = trapezoid_weights(grid.n1 + 1, grid.h1)
            err = Udot - U_star
            result.errors["l2_U"] = float(np.sqrt(np.sum(np.sum(err * err, axis=-1) * w1[None, :, None]) * grid.h2))
            result.errors["l2_phi"] = float(np.sqrt(np.sum((state[1] - phi_star) ** 2) * grid.h2))
        logger.info(f"✅ run '{self.config.name}' finished at t={t:.4g}, I={series.last()['I']:.6g}")
        return result


def run_linearized(config: ScenarioConfig, check_basic_state: bool = True) -> LinearRunResult:
    """Advance (U-dot, phi) from zero data to T
    
    Args:
        config: basic state, sources, grid and lifting mode
        check_basic_state: audit the basic state and its boundary signature first
    
    Returns:
        LinearRunResult with the diagnostics series and final fields
    """
    config.grid.check_cfl(1.0)
    if check_basic_state:
        config.basic.require_admissible(bound_K=config.bound_K)
        sig = config.basic.boundary_signature()
        counts = {(int(a), int(b), int(c)) for a, b, c in zip(sig["n_pos"], sig["n_neg"], sig["n_zero"])}
        if counts != {(4, 4, 4)}:
            raise PreconditionError(f"boundary signature {sorted(counts)} differs from (4, 4, 4)", condition="(mf.1)")
    return LinearizedSolver(config).run()
