"""Quasilinear symmetric RMHD system on the periodic unit torus

    A0(U) dt U + A1(U) d1 U + A2(U) d2 U = 0,   U = (p, u, H, S) in R^8

Central differences, fourth-order dissipation and the two-stage scheme.
Planar data (u3 = H3 = 0) stay planar to the last bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional
import logging

import numpy as np

from app.errors import ConfigError, SolverError
from app.physics import symmetrizer
from app.physics.eos import ThermoParams
from app.physics.kinematics import velocity_from_u
from app.solver.grid import d2_periodic, fourth_difference_periodic, ssp_rk2_step
from app.solver.monitors import DiagnosticsSeries

logger = logging.getLogger(__name__)

W_INDEX = (3, 6)


@dataclass
class PeriodicConfig:
    """n x n torus run of the nonlinear system"""
    
    params: ThermoParams
    U0: np.ndarray
    n_steps: Optional[int] = None
    T: Optional[float] = None
    cfl: float = 0.25
    dissipation: float = 0.01
    cadence: int = 1
    name: str = "periodic"
    
    def __post_init__(self):
        self.U0 = np.asarray(self.U0, dtype=float)
        if self.U0.ndim != 3 or self.U0.shape[-1] != 8 or self.U0.shape[0] != self.U0.shape[1]:
            raise ConfigError(f"initial data must have shape (n, n, 8), got {self.U0.shape}")
        if (self.n_steps is None) == (self.T is None):
            raise ConfigError("give exactly one of n_steps and T")
        if self.cadence < 1:
            raise ConfigError(f"cadence must be >= 1, got {self.cadence}")
    
    @property
    def n(self) -> int:
        return self.U0.shape[0]
    
    @property
    def h(self) -> float:
        return 1.0 / self.n
    
    @property
    def dt(self) -> float:
        if self.T is not None:
            return self.T / self.steps
        return self.cfl * self.h
    
    @property
    def steps(self) -> int:
        if self.n_steps is not None:
            return self.n_steps
        return max(1, int(np.ceil(self.T / (self.cfl * self.h) - 1e-12)))


@dataclass
class PeriodicRunResult:
    series: DiagnosticsSeries
    U: np.ndarray
    t: float
    summary: Dict[str, float] = field(default_factory=dict)


def divergence(H: np.ndarray, h: float) -> np.ndarray:
    """Central div H on the torus"""
    return d2_periodic(H[..., 0], h, axis=0) + d2_periodic(H[..., 1], h, axis=1)


def planar_data(
    n: int,
    p: Callable[[np.ndarray, np.ndarray], np.ndarray],
    u: Callable[[np.ndarray, np.ndarray], np.ndarray],
    H: Callable[[np.ndarray, np.ndarray], np.ndarray],
    S: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> np.ndarray:
    """Sample planar initial data on an n x n grid"""
    x = np.arange(n) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    U = np.zeros((n, n, 8))
    U[..., 0] = p(X, Y)
    U[..., 1:3] = u(X, Y)
    U[..., 4:6] = H(X, Y)
    U[..., 7] = S(X, Y)
    return U


def smooth_planar_data(n: int, amplitude: float = 0.2) -> np.ndarray:
    """p = 1 + a sin sin, H = uniform + curl of 0.1 cos cos, gentle shear flow"""
    tau = 2.0 * np.pi
    
    def field_(X, Y):
        # H = (0.5, 0.3) + (dA/dy, -dA/dx), A = 0.1 cos(2 pi x) cos(2 pi y)
        H1 = 0.5 - 0.1 * tau * np.cos(tau * X) * np.sin(tau * Y)
        H2 = 0.3 + 0.1 * tau * np.sin(tau * X) * np.cos(tau * Y)
        return np.stack([H1, H2], axis=-1)
    
    return planar_data(
        n,
        p=lambda X, Y: 1.0 + amplitude * np.sin(tau * X) * np.sin(tau * Y),
        u=lambda X, Y: np.stack([0.1 * np.sin(tau * Y), 0.1 * np.sin(tau * X)], axis=-1),
        H=field_,
        S=lambda X, Y: 0.1 * np.cos(tau * X),
    )


class PeriodicSolver:
    def __init__(self, config: PeriodicConfig):
        self.config = config
        self.params = config.params
        self.h = config.h
        self.p_floor = 0.75 * self.params.pbar
        self.reference = config.U0.mean(axis=(0, 1))
    
    def _check(self, U: np.ndarray, step: int) -> None:
        if not np.all(np.isfinite(U)):
            raise SolverError("non-finite values", condition="NaN", step=step)
        p_min = float(np.min(U[..., 0]))
        if p_min <= self.p_floor:
            raise SolverError(f"pressure {p_min:.4g} reached 3 pbar/4", condition="(5.1')", step=step)
        speed = np.sqrt(np.sum(velocity_from_u(U[..., 1:4]) ** 2, axis=-1))
        if np.max(speed) >= 1.0:
            raise SolverError("|v| reached 1", condition="|v|<1", step=step)
    
    def rhs(self, t: float, state):
        (U,) = state
        h, eps = self.h, self.config.dissipation
        A0, A1, A2 = symmetrizer.assemble_unknowns(self.params, U, dims=2)
        flux = (
            np.einsum("...ij,...j->...i", A1, d2_periodic(U, h, axis=0))
            + np.einsum("...ij,...j->...i", A2, d2_periodic(U, h, axis=1))
        )
        dU = -np.linalg.solve(A0, flux[..., None])[..., 0]
        dU -= eps * (fourth_difference_periodic(U, axis=0) + fourth_difference_periodic(U, axis=1)) / h
        return (dU,)
    
    def record(self, step: int, t: float, U: np.ndarray) -> Dict[str, float]:
        h = self.h
        (dU,) = self.rhs(t, (U,))
        v = velocity_from_u(U[..., 1:4])
        gradS = np.stack([d2_periodic(U[..., 7], h, axis=0), d2_periodic(U[..., 7], h, axis=1)], axis=-1)
        entropy = dU[..., 7] + np.sum(v[..., :2] * gradS, axis=-1)
        dev = U - self.reference
        A0 = symmetrizer.a0_unknowns(self.params, U)
        energy = float(np.sum(np.einsum("...i,...ij,...j->...", dev, A0, dev)) * h * h)
        div = divergence(U[..., 4:6], h)
        return {
            "step": step,
            "t": t,
            "div_H": float(np.sqrt(np.sum(div * div) * h * h)),
            "div_H_max": float(np.max(np.abs(div))),
            "entropy_residual": float(np.sqrt(np.sum(entropy * entropy) * h * h)),
            "W_max": float(np.max(np.abs(U[..., list(W_INDEX)]))),
            "energy": energy,
            "p_min": float(np.min(U[..., 0])),
        }
    
    def run(self) -> PeriodicRunResult:
        cfg = self.config
        U = cfg.U0.copy()
        self._check(U, 0)
        series = DiagnosticsSeries()
        series.append(self.record(0, 0.0, U))
        w_max = series.last()["W_max"]
        dt, t = cfg.dt, 0.0
        logger.info(f"🚀 periodic run '{cfg.name}' on {cfg.n}x{cfg.n}, {cfg.steps} steps of {dt:.4g}")
        for step in range(1, cfg.steps + 1):
            (U,) = ssp_rk2_step(self.rhs, (U,), t, dt)
            t = step * dt
            self._check(U, step)
            w_max = max(w_max, float(np.max(np.abs(U[..., list(W_INDEX)]))))
            if step % cfg.cadence == 0 or step == cfg.steps:
                series.append(self.record(step, t, U))
        energy = series.column("energy")
        summary = {
            "W_max": w_max,
            "div_H_final": series.last()["div_H"],
            "max_energy_change": float(np.max(np.abs(np.diff(energy)), initial=0.0)),
        }
        logger.info(f"✅ periodic run '{cfg.name}' done: max |W| = {summary['W_max']:.3g}")
        return PeriodicRunResult(series, U, t, summary)


def run_nonlinear_periodic(config: PeriodicConfig) -> PeriodicRunResult:
    """Integrate the symmetric RMHD system on the torus and record the constraint monitors"""
    return PeriodicSolver(config).run()
