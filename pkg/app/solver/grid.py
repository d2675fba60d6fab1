"""Grid, finite-difference stencils and the two-stage time stepper

x1 in [0, L1] carries n1 intervals (n1 + 1 nodes); x2 is periodic with
n2 nodes on the unit circle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple
import math
import re

import numpy as np

from app.errors import ConfigError, SolverError

MAX_CFL = 0.5

State = Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Grid:
    """Half-strip [0, L1] x T with a fixed time step"""
    
    L1: float
    n1: int
    n2: int
    T: float
    cfl: float = 0.25
    
    def __post_init__(self):
        if self.n1 < 4 or self.n2 < 5:
            raise ConfigError(f"grid {self.n1}x{self.n2} too small (need n1 >= 4, n2 >= 5)", condition="grid")
        if not self.L1 > 0.0 or not self.T >= 0.0:
            raise ConfigError(f"bad domain L1={self.L1}, T={self.T}", condition="grid")
        if not 0.0 < self.cfl <= MAX_CFL:
            raise SolverError(f"CFL number {self.cfl} outside (0, {MAX_CFL}]", condition="CFL")
    
    @classmethod
    def parse(cls, spec: str, L1: float, T: float, cfl: float = 0.25) -> "Grid":
        """Build from an ``n1xn2`` string"""
        m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", spec or "")
        if not m:
            raise ConfigError(f"grid spec must look like 64x32, got {spec!r}", condition="grid")
        return cls(L1=L1, n1=int(m.group(1)), n2=int(m.group(2)), T=T, cfl=cfl)
    
    @property
    def h1(self) -> float:
        return self.L1 / self.n1
    
    @property
    def h2(self) -> float:
        return 1.0 / self.n2
    
    @property
    def n_steps(self) -> int:
        if self.T == 0.0:
            return 0
        return int(math.ceil(self.T / (self.cfl * min(self.h1, self.h2)) - 1e-12))
    
    @property
    def dt(self) -> float:
        """Largest step <= CFL min(h1, h2) that lands exactly on T"""
        if self.n_steps == 0:
            return self.cfl * min(self.h1, self.h2)
        return self.T / self.n_steps
    
    @property
    def x1(self) -> np.ndarray:
        return np.arange(self.n1 + 1) * self.h1
    
    @property
    def x2(self) -> np.ndarray:
        return np.arange(self.n2) * self.h2
    
    def check_cfl(self, max_speed: float = 1.0) -> None:
        """dt <= CFL min(h) against the signal speed bound"""
        if self.dt * max_speed > MAX_CFL * min(self.h1, self.h2) * (1.0 + 1e-12):
            raise SolverError(f"dt={self.dt:.3g} violates the CFL bound", condition="CFL")
    
    def describe(self) -> dict:
        return {"L1": self.L1, "n1": self.n1, "n2": self.n2, "h1": self.h1, "h2": self.h2,
                "dt": self.dt, "T": self.T, "steps": self.n_steps}


def d1(U: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central differences inside, second-order one-sided at both ends"""
    return np.gradient(U, h, axis=axis, edge_order=2)


def d2_periodic(U: np.ndarray, h: float, axis: int = -1, order: int = 2) -> np.ndarray:
    """Periodic central first derivative of order 2 or 4"""
    if order == 2:
        return (np.roll(U, -1, axis) - np.roll(U, 1, axis)) / (2.0 * h)
    if order == 4:
        near = np.roll(U, -1, axis) - np.roll(U, 1, axis)
        far = np.roll(U, -2, axis) - np.roll(U, 2, axis)
        return (8.0 * near - far) / (12.0 * h)
    raise ValueError(f"unsupported order {order}")


def fourth_difference_periodic(U: np.ndarray, axis: int) -> np.ndarray:
    # grouped so that constants give exactly zero
    outer = np.roll(U, -2, axis) + np.roll(U, 2, axis)
    inner = np.roll(U, -1, axis) + np.roll(U, 1, axis)
    return (outer - 4.0 * inner) + 6.0 * U


def fourth_difference_interior(U: np.ndarray, axis: int) -> np.ndarray:
    """delta^4 on nodes 2..n-3, zero on the two nodes next to each end"""
    U = np.moveaxis(U, axis, 0)
    out = np.zeros_like(U)
    out[2:-2] = ((U[4:] + U[:-4]) - 4.0 * (U[3:-1] + U[1:-3])) + 6.0 * U[2:-2]
    return np.moveaxis(out, 0, axis)


def ssp_rk2_step(
    rhs: Callable[[float, State], State],
    y: State,
    t: float,
    dt: float,
    project: Optional[Callable[[float, State], State]] = None,
) -> State:
    """Two-stage strong-stability-preserving Runge-Kutta (Heun) step
    
    ``project`` is applied after each stage (boundary closure).
    """
    k1 = rhs(t, y)
    y1 = tuple(a + dt * b for a, b in zip(y, k1))
    if project is not None:
        y1 = project(t + dt, y1)
    k2 = rhs(t + dt, y1)
    y2 = tuple(0.5 * a + 0.5 * (b + dt * c) for a, b, c in zip(y, y1, k2))
    if project is not None:
        y2 = project(t + dt, y2)
    return y2


def trapezoid_weights(n_nodes: int, h: float) -> np.ndarray:
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


def l2_norm_sq(U: np.ndarray, w1: np.ndarray, h2: float) -> float:
    """Trapezoid in x1 (axis -3), uniform in x2 (axis -2), summed over the rest"""
    sq = np.sum(U * U, axis=-1)
    return float(np.sum(sq * w1[:, None]) * h2)


def periodic_norm_sq(f: np.ndarray, h2: float) -> float:
    return float(np.sum(f * f) * h2)
