"""Front function, cutoff and the straightening change of variables

The interface x1 = phi(t, x2) is mapped onto x1 = 0 by

    Psi+-(t, x) = chi(+-x1) phi(t, x2),   Phi+-(t, x) = +-x1 + Psi+-(t, x),

so both sides live on the same half-strip x1 >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union
import logging

import numpy as np

from app.errors import AdmissibilityError, ConfigError
from app.solver.grid import d2_periodic

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# kind -> (support radius, max |chi'|)
CUTOFF_KINDS = {
    "quintic": (5.0, 15.0 / 32.0),
    "smooth": (7.0, 1.0 / 3.0),
}


def _smoothstep(t: np.ndarray) -> np.ndarray:
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _smoothstep_slope(t: np.ndarray) -> np.ndarray:
    return 30.0 * t * t * (1.0 - t) ** 2


def _bump_part(x: np.ndarray) -> np.ndarray:
    """exp(-1/x) for x > 0, zero otherwise"""
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, np.exp(-1.0 / safe), 0.0)


def _bump_part_slope(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, np.exp(-1.0 / safe) / (safe * safe), 0.0)


@dataclass(frozen=True)
class Cutoff:
    """Even cutoff chi: 1 on [-1, 1], 0 for |s| >= radius, max |chi'| < 1/2
    
    ``quintic`` is C^2 with transition width 4; ``smooth`` is C^infinity with width 6.
    """
    
    kind: str = "quintic"
    
    def __post_init__(self):
        if self.kind not in CUTOFF_KINDS:
            raise ConfigError(f"unknown cutoff kind {self.kind!r}; use one of {sorted(CUTOFF_KINDS)}")
    
    @property
    def radius(self) -> float:
        return CUTOFF_KINDS[self.kind][0]
    
    @property
    def max_slope(self) -> float:
        return CUTOFF_KINDS[self.kind][1]
    
    def _t(self, s: np.ndarray) -> np.ndarray:
        return np.clip((np.abs(s) - 1.0) / (self.radius - 1.0), 0.0, 1.0)
    
    def __call__(self, s: ArrayLike) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        t = self._t(s)
        if self.kind == "quintic":
            return 1.0 - _smoothstep(t)
        a, b = _bump_part(t), _bump_part(1.0 - t)
        return 1.0 - a / (a + b)
    
    def derivative(self, s: ArrayLike) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        t = self._t(s)
        width = self.radius - 1.0
        inside = (np.abs(s) > 1.0) & (np.abs(s) < self.radius)
        if self.kind == "quintic":
            slope = _smoothstep_slope(t)
        else:
            a, b = _bump_part(t), _bump_part(1.0 - t)
            da, db = _bump_part_slope(t), _bump_part_slope(1.0 - t)
            slope = (da * b + a * db) / (a + b) ** 2
        return np.where(inside, -np.sign(s) * slope / width, 0.0)


def cutoff(s: ArrayLike, kind: str = "quintic") -> np.ndarray:
    """chi(s); 1 on |s| <= 1, 0 on |s| >= radius"""
    return Cutoff(kind)(s)


def cutoff_derivative(s: ArrayLike, kind: str = "quintic") -> np.ndarray:
    return Cutoff(kind).derivative(s)


def periodic_derivative(f: np.ndarray, axis: int = -1) -> np.ndarray:
    """Fourth-order central x2-derivative on the unit circle"""
    f = np.asarray(f, dtype=float)
    return d2_periodic(f, 1.0 / f.shape[axis], axis=axis, order=4)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrontFunction:
    """phi and dt phi sampled on n2 uniform nodes of the unit circle"""
    
    phi: np.ndarray
    dtphi: Optional[np.ndarray] = None
    t: float = 0.0
    
    def __post_init__(self):
        phi = _frozen(self.phi)
        if phi.ndim != 1 or phi.size < 5:
            raise ConfigError(f"front needs a 1-D array of at least 5 nodes, got shape {phi.shape}")
        dtphi = np.zeros_like(phi) if self.dtphi is None else self.dtphi
        dtphi = _frozen(dtphi)
        if dtphi.shape != phi.shape:
            raise ConfigError(f"dtphi shape {dtphi.shape} does not match phi shape {phi.shape}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "dtphi", dtphi)
    
    @classmethod
    def flat(cls, n2: int) -> "FrontFunction":
        return cls(np.zeros(n2))
    
    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        n2: int,
        dt_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        t: float = 0.0,
    ) -> "FrontFunction":
        x2 = np.arange(n2) / n2
        dtphi = None if dt_fn is None else dt_fn(x2)
        return cls(np.asarray(fn(x2), dtype=float), dtphi, t)
    
    @property
    def n2(self) -> int:
        return self.phi.size
    
    @property
    def h2(self) -> float:
        return 1.0 / self.n2
    
    @property
    def x2(self) -> np.ndarray:
        return np.arange(self.n2) * self.h2
    
    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.phi)))
    
    def d2phi(self) -> np.ndarray:
        return periodic_derivative(self.phi)
    
    def check(self) -> None:
        """Raise on ||phi||_inf > 1, warn on ||phi||_inf > 1/2"""
        norm = self.sup_norm
        if norm > 1.0:
            raise AdmissibilityError(f"||phi||_inf = {norm:.6g} > 1", condition="(fi)")
        if norm > 0.5:
            logger.warning(f"⚠️ ||phi||_inf = {norm:.4g} exceeds 1/2; admissible but outside the usual normalization")


@dataclass
class StraightenedMaps:
    """Psi+-, Phi+- and their first derivatives on a set of x1 values"""
    
    x1: np.ndarray
    Psi_plus: np.ndarray
    Psi_minus: np.ndarray
    Phi_plus: np.ndarray
    Phi_minus: np.ndarray
    d1Phi_plus: np.ndarray
    d1Phi_minus: np.ndarray
    dtPsi_plus: np.ndarray
    dtPsi_minus: np.ndarray
    d2Psi_plus: np.ndarray
    d2Psi_minus: np.ndarray
    bounds: dict = field(default_factory=dict)


def straighten(front: FrontFunction, x1: ArrayLike, cutoff: Optional[Cutoff] = None) -> StraightenedMaps:
    """Evaluate the straightening maps on x1 (any shape) times the front nodes
    
    Args:
        front: the interface
        x1: depth coordinate(s), x1 >= 0
        cutoff: chi, quintic by default
    
    Returns:
        StraightenedMaps with arrays of shape x1.shape + (n2,)
    """
    front.check()
    chi = cutoff or Cutoff()
    x1 = np.asarray(x1, dtype=float)
    xs = x1[..., None]
    phi, dtphi, d2phi = front.phi, front.dtphi, front.d2phi()
    
    chi_p, chi_m = chi(xs), chi(-xs)
    Psi_p, Psi_m = chi_p * phi, chi_m * phi
    d1Phi_p = 1.0 + chi.derivative(xs) * phi
    d1Phi_m = -1.0 - chi.derivative(-xs) * phi
    
    lo_p, hi_m = float(np.min(d1Phi_p)), float(np.max(d1Phi_m))
    if lo_p < 0.5 - 1e-12 or hi_m > -0.5 + 1e-12:
        raise AdmissibilityError(
            f"d1 Phi bounds violated: min d1 Phi+ = {lo_p:.6g}, max d1 Phi- = {hi_m:.6g}", condition="(fi)"
        )
    
    return StraightenedMaps(
        x1=x1,
        Psi_plus=Psi_p,
        Psi_minus=Psi_m,
        Phi_plus=xs + Psi_p,
        Phi_minus=-xs + Psi_m,
        d1Phi_plus=d1Phi_p,
        d1Phi_minus=d1Phi_m,
        dtPsi_plus=chi_p * dtphi,
        dtPsi_minus=chi_m * dtphi,
        d2Psi_plus=chi_p * d2phi,
        d2Psi_minus=chi_m * d2phi,
        bounds={"min_d1Phi_plus": lo_p, "max_d1Phi_minus": hi_m},
    )


def normal_jump(a_plus: ArrayLike, a_minus: ArrayLike) -> np.ndarray:
    """[d1 a] = d1 a+ + d1 a- at x1 = 0 (both sides on the same half-plane)"""
    return np.asarray(a_plus, dtype=float) + np.asarray(a_minus, dtype=float)
