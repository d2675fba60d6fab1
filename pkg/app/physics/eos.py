"""Polytropic equation of state and hyperbolicity admissibility

Relativistic polytropic gas in units with c = 1:

    rho(p, S) = A p^(1/gamma) exp(-S/gamma)
    e = p / ((gamma - 1) rho),  h = 1 + e + p/rho,  a^2 = gamma p / rho

The state-level hyperbolicity report is returned, never raised, so callers
can print every failing condition at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List
import logging

import numpy as np

from app.errors import ConfigError, DomainError
from app.physics import dual

if TYPE_CHECKING:
    from app.physics.kinematics import PrimitiveState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThermoParams:
    """EOS constants and admissibility margins"""
    
    gamma: float = 4.0 / 3.0
    A: float = 1.0
    pbar: float = 0.1
    nu: float = 0.05
    kappa: float = 0.1
    epsilon: float = 0.1
    allow_stiff: bool = False
    
    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}", condition="(pg)")
        if self.gamma > 2.0:
            if not self.allow_stiff:
                raise ConfigError(
                    f"gamma={self.gamma} > 2 requires the stiff-gamma override", condition="gamma<=2"
                )
            logger.warning(f"⚠️ gamma={self.gamma} > 2: causality is checked per state, not guaranteed")
        for name in ("A", "pbar", "nu", "kappa", "epsilon"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}", condition="margins")
    
    @classmethod
    def from_settings(cls, settings=None) -> "ThermoParams":
        """Build from the application settings"""
        if settings is None:
            from app.config import settings
        return cls(
            gamma=settings.GAMMA,
            A=settings.EOS_A,
            pbar=settings.PBAR,
            nu=settings.NU,
            kappa=settings.KAPPA,
            epsilon=settings.EPSILON,
            allow_stiff=settings.ALLOW_STIFF_GAMMA,
        )


def _require_positive(name: str, x) -> None:
    if np.any(~(dual.value(x) > 0.0)):
        raise DomainError(f"{name} must be positive, got min {np.min(dual.value(x))}")


# Unchecked kernels; these also run on dual arrays inside the matrix assembly.

def _density(params: ThermoParams, p, S):
    return params.A * dual.power(p, 1.0 / params.gamma) * dual.exp(-S / params.gamma)


def _enthalpy(params: ThermoParams, p, rho):
    return 1.0 + params.gamma * p / ((params.gamma - 1.0) * rho)


def density_from_p_S(params: ThermoParams, p, S):
    """Proper rest-mass density rho = A p^(1/gamma) e^(-S/gamma)"""
    _require_positive("pressure", p)
    return _density(params, p, S)


def pressure_from_rho_S(params: ThermoParams, rho, S):
    """Inverse EOS p(rho, S) = (rho/A)^gamma e^S"""
    _require_positive("density", rho)
    return np.power(np.asarray(rho, dtype=float) / params.A, params.gamma) * np.exp(S)


def internal_energy(params: ThermoParams, p, rho):
    """Specific internal energy e = p / ((gamma - 1) rho)"""
    _require_positive("pressure", p)
    _require_positive("density", rho)
    return p / ((params.gamma - 1.0) * rho)


def enthalpy(params: ThermoParams, p, rho):
    """Relativistic specific enthalpy h = 1 + e + p/rho"""
    _require_positive("pressure", p)
    _require_positive("density", rho)
    return _enthalpy(params, p, rho)


def sound_speed_sq(params: ThermoParams, p, rho):
    """c_s^2 = a^2 / h with a^2 = gamma p / rho"""
    _require_positive("pressure", p)
    _require_positive("density", rho)
    a2 = params.gamma * p / rho
    return a2 / _enthalpy(params, p, rho)


def causality_expression(params: ThermoParams, p, rho):
    """1 + gamma (2 - gamma) p / ((gamma - 1) rho); positive iff c_s^2 < 1"""
    g = params.gamma
    return 1.0 + g * (2.0 - g) * p / ((g - 1.0) * rho)


@dataclass
class ConditionCheck:
    """One admissibility condition"""
    
    condition: str
    description: str
    passed: bool
    margin: float


@dataclass
class HyperbolicityReport:
    """Per-condition flags and margins for one state"""
    
    checks: Dict[str, ConditionCheck] = field(default_factory=dict)
    
    @property
    def admissible(self) -> bool:
        return all(c.passed for c in self.checks.values())
    
    def add(self, condition: str, description: str, margin: float, strict: bool = False) -> None:
        ok = margin > 0.0 if strict else margin >= 0.0
        passed = bool(np.isfinite(margin) and ok)
        self.checks[condition] = ConditionCheck(condition, description, passed, float(margin))
    
    def failures(self) -> List[str]:
        """Human-readable messages for failing conditions"""
        return [
            f"{c.condition} {c.description} violated (margin {c.margin:.6g})"
            for c in self.checks.values()
            if not c.passed
        ]
    
    def to_dict(self) -> Dict:
        return {
            "admissible": self.admissible,
            "checks": {
                k: {"description": c.description, "passed": c.passed, "margin": c.margin}
                for k, c in self.checks.items()
            },
        }


def hyperbolicity_report(params: ThermoParams, state: "PrimitiveState") -> HyperbolicityReport:
    """Check (9'), (5.1), (5.1''), causality and gamma <= 2 for one state"""
    report = HyperbolicityReport()
    p = float(state.p)
    speed = float(np.linalg.norm(state.v))
    
    report.add("(9')", "hyperbolicity p > 0", p, strict=True)
    report.add("(5.1)", "pressure bound p >= pbar", p - params.pbar)
    report.add("(5.1'')", "light-speed margin 1-|v| >= nu", (1.0 - speed) - params.nu)
    
    if p > 0.0:
        rho = float(_density(params, p, state.S))
        cs2 = float(params.gamma * p / rho / _enthalpy(params, p, rho))
        # distance to the nearer end of (0, 1)
        report.add("(9)", "causality 0 < c_s^2 < 1", min(cs2, 1.0 - cs2), strict=True)
    else:
        report.add("(9)", "causality 0 < c_s^2 < 1", float("nan"))
    report.add("gamma<=2", "adiabatic index gamma <= 2", 2.0 - params.gamma)
    return report
