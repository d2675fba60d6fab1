"""Grid-refinement studies and the growth-shape fit

Observed orders are log2 of successive error ratios under grid doubling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence
import logging

import numpy as np
import pandas as pd

from app.linear.lifting import transport_g6
from app.physics.eos import ThermoParams
from app.solver.linearized import LinearRunResult, run_linearized
from app.solver.periodic import PeriodicConfig, run_nonlinear_periodic, smooth_planar_data
from app.solver.scenarios import build_scenario, gronwall_model, mms_model, normal_field_model

logger = logging.getLogger(__name__)

MIN_ORDER = 1.9
MIN_RATIO = 3.5
FIT_TOLERANCE = 0.1
ROUNDOFF = 1e-10


def observed_orders(errors: Sequence[float]) -> np.ndarray:
    e = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log2(e[:-1] / e[1:])


@dataclass
class RefinementStudy:
    """Errors on successively doubled grids"""
    
    name: str
    levels: List[int]
    errors: List[float]
    extra: Dict[str, float] = field(default_factory=dict)
    
    @property
    def orders(self) -> np.ndarray:
        return observed_orders(self.errors)
    
    @property
    def ratios(self) -> np.ndarray:
        e = np.asarray(self.errors, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return e[:-1] / e[1:]
    
    @property
    def min_order(self) -> float:
        return float(np.min(self.orders))
    
    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratios))
    
    def to_frame(self) -> pd.DataFrame:
        orders = np.concatenate([[np.nan], self.orders])
        return pd.DataFrame({"n": self.levels, "error": self.errors, "order": orders})
    
    def log(self) -> None:
        for n, e, o in zip(self.levels, self.errors, np.concatenate([[np.nan], self.orders])):
            logger.info(f"📦 {self.name}: n={n:4d} error={e:.6e} order={o:.3f}")


def mms_error(result: LinearRunResult) -> float:
    return float(np.hypot(result.errors["l2_U"], result.errors["l2_phi"]))


def manufactured_solution_study(
    levels: Sequence[int] = (32, 64, 128),
    T: float = 0.5,
    seed: Optional[int] = None,
    mode: str = "direct",
) -> RefinementStudy:
    """L2 error at T of the linearized solver against t^2 F(x)"""
    errors = []
    for n in levels:
        config = build_scenario(mms_model(n, T, mode), seed=seed)
        errors.append(mms_error(run_linearized(config)))
    study = RefinementStudy(f"mms_{mode}", list(levels), errors)
    study.log()
    return study


def divergence_study(
    params: ThermoParams,
    levels: Sequence[int] = (32, 64),
    T: float = 0.1,
    amplitude: float = 0.2,
) -> RefinementStudy:
    """||div H(T)|| for divergence-free initial field on the torus"""
    errors = []
    for n in levels:
        result = run_nonlinear_periodic(
            PeriodicConfig(params, smooth_planar_data(n, amplitude), T=T, name=f"div_{n}")
        )
        errors.append(result.series.last()["div_H"])
    study = RefinementStudy("div_H", list(levels), errors)
    study.log()
    return study


@dataclass
class NormalFieldStudy:
    """sup_t ||[H_N]|| for the lifted run and the frozen-g6 control"""
    
    lifted: RefinementStudy
    control: RefinementStudy
    
    @property
    def passed(self) -> bool:
        # a lifted jump already at roundoff has nothing left to converge
        ratio_ok = bool(self.lifted.min_ratio >= MIN_RATIO) or max(self.lifted.errors) < ROUNDOFF
        # the control stays O(1) and dominates the lifted run
        control_ok = self.control.errors[-1] > 10.0 * self.lifted.errors[-1] and self.control.min_ratio < 2.0
        return ratio_ok and control_ok


def normal_field_study(levels: Sequence[int] = (32, 64), T: float = 0.5) -> NormalFieldStudy:
    """Lifted run with transported g6 against the control with g6 = 0"""
    out = {}
    for mode in ("lifted", "lifted_no_g6"):
        errors = []
        for n in levels:
            result = run_linearized(build_scenario(normal_field_model(n, mode, T)))
            errors.append(result.series.max("jump_HN"))
        out[mode] = RefinementStudy(f"jump_HN_{mode}", list(levels), errors)
        out[mode].log()
    return NormalFieldStudy(out["lifted"], out["lifted_no_g6"])


def g6_transport_study(
    levels: Sequence[int] = (32, 64, 128),
    T: float = 0.5,
    cfl: float = 0.25,
) -> RefinementStudy:
    """g6* = t^2 sin(2 pi x2) carried by v2 = 0.2 + 0.1 cos(2 pi x2)"""
    tau = 2.0 * np.pi
    errors = []
    for n in levels:
        x2 = np.arange(n) / n
        v2 = 0.2 + 0.1 * np.cos(tau * x2)
        dv2 = -0.1 * tau * np.sin(tau * x2)
        shape = np.sin(tau * x2)
        dshape = tau * np.cos(tau * x2)
        
        def source(t, shape=shape, dshape=dshape, v2=v2, dv2=dv2):
            return 2.0 * t * shape + t * t * (dv2 * shape + v2 * dshape)
        
        steps = int(np.ceil(T / (cfl / n) - 1e-12))
        g6 = transport_g6(np.zeros(n), v2, source, 0.0, T / steps, steps)
        err = g6 - T * T * shape
        errors.append(float(np.sqrt(np.sum(err * err) / n)))
    study = RefinementStudy("g6_transport", list(levels), errors)
    study.log()
    return study


@dataclass
class GronwallFit:
    """Least-squares affine fit of log(I + delta) against t"""
    
    slope: float
    intercept: float
    delta: float
    max_exceedance: float
    rms: float
    value_range: float
    finite: bool
    
    @property
    def relative_exceedance(self) -> float:
        return self.max_exceedance / self.value_range
    
    @property
    def passed(self) -> bool:
        return self.finite and self.max_exceedance <= FIT_TOLERANCE * self.value_range
    
    def to_dict(self) -> Dict[str, float]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "delta": self.delta,
            "max_exceedance": self.max_exceedance,
            "rms": self.rms,
            "range": self.value_range,
            "relative_exceedance": self.relative_exceedance,
        }


def gronwall_fit(
    t: Sequence[float],
    I: Sequence[float],
    delta: Optional[float] = None,
    delta_fraction: float = 1.0,
) -> GronwallFit:
    """Fit log(I + delta) = a t + b

    delta defaults to ``delta_fraction * max I``. With the default fraction
    log(I + delta) spans at most log 2, so the check only rejects growth that
    is large against the final level; smaller fractions widen the range and
    resolve the early-time shape. The shape check passes when log(I + delta)
    exceeds the fitted line by at most a tenth of its range.
    """
    t = np.asarray(t, dtype=float)
    I = np.asarray(I, dtype=float)
    finite = bool(np.all(np.isfinite(I)))
    if delta_fraction <= 0.0:
        raise ValueError(f"delta_fraction must be positive, got {delta_fraction}")
    if delta is None:
        delta = delta_fraction * float(np.max(I)) if finite and np.max(I) > 0.0 else 1.0
    y = np.log(I + delta) if finite else np.zeros_like(t)
    slope, intercept = np.polyfit(t, y, 1)
    r = y - (slope * t + intercept)
    value_range = float(np.ptp(y)) or 1.0
    return GronwallFit(
        slope=float(slope),
        intercept=float(intercept),
        delta=float(delta),
        max_exceedance=float(max(np.max(r), 0.0)),
        rms=float(np.sqrt(np.mean(r * r)) / value_range),
        value_range=value_range,
        finite=finite,
    )


def gronwall_study(n1: int = 64, n2: int = 32, T: float = 1.0) -> GronwallFit:
    """Run the Rayleigh-Taylor scenario and fit its energy curve"""
    result = run_linearized(build_scenario(gronwall_model(n1, n2, T)))
    series = result.series
    fit = gronwall_fit(series.column("t"), series.column("I"))
    logger.info(
        f"{'✅' if fit.passed else '❌'} growth fit: slope {fit.slope:.4g}, "
        f"exceedance {fit.relative_exceedance:.3%} of range"
    )
    return fit
