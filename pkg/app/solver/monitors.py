"""Diagnostics series and constraint monitors for linearized runs"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional
import math

import numpy as np
import pandas as pd

from app.interface.front import normal_jump
from app.linear.basic_state import H2, MINUS, PLUS, S, U1, U2, BasicState
from app.linear.lifting import divergence_source
from app.linear.operators import PerturbationFields
from app.solver.grid import d1, d2_periodic, trapezoid_weights

# lower-order coefficient terms are left out of the transport residuals
INTERIOR = slice(2, -2)


@dataclass
class DiagnosticsSeries:
    """Per-step diagnostic records, one dict per recorded step"""
    
    records: List[Dict[str, float]] = field(default_factory=list)
    
    def append(self, record: Dict[str, float]) -> None:
        self.records.append({k: float(v) for k, v in record.items()})
    
    def __len__(self) -> int:
        return len(self.records)
    
    @property
    def columns(self) -> List[str]:
        return list(self.records[0]) if self.records else []
    
    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records])
    
    def last(self) -> Dict[str, float]:
        return dict(self.records[-1])
    
    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(self.records, columns=self.columns)
    
    def all_finite(self) -> bool:
        return all(math.isfinite(v) for r in self.records for v in r.values())
    
    def max(self, name: str) -> float:
        return float(np.max(self.column(name))) if self.records else 0.0


def _l2(a: np.ndarray, h2: float, w1: Optional[np.ndarray] = None) -> float:
    """sqrt of the trapezoid (leading axis) times periodic sum of a**2"""
    sq = a * a
    if w1 is not None:
        sq = sq * w1.reshape((-1,) + (1,) * (sq.ndim - 1))
    return float(np.sqrt(np.sum(sq) * h2))


def jump_normal_field(basic: BasicState, pert: PerturbationFields) -> np.ndarray:
    HN = pert.HN(basic)[:, 0]
    return HN[PLUS] - HN[MINUS]


def divergence_fields(basic: BasicState, pert: PerturbationFields) -> np.ndarray:
    """xi = d1 H_N + d2 (H2 d1 Phi-hat), (2, n1 + 1, n2)"""
    HN = pert.HN(basic)
    return d1(HN, basic.h1, axis=1) + d2_periodic(pert.Udot[..., H2] * basic.d1Phi, basic.h2, axis=2)


def _transport_residual(basic: BasicState, q: np.ndarray, dtq: np.ndarray, src: np.ndarray) -> np.ndarray:
    """dt q + (w / d1 Phi) . grad q - src"""
    speed = basic.w / basic.d1Phi[..., None]
    adv = speed[..., 0] * d1(q, basic.h1, axis=1) + speed[..., 1] * d2_periodic(q, basic.h2, axis=2)
    return dtq + adv - src


def constraint_monitors(
    basic: BasicState,
    pert: PerturbationFields,
    dtpert: PerturbationFields,
    f: Optional[np.ndarray] = None,
    g6: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """Residuals of the transport identities on a computed solution
    
    Args:
        basic: the basic state
        pert: total fields U-dot at one instant
        dtpert: their time derivative
        f: interior source at that instant
        g6: transported normal-field datum; jump_HN is measured against it
    
    Returns:
        jump_HN, xi_plus, xi_minus, xi_residual_plus/minus, entropy_residual, prop2_residual
    """
    if f is None:
        f = np.zeros_like(basic.U)
    h2 = basic.h2
    w1 = trapezoid_weights(basic.n1 + 1, basic.h1)[INTERIOR]
    jump_HN = jump_normal_field(basic, pert)
    if g6 is not None:
        jump_HN = jump_HN - g6
    out: Dict[str, float] = {"jump_HN": _l2(jump_HN, h2)}
    
    xi = divergence_fields(basic, pert)
    dtxi = divergence_fields(basic, dtpert)
    fh = divergence_source(basic, f)
    div_fh = d1(fh[..., 0], basic.h1, axis=1) + d2_periodic(fh[..., 1], h2, axis=2)
    r_xi = _transport_residual(basic, xi, dtxi, div_fh)
    
    r_S = _transport_residual(basic, pert.Udot[..., S], dtpert.Udot[..., S], f[..., S])
    for side, name in ((PLUS, "plus"), (MINUS, "minus")):
        out[f"xi_{name}"] = _l2(xi[side, INTERIOR], h2, w1)
        out[f"xi_residual_{name}"] = _l2(r_xi[side, INTERIOR], h2, w1)
    out["entropy_residual"] = float(np.hypot(_l2(r_S[PLUS, INTERIOR], h2, w1), _l2(r_S[MINUS, INTERIOR], h2, w1)))
    
    # [d1 u_N] - v_N+ (v . [d1 u]) at x1 = 0
    du = d1(pert.Udot[..., U1:U2 + 1], basic.h1, axis=1)[:, 0]
    jump_du = normal_jump(du[PLUS], du[MINUS])
    jump_duN = jump_du[:, 0] - jump_du[:, 1] * basic.d2phi
    v = basic.v[PLUS, 0]
    prop2 = jump_duN - basic.vN[PLUS, 0] * np.sum(v * jump_du, axis=-1)
    out["prop2_residual"] = _l2(prop2, h2)
    return out


def energy_norms(
    basic: BasicState,
    Udot: np.ndarray,
    dtUdot: np.ndarray,
    phi: np.ndarray,
    dtphi: np.ndarray,
) -> Dict[str, float]:
    """Squared discrete norms entering I(t)"""
    w1 = trapezoid_weights(basic.n1 + 1, basic.h1)
    h2 = basic.h2
    
    def sq(a):
        return float(np.sum(np.sum(a * a, axis=-1) * w1[None, :, None]) * h2)
    
    l2 = sq(Udot)
    dt = sq(dtUdot)
    dx2 = sq(d2_periodic(Udot, h2, axis=2))
    dx1 = sq(d1(Udot, basic.h1, axis=1))
    tan = l2 + dt + dx2
    h1 = tan + dx1
    phi_sq = float(np.sum(phi * phi) * h2)
    dtphi_sq = float(np.sum(dtphi * dtphi) * h2)
    d2 = d2_periodic(phi, h2)
    d2phi_sq = float(np.sum(d2 * d2) * h2)
    return {
        "l2": l2,
        "tan_energy": tan,
        "h1_energy": h1,
        "phi_sq": phi_sq,
        "dtphi_sq": dtphi_sq,
        "d2phi_sq": d2phi_sq,
        "I": h1 + phi_sq + dtphi_sq + d2phi_sq,
    }
