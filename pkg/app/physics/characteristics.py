"""Characteristic speeds and the boundary signature of the contact problem

Speeds come from the symmetric-definite pencil (A_N, A0), solved after a
Cholesky reduction of A0. For the 2-D planar problem the eigenvalues are

    v_N - c_f-, v_N - c_s-, v_N, v_N, v_N + c_s+, v_N + c_f+

with N = (1, -d2 phi) not normalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
import logging

import numpy as np
import scipy.linalg

from app.errors import AdmissibilityError, PreconditionError
from app.physics.eos import ThermoParams
from app.physics.kinematics import PrimitiveState
from app.physics.symmetrizer import (
    _checked_unknowns,
    a0_unknowns,
    co_normal,
    normal_matrix_unknowns,
    planar,
)

logger = logging.getLogger(__name__)


def generalized_eigh(K: np.ndarray, M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of K r = lambda M r, M symmetric positive definite
    
    Returns ascending eigenvalues and M-orthonormal eigenvectors (columns).
    """
    try:
        return scipy.linalg.eigh(K, M)
    except np.linalg.LinAlgError as e:
        raise AdmissibilityError(f"A0 is not positive definite: {e}", condition="(9)") from e


def generalized_eigvalsh(K: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Batched eigenvalues of (K, M) via M = L L^T and eigvalsh(L^-1 K L^-T)"""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as e:
        raise AdmissibilityError(f"A0 is not positive definite: {e}", condition="(9)") from e
    Linv = np.linalg.inv(L)
    reduced = Linv @ K @ np.swapaxes(Linv, -1, -2)
    reduced = 0.5 * (reduced + np.swapaxes(reduced, -1, -2))
    return np.linalg.eigvalsh(reduced)


def _require_planar(state: PrimitiveState) -> None:
    if not state.is_planar:
        raise PreconditionError("planar analysis requires v3 = H3 = 0", condition="planar")


def normal_field(state: PrimitiveState, d2phi: float) -> float:
    """H_N = H1 - H2 d2phi"""
    return float(state.H[0] - state.H[1] * d2phi)


def normal_velocity(state: PrimitiveState, d2phi: float) -> float:
    """v_N = v1 - v2 d2phi"""
    return float(state.v[0] - state.v[1] * d2phi)


@dataclass
class CharSpectrum:
    """Sorted planar eigenvalues, shifted eigenvalues and the four speeds"""
    
    lambdas: np.ndarray
    shifted: np.ndarray
    vN: float
    speeds: Dict[str, float] = field(default_factory=dict)
    
    @property
    def margin(self) -> float:
        return min(self.speeds.values())


def pencil(params: ThermoParams, U: np.ndarray, N: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Planar (A_N, A0) at unknowns U (..., 8) for a 3-vector direction N"""
    return planar(normal_matrix_unknowns(params, U, N)), planar(a0_unknowns(params, U))


def char_spectrum(
    params: ThermoParams,
    state: PrimitiveState,
    N=(1.0, 0.0),
    front_speed: Optional[float] = None,
) -> CharSpectrum:
    """Eigenvalues of det(A_1 N_1 + A_2 N_2 - lambda A0) = 0 for a planar state"""
    _require_planar(state)
    U = _checked_unknowns(params, state)
    N3 = np.array([N[0], N[1], 0.0], dtype=float)
    AN, A0 = pencil(params, U, N3)
    lambdas, _ = generalized_eigh(AN, A0)
    vN = float(np.dot(state.v, N3))
    if front_speed is None:
        front_speed = vN
    speeds = {
        "c_f-": vN - lambdas[0],
        "c_s-": vN - lambdas[1],
        "c_s+": lambdas[4] - vN,
        "c_f+": lambdas[5] - vN,
    }
    return CharSpectrum(
        lambdas=lambdas,
        shifted=lambdas - front_speed,
        vN=vN,
        speeds={k: float(v) for k, v in speeds.items()},
    )


def speed_positivity_margin(params: ThermoParams, state: PrimitiveState, N=(1.0, 0.0)) -> float:
    """min(c_s-, c_s+, c_f-, c_f+); zero up to roundoff exactly when H_N = 0"""
    return char_spectrum(params, state, N).margin


@dataclass
class BoundarySignature:
    """Sign counts of the 12x12 boundary pencil and the rank of its matrix"""
    
    n_pos: int
    n_neg: int
    n_zero: int
    rank: int
    eigenvalues: np.ndarray
    threshold: float
    side_counts: Dict[str, Tuple[int, int, int]] = field(default_factory=dict)
    side_eigenvalues: Dict[str, np.ndarray] = field(default_factory=dict)
    
    @property
    def degenerate(self) -> bool:
        return self.n_zero > 4
    
    def expected(self) -> bool:
        return (self.n_pos, self.n_neg, self.n_zero, self.rank) == (4, 4, 4, 8)


def _sign_counts(eigs: np.ndarray, threshold) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    threshold = np.asarray(threshold)[..., None]
    pos = np.sum(eigs > threshold, axis=-1)
    neg = np.sum(eigs < -threshold, axis=-1)
    return pos, neg, eigs.shape[-1] - pos - neg


def boundary_matrices(
    params: ThermoParams,
    U_plus: np.ndarray,
    U_minus: np.ndarray,
    d2phi,
    dtphi,
) -> Tuple[np.ndarray, np.ndarray]:
    """Batched frakA0 = diag(A0+, A0-) and frakA1 = diag(Ã1+, -Ã1-), each 12x12
    
    Ã1 at the boundary is A1 - A0 dt phi - A2 d2 phi on both sides.
    """
    N = co_normal(d2phi)
    dtphi = np.asarray(dtphi, dtype=float)
    AN_p, A0_p = pencil(params, U_plus, N)
    AN_m, A0_m = pencil(params, U_minus, N)
    shape = A0_p.shape[:-2]
    frakA0 = np.zeros(shape + (12, 12))
    frakA1 = np.zeros(shape + (12, 12))
    frakA0[..., :6, :6] = A0_p
    frakA0[..., 6:, 6:] = A0_m
    frakA1[..., :6, :6] = AN_p - A0_p * dtphi[..., None, None]
    frakA1[..., 6:, 6:] = -(AN_m - A0_m * dtphi[..., None, None])
    return frakA0, frakA1


def check_contact_traces(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    d2phi: float,
    dtphi: float,
    tol: float,
) -> None:
    """Raise unless the traces satisfy [p] = [v] = [H_tau] = 0 and dt phi = v_N+"""
    residuals = {
        "[p]": right.p - left.p,
        "[v]": float(np.max(np.abs(right.v - left.v))),
        "[H_tau]": (right.H[0] * d2phi + right.H[1]) - (left.H[0] * d2phi + left.H[1]),
        "dt phi - v_N+": dtphi - normal_velocity(right, d2phi),
    }
    scale = max(1.0, abs(right.p), float(np.max(np.abs(right.H))))
    bad = {k: v for k, v in residuals.items() if abs(v) > tol * scale}
    if bad:
        raise PreconditionError(f"contact boundary conditions fail: {bad}", condition="(12')")


def boundary_signature(
    params: ThermoParams,
    left: PrimitiveState,
    right: PrimitiveState,
    d2phi: float,
    dtphi: float,
    rtol: float = 1e-9,
    tol: float = 1e-9,
    enforce_field_margin: bool = True,
) -> BoundarySignature:
    """Eigenvalue signs of (frakA1, frakA0) and rank of frakA1
    
    ``right`` is the trace from Omega+ (x1 > phi), ``left`` from Omega-.
    """
    _require_planar(left)
    _require_planar(right)
    if enforce_field_margin:
        for name, st in (("+", right), ("-", left)):
            HN = normal_field(st, d2phi)
            if abs(HN) < params.kappa:
                raise PreconditionError(
                    f"|H_N{name}| = {abs(HN):.6g} < kappa = {params.kappa}", condition="(mf.1)"
                )
    check_contact_traces(params, left, right, d2phi, dtphi, tol)
    
    U_p = _checked_unknowns(params, right)
    U_m = _checked_unknowns(params, left)
    frakA0, frakA1 = boundary_matrices(params, U_p, U_m, d2phi, dtphi)
    eigs, _ = generalized_eigh(frakA1, frakA0)
    threshold = rtol * float(np.max(np.abs(eigs)))
    n_pos, n_neg, n_zero = (int(x) for x in _sign_counts(eigs, threshold))
    sv = np.linalg.svd(frakA1, compute_uv=False)
    rank = int(np.sum(sv > rtol * sv.max()))
    
    side_counts, side_eigs = {}, {}
    for name, sl in (("+", slice(0, 6)), ("-", slice(6, 12))):
        e, _ = generalized_eigh(frakA1[sl, sl], frakA0[sl, sl])
        side_eigs[name] = e
        side_counts[name] = tuple(int(x) for x in _sign_counts(e, threshold))
    sig = BoundarySignature(n_pos, n_neg, n_zero, rank, eigs, threshold, side_counts, side_eigs)
    if sig.degenerate:
        logger.warning(f"⚠️ degenerate boundary signature: {n_zero} zero eigenvalues")
    return sig


def boundary_signature_batch(
    params: ThermoParams,
    U_plus: np.ndarray,
    U_minus: np.ndarray,
    d2phi: np.ndarray,
    dtphi: np.ndarray,
    rtol: float = 1e-9,
) -> Dict[str, np.ndarray]:
    """Vectorized sign counts and ranks over many boundary points"""
    frakA0, frakA1 = boundary_matrices(params, U_plus, U_minus, d2phi, dtphi)
    eigs = generalized_eigvalsh(frakA1, frakA0)
    threshold = rtol * np.max(np.abs(eigs), axis=-1)
    n_pos, n_neg, n_zero = _sign_counts(eigs, threshold)
    sv = np.linalg.svd(frakA1, compute_uv=False)
    rank = np.sum(sv > rtol * sv.max(axis=-1, keepdims=True), axis=-1)
    side = {}
    for name, sl in (("plus", slice(0, 6)), ("minus", slice(6, 12))):
        e = generalized_eigvalsh(frakA1[..., sl, sl], frakA0[..., sl, sl])
        side[name] = e
    return {
        "n_pos": n_pos,
        "n_neg": n_neg,
        "n_zero": n_zero,
        "rank": rank,
        "eigenvalues": eigs,
        "radius": np.max(np.abs(eigs), axis=-1),
        "side_plus": side["plus"],
        "side_minus": side["minus"],
    }
