"""Symmetric form of the RMHD system

    A0(U) dU/dt + sum_j A_j(U) dU/dx_j = 0,   U = (p, u, H, S)

All matrices are assembled from closed-form outer products, batched over any
leading axes. The same kernels accept ``dual.Dual`` unknowns, which gives the
directional matrix derivatives (Y, grad_y A) used by the linearized operator.
The flux parts G_j = A_j - v_j A0 have their own explicit assembly so the two
paths can be compared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
import logging

import numpy as np

from app.errors import AdmissibilityError, DomainError
from app.physics import dual
from app.physics.eos import ThermoParams, _density
from app.physics.kinematics import PLANAR_INDEX, PrimitiveState

logger = logging.getLogger(__name__)

I3 = np.eye(3)
E = np.eye(3)  # e_j = E[j]


def _T(x):
    return x.swapaxes(-1, -2) if dual.is_dual(x) else np.swapaxes(x, -1, -2)


def _scal(c):
    """Scalar field (...) -> (..., 1, 1) for broadcasting against 3x3 blocks"""
    return c[..., None, None]


def _vec(c):
    """Scalar field (...) -> (..., 1) for broadcasting against vectors"""
    return c[..., None]


@dataclass
class _Fields:
    """Pointwise quantities entering the matrix blocks"""
    
    p: object
    u: object
    H: object
    gamma: object
    v: object
    rhoh: object
    vH: object
    H2: object
    b: object
    B2: object


def _fields(params: ThermoParams, U) -> _Fields:
    p = U[..., 0]
    u = U[..., 1:4]
    H = U[..., 4:7]
    S = U[..., 7]
    gamma = dual.sqrt(1.0 + dual.dot(u, u))
    v = u / _vec(gamma)
    rho = _density(params, p, S)
    rhoh = rho + params.gamma * p / (params.gamma - 1.0)
    vH = dual.dot(v, H)
    H2 = dual.dot(H, H)
    b = H / _vec(gamma) + _vec(gamma * vH) * v
    B2 = H2 / (gamma * gamma) + vH * vH
    return _Fields(p=p, u=u, H=H, gamma=gamma, v=v, rhoh=rhoh, vH=vH, H2=H2, b=b, B2=B2)


def _blocks(f: _Fields) -> Dict[str, object]:
    """Direction-independent blocks calA and calM"""
    vv = dual.outer(f.v, f.v)
    sym_vH = dual.outer(f.v, f.H) + dual.outer(f.H, f.v)
    calA = (
        _scal(f.rhoh * f.gamma + f.H2 / f.gamma) * I3
        - _scal(f.rhoh * f.gamma + (f.H2 + f.B2) / f.gamma) * vv
        - dual.outer(f.H, f.H) / _scal(f.gamma)
        + _scal(f.vH / f.gamma) * sym_vH
    )
    calM = (I3 + dual.outer(f.u, f.u)) / _scal(f.gamma)
    return {"calA": calA, "calM": calM}


def _direction_blocks(f: _Fields, N) -> Dict[str, object]:
    """calN_N, calA_N and calG_N for a (constant) direction N = (..., 3)"""
    N = np.asarray(N, dtype=float)
    vN = dual.dot(f.v, N)
    HN = dual.dot(f.H, N)
    vv = dual.outer(f.v, f.v)
    sym_vH = dual.outer(f.v, f.H) + dual.outer(f.H, f.v)
    Nb = np.broadcast_to(N, dual.value(f.v).shape)
    sym_HN = dual.outer(f.H, Nb) + dual.outer(Nb, f.H)
    sym_vN = dual.outer(f.v, Nb) + dual.outer(Nb, f.v)
    
    calN = (
        dual.outer(f.b, Nb) / _scal(f.gamma)
        - _scal(vN / f.gamma) * dual.outer(f.b, f.v)
        - _scal(HN / (f.gamma * f.gamma)) * I3
    )
    calA_N = (
        _scal(vN) * (
            _scal(f.rhoh * f.gamma + f.H2 / f.gamma) * I3
            - _scal(f.rhoh * f.gamma + (f.H2 - f.B2) / f.gamma) * vv
            - dual.outer(f.H, f.H) / _scal(f.gamma)
        )
        + _scal(HN / f.gamma) * (sym_vH / _scal(f.gamma * f.gamma) - _scal(2.0 * f.vH) * (I3 - vv))
        + _scal(f.vH / f.gamma) * sym_HN
        - _scal(f.B2 / f.gamma) * sym_vN
    )
    # written out separately from calA_N; the conservative-flux check compares them
    calG_N = (
        _scal(2.0 * vN * f.B2 / f.gamma) * vv
        - _scal(vN * f.vH / f.gamma) * sym_vH
        + _scal(HN / f.gamma ** 3) * sym_vH
        - _scal(2.0 * HN * f.vH / f.gamma) * I3
        + _scal(2.0 * HN * f.vH / f.gamma) * vv
        + _scal(f.vH / f.gamma) * sym_HN
        - _scal(f.B2 / f.gamma) * sym_vN
    )
    return {"calN": calN, "calA_N": calA_N, "calG_N": calG_N, "vN": vN, "N": Nb}


def _batch(U) -> Tuple[Tuple[int, ...], bool]:
    return dual.value(U).shape[:-1], dual.is_dual(U)


def _a0(params: ThermoParams, U, f: _Fields, blocks) -> object:
    shape, is_dual = _batch(U)
    mb = dual.MatrixBuilder(shape, 8, dual=is_dual)
    mb.put(0, 0, f.gamma / (params.gamma * f.p), scalar=True)
    mb.put(0, 1, f.v[..., None, :])
    mb.put(1, 1, blocks["calA"])
    mb.put(4, 4, blocks["calM"])
    mb.put(7, 7, np.ones(shape), scalar=True)
    return mb.build()


def _aN(params: ThermoParams, U, f: _Fields, blocks, d) -> object:
    """A_N = sum_j N_j A_j"""
    shape, is_dual = _batch(U)
    mb = dual.MatrixBuilder(shape, 8, dual=is_dual)
    mb.put(0, 0, dual.dot(f.u, d["N"]) / (params.gamma * f.p), scalar=True)
    mb.put(0, 1, np.broadcast_to(d["N"], shape + (3,))[..., None, :])
    mb.put(1, 1, d["calA_N"])
    mb.put(1, 4, _T(d["calN"]))
    mb.put(4, 4, _scal(d["vN"]) * blocks["calM"])
    mb.put(7, 7, d["vN"], scalar=True)
    return mb.build()


def _gN(U, f: _Fields, d) -> object:
    """G_N = A_N - v_N A0 from its own block formulas"""
    shape, is_dual = _batch(U)
    mb = dual.MatrixBuilder(shape, 8, dual=is_dual)
    row = d["N"] - _vec(d["vN"]) * f.v
    mb.put(0, 1, row[..., None, :])
    mb.put(1, 1, d["calG_N"])
    mb.put(1, 4, _T(d["calN"]))
    return mb.build()


def assemble_unknowns(params: ThermoParams, U, dims: int = 3) -> Tuple[object, ...]:
    """A0, A1 .. A_dims at unknowns U (..., 8); unchecked, dual-aware"""
    f = _fields(params, U)
    blocks = _blocks(f)
    A0 = _a0(params, U, f, blocks)
    A = tuple(_aN(params, U, f, blocks, _direction_blocks(f, E[j])) for j in range(dims))
    return (A0,) + A


def normal_matrix_unknowns(params: ThermoParams, U, N) -> object:
    """A_N = N_1 A_1 + N_2 A_2 + N_3 A_3 for a direction N (..., 3)"""
    f = _fields(params, U)
    return _aN(params, U, f, _blocks(f), _direction_blocks(f, N))


def flux_unknowns(params: ThermoParams, U, N) -> object:
    """G_N at unknowns U for a direction N (..., 3); unchecked, dual-aware"""
    f = _fields(params, U)
    return _gN(U, f, _direction_blocks(f, N))


def a0_unknowns(params: ThermoParams, U) -> object:
    f = _fields(params, U)
    return _a0(params, U, f, _blocks(f))


def planar(M):
    """6x6 planar projection (drop u3, H3) of a batched 8x8 matrix"""
    return M[..., PLANAR_INDEX[:, None], PLANAR_INDEX]


def embed_planar(U6) -> np.ndarray:
    """(..., 6) planar unknowns -> (..., 8) with u3 = H3 = 0"""
    U6 = np.asarray(U6, dtype=float)
    U = np.zeros(U6.shape[:-1] + (8,))
    U[..., PLANAR_INDEX] = U6
    return U


def co_normal(d2phi) -> np.ndarray:
    """N = (1, -d2 phi, 0), batched over the shape of d2phi"""
    s = np.asarray(d2phi, dtype=float)
    return np.stack([np.ones_like(s), -s, np.zeros_like(s)], axis=-1)


@dataclass
class MatrixSet:
    """A0 and A_1..A_3 for one state, with their named blocks"""
    
    A0: np.ndarray
    A: Tuple[np.ndarray, ...]
    blocks: Dict[str, np.ndarray] = field(default_factory=dict)
    
    def block(self, name: str) -> np.ndarray:
        return self.blocks[name]
    
    def planar(self) -> "MatrixSet":
        return MatrixSet(planar(self.A0), tuple(planar(a) for a in self.A), dict(self.blocks))


@dataclass
class FluxMatrices:
    """Flux parts G_j and the boundary matrix G_N"""
    
    G: Tuple[np.ndarray, ...]
    GN: np.ndarray
    blocks: Dict[str, np.ndarray] = field(default_factory=dict)


def _checked_unknowns(params: ThermoParams, state: PrimitiveState) -> np.ndarray:
    if not state.p > 0.0:
        raise DomainError(f"inadmissible state: p={state.p}")
    U = state.unknowns()
    rho = float(_density(params, state.p, state.S))
    cs2 = params.gamma * state.p / (rho + params.gamma * state.p / (params.gamma - 1.0))
    if not 0.0 < cs2 < 1.0:
        raise DomainError(f"causality violated: c_s^2={cs2:.6g}", condition="(9)")
    return U


def assemble(params: ThermoParams, state: PrimitiveState) -> MatrixSet:
    """All coefficient matrices of the symmetric system at one state"""
    U = _checked_unknowns(params, state)
    f = _fields(params, U)
    blocks = _blocks(f)
    named = {"calA": blocks["calA"], "calM": blocks["calM"]}
    A = []
    for j in range(3):
        d = _direction_blocks(f, E[j])
        named[f"calN{j + 1}"] = d["calN"]
        named[f"calA{j + 1}"] = d["calA_N"]
        A.append(_aN(params, U, f, blocks, d))
    return MatrixSet(A0=_a0(params, U, f, blocks), A=tuple(A), blocks=named)


def flux_part(params: ThermoParams, state: PrimitiveState, j: int) -> np.ndarray:
    """G_j (j = 1, 2, 3) from the explicit block formulas"""
    U = _checked_unknowns(params, state)
    return flux_unknowns(params, U, E[j - 1])


def boundary_flux(params: ThermoParams, state: PrimitiveState, d2phi: float) -> np.ndarray:
    """G_N = G_1 - G_2 d2phi for N = (1, -d2phi)"""
    U = _checked_unknowns(params, state)
    return flux_unknowns(params, U, co_normal(d2phi))


def flux_matrices(params: ThermoParams, state: PrimitiveState, d2phi: float = 0.0) -> FluxMatrices:
    U = _checked_unknowns(params, state)
    f = _fields(params, U)
    G, named = [], {}
    for j in range(3):
        d = _direction_blocks(f, E[j])
        named[f"calG{j + 1}"] = d["calG_N"]
        G.append(_gN(U, f, d))
    dN = _direction_blocks(f, co_normal(d2phi))
    named["calN_N"] = dN["calN"]
    named["calG_N"] = dN["calG_N"]
    return FluxMatrices(G=tuple(G), GN=_gN(U, f, dN), blocks=named)


def straightened_A1(
    params: ThermoParams,
    state: PrimitiveState,
    psi_t: float,
    psi_2: float,
    dphi1: float,
) -> np.ndarray:
    """(A1 - A0 dt Psi - A2 d2 Psi) / d1 Phi"""
    if abs(dphi1) < 0.5:
        raise AdmissibilityError(f"|d1 Phi| = {abs(dphi1):.6g} < 1/2", condition="(fi)")
    ms = assemble(params, state)
    return (ms.A[0] - ms.A0 * psi_t - ms.A[1] * psi_2) / dphi1


def a0_is_positive_definite(params: ThermoParams, state: PrimitiveState) -> bool:
    """Cholesky test of A0 without the admissibility precheck"""
    with np.errstate(invalid="ignore", divide="ignore"):
        A0 = a0_unknowns(params, state.unknowns())
    if not np.all(np.isfinite(A0)):
        return False
    try:
        np.linalg.cholesky(A0)
    except np.linalg.LinAlgError:
        return False
    return True


def directional_derivatives(params: ThermoParams, U, Y) -> Tuple[np.ndarray, ...]:
    """(Y, grad_y A_alpha) for alpha = 0..3 by forward-mode differentiation"""
    mats = assemble_unknowns(params, dual.seed(U, Y))
    return tuple(m.eps for m in mats)


def directional_derivatives_fd(params: ThermoParams, U, Y, step: float = 1e-6) -> Tuple[np.ndarray, ...]:
    """Central finite-difference counterpart of ``directional_derivatives``"""
    U = np.asarray(U, dtype=float)
    Y = np.asarray(Y, dtype=float)
    plus = assemble_unknowns(params, U + step * Y)
    minus = assemble_unknowns(params, U - step * Y)
    return tuple((a - b) / (2.0 * step) for a, b in zip(plus, minus))
