"""Forward-mode dual arrays

A ``Dual`` carries a value array and one directional derivative array of the
same shape. The matrix assembly in ``symmetrizer`` is written against the
small operator set below, so running it on ``Dual`` inputs yields the
directional derivative (Y, grad_y A) of every coefficient matrix exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

ArrayLike = Union[np.ndarray, float, "Dual"]


@dataclass
class Dual:
    """Value + directional derivative"""
    
    val: np.ndarray
    eps: np.ndarray
    
    # numpy must defer binary operators to us
    __array_ufunc__ = None
    
    def __post_init__(self):
        self.val = np.asarray(self.val, dtype=float)
        self.eps = np.broadcast_to(np.asarray(self.eps, dtype=float), self.val.shape).copy()
    
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.val.shape
    
    @property
    def ndim(self) -> int:
        return self.val.ndim
    
    def __getitem__(self, key) -> "Dual":
        return Dual(self.val[key], self.eps[key])
    
    def __neg__(self) -> "Dual":
        return Dual(-self.val, -self.eps)
    
    def __add__(self, other: ArrayLike) -> "Dual":
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.eps + other.eps)
        val = self.val + other
        return Dual(val, np.broadcast_to(self.eps, val.shape))
    
    __radd__ = __add__
    
    def __sub__(self, other: ArrayLike) -> "Dual":
        return self + (-other)
    
    def __rsub__(self, other: ArrayLike) -> "Dual":
        return (-self) + other
    
    def __mul__(self, other: ArrayLike) -> "Dual":
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.eps * other.val + self.val * other.eps)
        other = np.asarray(other, dtype=float)
        return Dual(self.val * other, self.eps * other)
    
    __rmul__ = __mul__
    
    def __truediv__(self, other: ArrayLike) -> "Dual":
        if isinstance(other, Dual):
            val = self.val / other.val
            return Dual(val, (self.eps - val * other.eps) / other.val)
        other = np.asarray(other, dtype=float)
        return Dual(self.val / other, self.eps / other)
    
    def __rtruediv__(self, other: ArrayLike) -> "Dual":
        other = np.asarray(other, dtype=float)
        val = other / self.val
        return Dual(val, -val * self.eps / self.val)
    
    def __pow__(self, k: float) -> "Dual":
        return Dual(self.val ** k, k * self.val ** (k - 1.0) * self.eps)
    
    def sum(self, axis: int = -1) -> "Dual":
        return Dual(self.val.sum(axis=axis), self.eps.sum(axis=axis))
    
    def swapaxes(self, a: int, b: int) -> "Dual":
        return Dual(np.swapaxes(self.val, a, b), np.swapaxes(self.eps, a, b))


def is_dual(x) -> bool:
    return isinstance(x, Dual)


def value(x: ArrayLike) -> np.ndarray:
    """Strip the derivative part"""
    return x.val if isinstance(x, Dual) else np.asarray(x, dtype=float)


def derivative(x: ArrayLike) -> np.ndarray:
    """Derivative part (zero for plain arrays)"""
    if isinstance(x, Dual):
        return x.eps
    return np.zeros_like(np.asarray(x, dtype=float))


def sqrt(x: ArrayLike) -> ArrayLike:
    if isinstance(x, Dual):
        r = np.sqrt(x.val)
        return Dual(r, 0.5 * x.eps / r)
    return np.sqrt(x)


def exp(x: ArrayLike) -> ArrayLike:
    if isinstance(x, Dual):
        e = np.exp(x.val)
        return Dual(e, e * x.eps)
    return np.exp(x)


def power(x: ArrayLike, k: float) -> ArrayLike:
    if isinstance(x, Dual):
        return x ** k
    return np.power(x, k)


def dot(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Contraction over the last axis"""
    return (a * b).sum(axis=-1)


def outer(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Batched outer product (..., n) x (..., m) -> (..., n, m)"""
    return a[..., :, None] * b[..., None, :]


def seed(x: np.ndarray, direction: np.ndarray) -> Dual:
    """Lift ``x`` to a Dual pointing along ``direction``"""
    return Dual(np.asarray(x, dtype=float), np.asarray(direction, dtype=float))


class MatrixBuilder:
    """Symmetric block matrix assembler working on arrays and Duals alike
    
    Only blocks on or above the diagonal are written; ``build`` mirrors the
    strict upper triangle so the result is symmetric bit for bit.
    """
    
    def __init__(self, batch_shape: Sequence[int], n: int, dual: bool = False):
        self.shape = tuple(batch_shape) + (n, n)
        self.val = np.zeros(self.shape)
        self.eps = np.zeros(self.shape) if dual else None
    
    def put(self, row: int, col: int, block: ArrayLike, scalar: bool = False) -> None:
        """Write ``block`` of shape (..., r, c) at (row, col); scalars are (...)"""
        if scalar:
            if isinstance(block, Dual):
                block = block[..., None, None]
            else:
                block = np.asarray(block, dtype=float)[..., None, None]
        val = value(block)
        r, c = val.shape[-2], val.shape[-1]
        self.val[..., row:row + r, col:col + c] = val
        if self.eps is not None and isinstance(block, Dual):
            self.eps[..., row:row + r, col:col + c] = block.eps
    
    @staticmethod
    def _mirror(m: np.ndarray) -> np.ndarray:
        upper = np.triu(m)
        return upper + np.swapaxes(np.triu(m, 1), -1, -2)
    
    def build(self) -> ArrayLike:
        val = self._mirror(self.val)
        if self.eps is None:
            return val
        return Dual(val, self._mirror(self.eps))
