"""Binary entropy, its inverse, and conditional entropies (all in bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

CLAMP_TOL = 1e-9
_LN2 = math.log(2.0)


def _clamp01(x: float) -> float:
    if x < 0.0:
        if x < -CLAMP_TOL:
            raise DomainError(f"{x} is outside [0, 1]")
        return 0.0
    if x > 1.0:
        if x > 1.0 + CLAMP_TOL:
            raise DomainError(f"{x} is outside [0, 1]")
        return 1.0
    return x


def binary_entropy_h(x: float) -> float:
    """Entropy of a coin with bias ``(1 + x) / 2``, for ``x`` in [0, 1].

    Written as ``1 - [(1+x) log(1+x) + (1-x) log(1-x)] / 2`` so that values
    close to 1 keep full relative precision.
    """
    x = _clamp01(float(x))
    if x == 1.0:
        return 0.0
    return 1.0 - ((1.0 + x) * math.log1p(x) + (1.0 - x) * math.log1p(-x)) / (2.0 * _LN2)


def binary_entropy_h_array(x) -> np.ndarray:
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    safe = np.where(x < 1.0, x, 0.0)
    minus = np.where(x < 1.0, (1.0 - x) * np.log1p(-safe), 0.0)
    return 1.0 - ((1.0 + x) * np.log1p(x) + minus) / (2.0 * _LN2)


def binary_entropy_inv_g(y: float, tol: float = 1e-14, max_iter: int = 100) -> float:
    """Inverse of :func:`binary_entropy_h` on [0, 1], by bisection."""
    y = _clamp01(float(y))
    if y >= 1.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if binary_entropy_h(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def binary_entropy_inv_g_array(y, iters: int = 60) -> np.ndarray:
    """Elementwise :func:`binary_entropy_inv_g` by a fixed number of bisection steps."""
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    lo, hi = np.zeros_like(y), np.ones_like(y)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = binary_entropy_h_array(mid) > y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


h = binary_entropy_h
g = binary_entropy_inv_g


def shannon(probs) -> float:
    """Shannon entropy with the ``0 log 0 = 0`` convention."""
    total = 0.0
    for p in np.asarray(probs, dtype=float).ravel():
        if p > 0.0:
            total -= p * math.log2(p)
    return total


@dataclass(frozen=True, eq=False)
class JointDist:
    """Joint distribution ``p(x, y)``; rows index ``x``, columns index ``y``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2:
            raise DomainError("joint table must be two-dimensional")
        if np.any(t < -1e-15):
            raise DomainError("joint table has negative entries")
        if abs(t.sum() - 1.0) > 1e-12:
            raise DomainError(f"joint table sums to {t.sum()}")
        t = np.clip(t, 0.0, None)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def _table(j) -> np.ndarray:
    return j.table if isinstance(j, JointDist) else np.asarray(j, dtype=float)


def conditional_entropy(j) -> float:
    """``H(X|Y)`` where ``X`` indexes rows and ``Y`` columns.

    Computed as the outcome-weighted average of the conditional row
    distributions.
    """
    t = _table(j)
    total = 0.0
    for col in t.T:
        py = float(col.sum())
        if py <= 0.0:
            continue
        for pxy in col:
            if pxy > 0.0:
                total -= pxy * math.log2(pxy / py)
    return max(total, 0.0)


def conditional_entropy_chain(j) -> float:
    """``H(X, Y) - H(Y)``; a second route to :func:`conditional_entropy`."""
    t = _table(j)
    return shannon(t) - shannon(t.sum(axis=0))


def observable_entropy(a, rho) -> float:
    """Entropy of the outcome of measuring ``a . sigma`` on ``rho``."""
    return binary_entropy_h(abs(float(a.axis @ rho.r)))
