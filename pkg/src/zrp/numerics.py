"""Special functions and quadrature rules.

Everything here is vectorised over the argument (``x`` / ``z``) and works on
real inputs only. The ``*_all`` variants return every order up to ``l_max``
along the leading axis, which is what the partial-wave sums need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

L_HARD_CAP = 1024
SINC_SERIES_THRESHOLD = 1e-6


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the last axis of ``values``."""
        return np.asarray(values) @ self.weights

    def __len__(self) -> int:
        return len(self.nodes)


def _check_order(l: int) -> None:
    if l < 0 or l > L_HARD_CAP:
        raise DomainError(f"order {l} outside [0, {L_HARD_CAP}]")


def legendre_all(l_max: int, x) -> np.ndarray:
    """P_0..P_{l_max} at ``x``; shape ``(l_max + 1,) + shape(x)``."""
    _check_order(l_max)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise DomainError("Legendre argument must satisfy |x| <= 1")
    x = np.clip(x, -1.0, 1.0)
    out = np.empty((l_max + 1,) + x.shape)
    out[0] = 1.0
    if l_max >= 1:
        out[1] = x
    for l in range(1, l_max):
        out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1)
    return out


def legendre_p(l: int, x):
    """Legendre polynomial P_l(x) by the three-term recurrence."""
    p = legendre_all(l, x)[l]
    return float(p) if p.ndim == 0 else p


def sinc_safe(x):
    """sin(x)/x, exactly 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)
    x2 = x * x
    series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    out = np.where(small, series, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def sph_bessel_all(l_max: int, z) -> np.ndarray:
    """Spherical Bessel functions j_0..j_{l_max} of real ``z >= 0``.

    Upward recurrence is used while ``l <= floor(z)`` (where it is stable);
    above that the ratios j_l/j_{l-1} come from a downward recurrence that
    starts well past both ``l_max`` and ``z``, and are chained onto the last
    upward value.
    """
    _check_order(l_max)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("spherical Bessel argument must be >= 0")
    shape = z.shape
    z = z.ravel()
    out = np.empty((l_max + 1, z.size))

    # last order computed by upward recurrence; j_0 never vanishes for z < 1
    l_up = np.where(z >= 1.0, np.floor(z), 0.0).astype(int)
    l_up = np.minimum(l_up, l_max)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zs = np.where(z > 0, z, 1.0)
        up_prev = sinc_safe(z)
        out[0] = up_prev
        if l_max >= 1:
            up_cur = (np.sin(zs) / zs - np.cos(zs)) / zs

        # downward ratios r_l = j_l / j_{l-1} = z / (2l + 1 - z r_{l+1})
        top = int(max(l_max, np.max(z, initial=0.0))) + 40
        top += int(2.0 * math.sqrt(np.max(z, initial=0.0) + 1.0))
        ratio = np.zeros((l_max + 1, z.size))
        r = np.zeros(z.size)
        for l in range(top, 0, -1):
            r = z / (2 * l + 1 - z * r)
            if l <= l_max:
                ratio[l] = r

        for l in range(1, l_max + 1):
            chained = out[l - 1] * ratio[l]
            out[l] = np.where(l <= l_up, up_cur, chained)
            if l < l_max:
                up_next = (2 * l + 1) / zs * up_cur - up_prev
                up_prev, up_cur = up_cur, up_next
    return out.reshape((l_max + 1,) + shape)


def sph_bessel_j(l: int, z):
    """Spherical Bessel function j_l(z) for real ``z >= 0``."""
    j = sph_bessel_all(l, z)[l]
    return float(j) if j.ndim == 0 else j


def laguerre(v: int, xi: float, z):
    """Generalized Laguerre polynomial L_v^xi(z) for real (non-integer) xi > 0."""
    if xi <= 0:
        raise DomainError(f"Laguerre upper index must be positive, got {xi}")
    if v < 0:
        raise DomainError("Laguerre degree must be nonnegative")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if v == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = 1.0 + xi - z
    for k in range(1, v):
        prev, cur = cur, ((2 * k + xi + 1 - z) * cur - (k + xi) * prev) / (k + 1)
    return float(cur) if np.ndim(cur) == 0 else cur


def ln_gamma(x: float) -> float:
    if x <= 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def gauss_rule(n: int, lo: float, hi: float) -> QuadratureRule:
    """Gauss-Legendre rule with ``n`` nodes mapped onto ``[lo, hi]``."""
    if n < 2:
        raise ValueError("gauss_rule needs n >= 2")
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return QuadratureRule(nodes=lo + half * (x + 1.0), weights=half * w, interval=(lo, hi))
