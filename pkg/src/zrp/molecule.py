"""Morse electronic terms and their vibrational harmonics.

``R`` is the half internuclear distance everywhere, so the radial kinetic
operator is ``-1/(8 mu) d^2/dR^2`` and the Morse exponent carries
``2 sqrt(2 mu anharm)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .numerics import QuadratureRule, gauss_rule, laguerre, ln_gamma

H2_REDUCED_MASS = 918.0764
R_FLOOR = 1e-3
TAIL_MASS = 1e-13
DEFAULT_RADIAL_NODES = 256


class ModelError(ValueError):
    """Physically inconsistent model parameters."""


@dataclass(frozen=True)
class MorseState:
    omega: float
    anharm: float
    r_eq: float
    u_offset: float
    mu: float = H2_REDUCED_MASS

    def __post_init__(self):
        if self.omega <= 0 or self.anharm <= 0:
            raise ModelError("omega and anharm must be positive")
        if self.omega / self.anharm <= 1:
            raise ModelError("omega/anharm <= 1: no bound vibrational state")
        if self.r_eq <= 0 or self.mu <= 0:
            raise ModelError("r_eq and mu must be positive")

    @classmethod
    def ground(cls, omega: float, anharm: float, r_eq: float, mu: float = H2_REDUCED_MASS):
        """State whose v = 0 level sits exactly at zero energy."""
        return cls(omega, anharm, r_eq, -omega / 2 + anharm / 4, mu)

    @classmethod
    def with_origin(cls, omega, anharm, r_eq, e_origin, mu=H2_REDUCED_MASS):
        """State whose v = 0 level sits at ``e_origin``."""
        return cls(omega, anharm, r_eq, e_origin - omega / 2 + anharm / 4, mu)

    @property
    def beta(self) -> float:
        """Morse exponent in the half-distance variable."""
        return 2.0 * math.sqrt(2.0 * self.mu * self.anharm)

    @property
    def well_depth(self) -> float:
        return self.omega**2 / (4.0 * self.anharm)

    def z(self, R):
        return self.omega / self.anharm * np.exp(-self.beta * (np.asarray(R, dtype=float) - self.r_eq))


def morse_potential(s: MorseState, R):
    R = np.asarray(R, dtype=float)
    u = s.well_depth * (1.0 - np.exp(-s.beta * (R - s.r_eq))) ** 2 + s.u_offset
    return float(u) if u.ndim == 0 else u


def v_max(s: MorseState) -> int:
    """Highest v with xi = omega/anharm - 2v - 1 > 0."""
    ratio = s.omega / s.anharm
    v = math.floor((ratio - 1.0) / 2.0)
    while v >= 0 and ratio - 2 * v - 1 <= 0:
        v -= 1
    if v < 0:
        raise ModelError("no bound vibrational state")
    return v


def _check_level(s: MorseState, v: int) -> None:
    vm = v_max(s)
    if v < 0 or v > vm:
        raise ValueError(f"vibrational level v={v} outside 0..v_max={vm}")


def energy_level(s: MorseState, v: int) -> float:
    _check_level(s, v)
    return s.omega * (v + 0.5) - s.anharm * (v + 0.5) ** 2 + s.u_offset


@dataclass(frozen=True)
class VibHarmonic:
    """Normalised X_v(R) of one Morse state.

    ``log_c`` is the analytic normalisation constant ln C_v; ``norm`` is the
    extra factor that brings the numerical norm on the reference grid to 1.
    """

    state: MorseState
    v: int
    norm: float = field(default=1.0)

    @property
    def xi(self) -> float:
        return self.state.omega / self.state.anharm - 2 * self.v - 1

    @cached_property
    def log_c(self) -> float:
        xi = self.xi
        return (
            ln_gamma(xi + self.v + 1)
            - math.lgamma(self.v + 1)
            - math.log(xi * math.sqrt(8.0 * self.state.mu * self.state.anharm))
        )

    def raw(self, R):
        """Harmonic with only the analytic prefactor C_v^(-1/2)."""
        R = np.asarray(R, dtype=float)
        s = self.state
        log_z = math.log(s.omega / s.anharm) - s.beta * (R - s.r_eq)
        z = np.exp(log_z)
        envelope = np.exp(0.5 * self.xi * log_z - 0.5 * z - 0.5 * self.log_c)
        return envelope * laguerre(self.v, self.xi, z)

    def __call__(self, R):
        x = self.norm * self.raw(R)
        return float(x) if np.ndim(x) == 0 else x


def _support(h: VibHarmonic, tail: float = TAIL_MASS) -> tuple[float, float]:
    """Interval outside which X^2 carries less than ``tail`` on each side."""
    s = h.state
    xi = h.xi
    # z -> 0 is the large-R side, X^2 ~ z^xi there
    z_small = math.exp(-(60.0 + 2 * h.v) / xi)
    z_large = xi + 4 * h.v + 2 + 30.0 * math.sqrt(xi + 2 * h.v + 1) + 80.0
    ratio = s.omega / s.anharm
    r_lo = max(s.r_eq - math.log(z_large / ratio) / s.beta, R_FLOOR)
    r_hi = s.r_eq - math.log(z_small / ratio) / s.beta
    R = np.linspace(r_lo, r_hi, 40001)
    dens = h.raw(R) ** 2
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(R))])
    total = cum[-1]
    i_lo = max(np.searchsorted(cum, tail * total) - 1, 0)
    i_hi = min(np.searchsorted(cum, (1.0 - tail) * total) + 1, len(R) - 1)
    return float(R[i_lo]), float(R[i_hi])


def support_interval(s: MorseState, v_hi: int) -> tuple[float, float]:
    """Union of the supports of X_0..X_{v_hi}."""
    _check_level(s, v_hi)
    spans = [_support(VibHarmonic(s, v)) for v in range(v_hi + 1)]
    return min(a for a, _ in spans), max(b for _, b in spans)


def radial_rule(intervals, n_nodes: int = DEFAULT_RADIAL_NODES) -> QuadratureRule:
    lo = max(min(a for a, _ in intervals), R_FLOOR)
    hi = max(b for _, b in intervals)
    return gauss_rule(n_nodes, lo, hi)


def reference_grid(s: MorseState, v_hi: int, n_nodes: int = DEFAULT_RADIAL_NODES) -> QuadratureRule:
    return radial_rule([support_interval(s, v_hi)], n_nodes)


def vib_harmonic(s: MorseState, v: int, n_nodes: int = DEFAULT_RADIAL_NODES) -> VibHarmonic:
    """Harmonic renormalised to unit norm on its own reference grid."""
    _check_level(s, v)
    h = VibHarmonic(s, v)
    rule = reference_grid(s, v, n_nodes)
    n2 = rule.integrate(h.raw(rule.nodes) ** 2)
    return VibHarmonic(s, v, norm=1.0 / math.sqrt(n2))
