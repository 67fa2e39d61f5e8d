"""Fixed-nuclei transition amplitudes for the two-centre target."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelModel, Kinematics, omega
from .numerics import legendre_all, sph_bessel_all

L_PAD = 20
PW_TAIL_TOL = 1e-12


class ConvergenceError(RuntimeError):
    pass


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class Geometry:
    k_hat: np.ndarray
    k0_hat: np.ndarray
    r_hat: np.ndarray
    R: float

    def __post_init__(self):
        for name in ("k_hat", "k0_hat", "r_hat"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a unit 3-vector")
            object.__setattr__(self, name, v)
        if self.R <= 0:
            raise ValueError("R must be positive")

    @classmethod
    def from_angles(cls, scatter: float, r_polar: float, r_azimuth: float, R: float, k_azimuth: float = 0.0):
        """Incident beam along z; outgoing direction at polar angle ``scatter``."""
        k_hat = [math.sin(scatter) * math.cos(k_azimuth), math.sin(scatter) * math.sin(k_azimuth), math.cos(scatter)]
        r_hat = [math.sin(r_polar) * math.cos(r_azimuth), math.sin(r_polar) * math.sin(r_azimuth), math.cos(r_polar)]
        return cls(_unit(k_hat), np.array([0.0, 0.0, 1.0]), _unit(r_hat), R)


def closed_form(parity: float, om_plus, om_minus, kr, k0r):
    """Amplitude from Omega^(+/-) and the phases k.R, k0.R (broadcasting)."""
    if parity > 0:
        return -2.0 * om_plus * np.cos(kr) * np.cos(k0r) - 2.0 * om_minus * np.sin(kr) * np.sin(k0r)
    return 2j * om_minus * np.cos(kr) * np.sin(k0r) - 2j * om_plus * np.sin(kr) * np.cos(k0r)


def f_fixed_nuclei(model: ChannelModel, kin: Kinematics, n: int, geom: Geometry) -> complex:
    k = kin.outgoing(n)
    om_p = omega(model, kin, +1, geom.R)[n]
    om_m = omega(model, kin, -1, geom.R)[n]
    kr = k * geom.R * float(geom.k_hat @ geom.r_hat)
    k0r = kin.k_in * geom.R * float(geom.k0_hat @ geom.r_hat)
    return complex(closed_form(model.parity_products[n], om_p, om_m, kr, k0r))


def f_partial_wave(model: ChannelModel, kin: Kinematics, n: int, geom: Geometry, l_max: int | None = None) -> complex:
    """Amplitude from its Legendre expansion in the molecular-axis direction.

    The m-sums of the spherical-harmonic expansion are collapsed with the
    addition theorem, so each order carries P_l(r_hat . unit(k +/- k0)).
    Only even l enter for parity product +1, only odd l for -1.
    """
    k_vec = kin.outgoing(n) * geom.k_hat
    k0_vec = kin.k_in * geom.k0_hat
    om_p = omega(model, kin, +1, geom.R)[n]
    om_m = omega(model, kin, -1, geom.R)[n]
    start = 0 if model.parity_products[n] > 0 else 1

    pieces = []
    for q_vec, weight in ((k_vec + k0_vec, om_p - om_m), (k_vec - k0_vec, om_p + om_m)):
        q = float(np.linalg.norm(q_vec))
        cos_t = float(geom.r_hat @ q_vec) / q if q > 0 else 1.0
        pieces.append((q, min(max(cos_t, -1.0), 1.0), weight))

    if l_max is None:
        l_max = math.ceil(max(q for q, _, _ in pieces) * geom.R) + L_PAD
    ls = np.arange(l_max + 1)
    terms = np.zeros(l_max + 1, dtype=complex)
    for q, cos_t, weight in pieces:
        terms += weight * sph_bessel_all(l_max, q * geom.R) * legendre_all(l_max, cos_t)
    terms *= -(2 * ls + 1) * (1j ** ls)
    terms[1 - start::2] = 0.0

    total = np.cumsum(terms)
    tail = [abs(t) for t in terms[start::2][-3:]]
    if len(tail) == 3 and all(t > PW_TAIL_TOL * max(abs(total[-1]), 1e-300) for t in tail):
        raise ConvergenceError(f"partial-wave sum not converged at l_max={l_max}")
    return complex(total[-1])
