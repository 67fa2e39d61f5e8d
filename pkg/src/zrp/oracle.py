"""Brute-force cross-checks for the closed-form amplitudes and averages.

These paths are deliberately written without the Omega^(+/-) decomposition
(``direct_bc_amplitude``), without the analytic orientation average
(``angular_average_dcs``) or without the channel machinery at all
(``elastic_reference``).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .amplitude import Geometry, closed_form
from .channels import ChannelModel, Kinematics, SingularMatrixError, kinematics, omega
from .molecule import DEFAULT_RADIAL_NODES, MorseState
from .numerics import gauss_rule
from .xsection import radial_weights, vib_kinematics


def direct_bc_coefficients(model: ChannelModel, kin: Kinematics, geom: Geometry) -> tuple[np.ndarray, np.ndarray]:
    """Solve the boundary conditions at both centres for C_1, C_2 directly.

    Centre 1 sits at -R r_hat with matrix A_1, centre 2 at +R r_hat with
    A_2 = sigma A_1 sigma.  At centre j the regular part of channel m is
    delta_m0 exp(i k0.R_j) + (C_j')_m exp(2 i k_m R) / (2R).
    """
    N = model.n_channels
    R = geom.R
    k = np.asarray(kin.k, dtype=complex)
    ik = np.diag(1j * k)
    g = np.diag(np.exp(2j * k * R) / (2 * R))

    system = np.zeros((2 * N, 2 * N), dtype=complex)
    system[:N, :N] = model.a1 + ik
    system[:N, N:] = g
    system[N:, N:] = model.a2 + ik
    system[N:, :N] = g

    phase = kin.k_in * R * float(geom.k0_hat @ geom.r_hat)
    rhs = np.zeros(2 * N, dtype=complex)
    rhs[0] = -cmath.exp(-1j * phase)
    rhs[N] = -cmath.exp(1j * phase)
    if np.linalg.cond(system) > 1e12:
        raise SingularMatrixError("boundary-condition system is singular")
    c = np.linalg.solve(system, rhs)
    return c[:N], c[N:]


def direct_bc_amplitude(model: ChannelModel, kin: Kinematics, n: int, geom: Geometry) -> complex:
    """f_n = (C_1)_n exp(i k.R) + (C_2)_n exp(-i k.R) from the direct solve."""
    k_out = kin.outgoing(n)
    c1, c2 = direct_bc_coefficients(model, kin, geom)
    R = geom.R
    out_phase = k_out * R * float(geom.k_hat @ geom.r_hat)
    return complex(c1[n] * cmath.exp(1j * out_phase) + c2[n] * cmath.exp(-1j * out_phase))


def orientation_grid(order: int):
    """Unit vectors and weights (summing to 1) for averaging over directions."""
    rule = gauss_rule(order, -1.0, 1.0)
    phi = 2 * math.pi * np.arange(2 * order) / (2 * order)
    ct, ph = np.meshgrid(rule.nodes, phi, indexing="ij")
    st = np.sqrt(1.0 - ct**2)
    dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
    weights = np.repeat(rule.weights / 2.0, 2 * order) / (2 * order)
    return dirs, weights


def angular_average_dcs(
    model: ChannelModel,
    morse0: MorseState,
    v: int,
    e_in: float,
    n: int,
    angle: float,
    grid_order: int = 32,
    morse_n: MorseState | None = None,
    vp: int | None = None,
    azimuth: float = 0.0,
    n_nodes: int = DEFAULT_RADIAL_NODES,
    amplitude=None,
) -> float:
    """Orientation average of the fixed-nuclei DCS by direct quadrature.

    Without ``vp`` this is the closure (pure electronic) form, averaging
    |f|^2 weighted by |X_0v|^2.  With ``vp`` the radial matrix element
    <X_nv'|f|X_0v> is formed first at each orientation and then squared.
    ``amplitude`` may replace f by a callable of the orientation vectors
    (used for normalisation checks).
    """
    if grid_order < 8:
        raise ValueError("grid_order must be >= 8")
    vib = vp is not None
    if vib:
        kin = vib_kinematics(model, morse0, morse_n, v, vp, e_in, n)
        rule, w = radial_weights(morse0, v, morse_n, vp, n_nodes)
    else:
        kin = kinematics(model, e_in)
        rule, w = radial_weights(morse0, v, n_nodes=n_nodes)
    k = kin.outgoing(n)
    k0 = kin.k_in
    R = rule.nodes

    dirs, dw = orientation_grid(grid_order)
    k_hat = np.array([math.sin(angle) * math.cos(azimuth), math.sin(angle) * math.sin(azimuth), math.cos(angle)])
    k0_hat = np.array([0.0, 0.0, 1.0])

    if amplitude is None:
        om_p = omega(model, kin, +1, R)[:, n]
        om_m = omega(model, kin, -1, R)[:, n]
        kr = k * np.outer(dirs @ k_hat, R)
        k0r = k0 * np.outer(dirs @ k0_hat, R)
        f = closed_form(model.parity_products[n], om_p[None, :], om_m[None, :], kr, k0r)
    else:
        f = np.broadcast_to(amplitude(dirs)[:, None], (len(dirs), len(R)))

    if vib:
        m = f @ w
        avg = dw @ np.abs(m) ** 2
    else:
        avg = dw @ (np.abs(f) ** 2 @ w)
    return float(k / k0 * avg)


def solid_angle_integral(dcs_of_angle, order: int = 64) -> float:
    """2 pi * integral of an azimuthally symmetric DCS over cos(angle)."""
    rule = gauss_rule(order, -1.0, 1.0)
    vals = np.asarray(dcs_of_angle(np.arccos(rule.nodes)), dtype=float)
    return float(2 * math.pi * (vals @ rule.weights))


def _elastic_omegas(alpha, k0, R):
    R = np.asarray(R, dtype=float)
    tail = np.exp(2j * k0 * R) / (2 * R)
    base = alpha + 1j * k0
    return 1.0 / (base + tail), 1.0 / (base - tail)


def _sinc(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0, 1.0, x)
    return np.where(x == 0, 1.0, np.sin(safe) / safe)


def elastic_reference(alpha: float, k0: float, R, angle, weights=None):
    """Orientation-averaged elastic DCS of the single-channel two-centre ZRP.

    With ``weights`` (radial quadrature weights times |X|^2) the fixed-R
    values are integrated over R; otherwise one value per R is returned.
    """
    om_p, om_m = _elastic_omegas(alpha, k0, R)
    R = np.asarray(R, dtype=float)
    q_plus = 2 * k0 * abs(math.cos(angle / 2))
    q_minus = 2 * k0 * abs(math.sin(angle / 2))
    s0 = _sinc(2 * k0 * R)
    sp = _sinc(2 * q_plus * R)
    sm = _sinc(2 * q_minus * R)
    a_plus = 1 + 2 * s0 + 0.5 * (sm + sp)
    a_minus = 1 - 2 * s0 + 0.5 * (sm + sp)
    a_cross = 0.5 * (sm - sp)
    vals = abs(om_p) ** 2 * a_plus + abs(om_m) ** 2 * a_minus + 2 * (om_p * np.conj(om_m)).real * a_cross
    return vals if weights is None else float(vals @ weights)


def elastic_reference_ics(alpha: float, k0: float, R, weights=None):
    om_p, om_m = _elastic_omegas(alpha, k0, R)
    s0 = _sinc(2 * k0 * np.asarray(R, dtype=float))
    vals = 4 * math.pi * (abs(om_p) ** 2 * (1 + s0) ** 2 + abs(om_m) ** 2 * (1 - s0) ** 2)
    return vals if weights is None else float(vals @ weights)
