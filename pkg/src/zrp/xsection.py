"""Adiabatic-nuclei cross sections.

Pure electronic DCS/ICS use vibrational closure over final states, so only
|X_0v|^2 enters and the outgoing momentum comes from the channel threshold.
Electron-vibrational DCS/ICS sandwich the amplitude between X_nv' and X_0v
and take the outgoing momentum from the vibrational energy ladder.

All energies are hartree, DCS in bohr^2/sr and ICS in bohr^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .amplitude import ConvergenceError
from .channels import ChannelModel, ClosedChannelError, Kinematics, channel_momentum, kinematics, omega
from .molecule import DEFAULT_RADIAL_NODES, MorseState, energy_level, radial_rule, support_interval, vib_harmonic
from .numerics import QuadratureRule, legendre_all, sinc_safe, sph_bessel_all

L_PAD = 20
TAIL_TOL = 1e-10


@dataclass
class CrossSectionCurve:
    kind: str
    abscissa: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("dcs_pure", "dcs_vib", "ics_pure", "ics_vib"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.abscissa.shape != self.values.shape:
            raise ValueError("abscissa and values must have equal length")


@lru_cache(maxsize=64)
def _radial(morse0: MorseState, v: int, morse_n: MorseState | None, vp: int | None, n_nodes: int):
    """Quadrature rule and the product weight w_i X_nv'(R_i) X_0v(R_i)."""
    spans = [support_interval(morse0, v)]
    if morse_n is not None:
        spans.append(support_interval(morse_n, vp))
    rule = radial_rule(spans, n_nodes)
    x0 = vib_harmonic(morse0, v, n_nodes)(rule.nodes)
    xn = x0 if morse_n is None else vib_harmonic(morse_n, vp, n_nodes)(rule.nodes)
    weight = rule.weights * xn * x0
    weight.setflags(write=False)
    return rule, weight


def radial_weights(morse0, v, morse_n=None, vp=None, n_nodes=DEFAULT_RADIAL_NODES) -> tuple[QuadratureRule, np.ndarray]:
    return _radial(morse0, v, morse_n, vp, n_nodes)


def _open_momentum(kin: Kinematics, n: int) -> float:
    if not kin.is_open(n):
        raise ClosedChannelError(f"channel {n} closed at E={kin.e_in:.8g} hartree")
    return float(kin.k[n].real)


def vib_kinematics(model: ChannelModel, morse0: MorseState, morse_n: MorseState, v: int, vp: int, e_in: float, n: int) -> Kinematics:
    """Channel momenta with k_n fixed by k_n^2/2 = e_in + E_0v - E_nv'."""
    if morse_n is None:
        raise ValueError(f"electron-vibrational transition into channel {n} needs its Morse parameters")
    kin = kinematics(model, e_in)
    return kin.replace(n, channel_momentum(e_in + energy_level(morse0, v) - energy_level(morse_n, vp)))


def _omegas(model, kin, n, R):
    return omega(model, kin, +1, R)[:, n], omega(model, kin, -1, R)[:, n]


def momentum_transfers(k: float, k0: float, angle):
    """|k + k0| and |k - k0| for scattering angle ``angle``."""
    c = np.cos(angle)
    q_plus = np.sqrt(np.maximum(k * k + k0 * k0 + 2 * k * k0 * c, 0.0))
    q_minus = np.sqrt(np.maximum(k * k + k0 * k0 - 2 * k * k0 * c, 0.0))
    return q_plus, q_minus


def dcs_pure(model: ChannelModel, morse0: MorseState, v: int, e_in: float, n: int, angle, n_nodes: int = DEFAULT_RADIAL_NODES):
    """Orientation-averaged DCS for the pure electronic transition 0v -> n."""
    kin = kinematics(model, e_in)
    k = _open_momentum(kin, n)
    k0 = kin.k_in
    if k == 0.0:
        return np.zeros_like(np.asarray(angle, dtype=float)) + 0.0
    rule, w = radial_weights(morse0, v, n_nodes=n_nodes)
    R = rule.nodes
    om_p, om_m = _omegas(model, kin, n, R)
    p = model.parity_products[n]

    ang = np.asarray(angle, dtype=float)
    q_plus, q_minus = momentum_transfers(k, k0, ang[..., None])
    s_k0 = sinc_safe(2 * k0 * R)
    s_k = sinc_safe(2 * k * R)
    s_qm = sinc_safe(2 * q_minus * R)
    s_qp = sinc_safe(2 * q_plus * R)

    a_plus = 1 + s_k0 + p * s_k + 0.5 * p * (s_qm + s_qp)
    a_minus = 1 - s_k0 - p * s_k + 0.5 * p * (s_qm + s_qp)
    a_cross = 0.5 * p * (s_qm - s_qp)
    bracket = np.abs(om_p) ** 2 * a_plus + np.abs(om_m) ** 2 * a_minus + 2 * (om_p * np.conj(om_m)).real * a_cross
    out = k / k0 * (bracket @ w)
    return float(out) if out.ndim == 0 else out


def ics_pure(model: ChannelModel, morse0: MorseState, v: int, e_in: float, n: int, n_nodes: int = DEFAULT_RADIAL_NODES) -> float:
    kin = kinematics(model, e_in)
    k = _open_momentum(kin, n)
    k0 = kin.k_in
    if k == 0.0:
        return 0.0
    rule, w = radial_weights(morse0, v, n_nodes=n_nodes)
    R = rule.nodes
    om_p, om_m = _omegas(model, kin, n, R)
    p = model.parity_products[n]
    s_k = sinc_safe(2 * k * R)
    s_k0 = sinc_safe(2 * k0 * R)
    bracket = np.abs(om_p) ** 2 * (1 + p * s_k) * (1 + s_k0) + np.abs(om_m) ** 2 * (1 - p * s_k) * (1 - s_k0)
    return float(4 * math.pi * k / k0 * (bracket @ w))


def _tail_converged(terms: np.ndarray, total: float, tol: float) -> bool:
    tail = np.abs(terms[-3:])
    return len(tail) < 3 or bool(np.all(tail < tol * max(abs(total), 1e-300)))


def dcs_vib(
    model: ChannelModel,
    morse0: MorseState,
    morse_n: MorseState,
    v: int,
    vp: int,
    e_in: float,
    n: int,
    angle,
    n_nodes: int = DEFAULT_RADIAL_NODES,
    l_pad: int = L_PAD,
    tail_tol: float = TAIL_TOL,
):
    """Orientation-averaged DCS for the transition 0v -> nv'."""
    kin = vib_kinematics(model, morse0, morse_n, v, vp, e_in, n)
    k = _open_momentum(kin, n)
    k0 = kin.k_in
    ang = np.asarray(angle, dtype=float)
    if k == 0.0:
        return np.zeros_like(ang) + 0.0
    rule, w = radial_weights(morse0, v, morse_n, vp, n_nodes)
    R = rule.nodes
    om_p, om_m = _omegas(model, kin, n, R)
    start = 0 if model.parity_products[n] > 0 else 1

    flat = ang.ravel()
    out = np.empty(flat.shape)
    for i, a in enumerate(flat):
        q_plus, q_minus = momentum_transfers(k, k0, a)
        denom = q_plus * q_minus
        cos_t = (k * k - k0 * k0) / denom if denom > 0 else 0.0
        cos_t = min(max(cos_t, -1.0), 1.0)
        l_max = math.ceil(max(q_plus, q_minus) * R[-1]) + l_pad
        while True:
            ls = np.arange(start, l_max + 1, 2)
            g_plus = (sph_bessel_all(l_max, q_plus * R)[ls] * (om_p - om_m)) @ w
            g_minus = (sph_bessel_all(l_max, q_minus * R)[ls] * (om_p + om_m)) @ w
            pl = legendre_all(l_max, cos_t)[ls]
            terms = (2 * ls + 1) * (
                np.abs(g_plus) ** 2 + np.abs(g_minus) ** 2 + 2 * (g_plus * np.conj(g_minus)).real * pl
            )
            total = terms.sum()
            if _tail_converged(terms, total, tail_tol):
                break
            if 2 * l_max > 1024:
                raise ConvergenceError(f"dcs_vib partial-wave sum not converged (l_max={l_max})")
            l_max *= 2
        out[i] = k / k0 * total
    out = out.reshape(ang.shape)
    return float(out) if out.ndim == 0 else out


def ics_vib(
    model: ChannelModel,
    morse0: MorseState,
    morse_n: MorseState,
    v: int,
    vp: int,
    e_in: float,
    n: int,
    n_nodes: int = DEFAULT_RADIAL_NODES,
    l_pad: int = L_PAD,
    tail_tol: float = TAIL_TOL,
) -> float:
    """ICS for 0v -> nv' from the double partial-wave sum over (l, L).

    The Omega^(+) part carries even l and the Omega^(-) part odd l; L takes
    the parity of l for parity product +1 and the opposite parity for -1.
    """
    kin = vib_kinematics(model, morse0, morse_n, v, vp, e_in, n)
    k = _open_momentum(kin, n)
    k0 = kin.k_in
    if k == 0.0:
        return 0.0
    rule, w = radial_weights(morse0, v, morse_n, vp, n_nodes)
    R = rule.nodes
    om_p, om_m = _omegas(model, kin, n, R)
    p = model.parity_products[n]

    l_max = math.ceil(max(k, k0) * R[-1]) + l_pad
    while True:
        j0 = sph_bessel_all(l_max, k0 * R)
        jk = sph_bessel_all(l_max, k * R)
        deg = 2 * np.arange(l_max + 1) + 1
        total = 0.0
        edge = np.zeros(3)
        for om, l_start in ((om_p, 0), (om_m, 1)):
            L_start = l_start if p > 0 else 1 - l_start
            ls = np.arange(l_start, l_max + 1, 2)
            Ls = np.arange(L_start, l_max + 1, 2)
            q = np.einsum("li,Li,i->lL", j0[ls], jk[Ls], om * w)
            contrib = deg[ls][:, None] * deg[Ls][None, :] * np.abs(q) ** 2
            total += contrib.sum()
            # outermost rows and columns of the (l, L) table
            edge += contrib[-3:, :].sum(axis=1) + contrib[:, -3:].sum(axis=0)
        if _tail_converged(edge, total, tail_tol):
            break
        if 2 * l_max > 1024:
            raise ConvergenceError(f"ics_vib partial-wave sum not converged (l_max={l_max})")
        l_max *= 2
    return float(16 * math.pi * k / k0 * total)
