"""Channel bookkeeping for the two-centre matrix zero-range potential.

Only the parity products eta_0 eta_n enter any observable, so a model stores
those rather than individual parities. Energies are in hartree here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_TOL = 1e-12
SYMMETRY_TOL = 1e-12


class SingularMatrixError(ArithmeticError):
    pass


class ClosedChannelError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    alphas: np.ndarray
    coupling: np.ndarray
    parity_products: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        for name in ("alphas", "coupling", "parity_products", "thresholds"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.alphas)
        if self.coupling.shape != (n, n):
            raise ValueError("coupling must be an (N+1)x(N+1) matrix")
        if np.any(np.diag(self.coupling) != 0):
            raise ValueError("coupling must have a zero diagonal")
        if np.any(self.coupling != self.coupling.T):
            raise ValueError("coupling must be symmetric")
        if len(self.parity_products) != n or len(self.thresholds) != n:
            raise ValueError("parity_products and thresholds need one entry per channel")
        if not np.all(np.isin(self.parity_products, (-1.0, 1.0))):
            raise ValueError("parity products must be +1 or -1")
        if self.parity_products[0] != 1:
            raise ValueError("parity product of channel 0 must be +1")
        if self.thresholds[0] != 0:
            raise ValueError("threshold of channel 0 must be 0")

    @property
    def n_channels(self) -> int:
        return len(self.alphas)

    @property
    def a1(self) -> np.ndarray:
        return np.diag(self.alphas) + self.coupling

    @property
    def a2(self) -> np.ndarray:
        p = self.parity_products
        return np.diag(self.alphas) + p[:, None] * self.coupling * p[None, :]

    def with_coupling_sign(self, sign: float) -> "ChannelModel":
        return ChannelModel(self.alphas, sign * self.coupling, self.parity_products, self.thresholds)


def from_scattering_length_matrix(S, parity_products, thresholds) -> ChannelModel:
    """Build a model from the scattering-length matrix S = A_1^{-1}."""
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("scattering-length matrix must be square")
    if np.max(np.abs(S - S.T)) > SYMMETRY_TOL:
        raise ValueError("scattering-length matrix is not symmetric")
    n = S.shape[0]
    if abs(np.linalg.det(S)) <= SINGULAR_TOL * np.linalg.norm(S, 2) ** n:
        raise SingularMatrixError("scattering-length matrix is singular")
    a1 = np.linalg.inv(S)
    a1 = 0.5 * (a1 + a1.T)
    coupling = a1 - np.diag(np.diag(a1))
    return ChannelModel(np.diag(a1).copy(), coupling, parity_products, thresholds)


@dataclass(frozen=True)
class Kinematics:
    """Incident energy and channel momenta (closed channels: k = i|k|)."""

    e_in: float
    k: np.ndarray

    @property
    def k_in(self) -> float:
        return float(np.sqrt(2.0 * self.e_in))

    def is_open(self, n: int) -> bool:
        return self.k[n].imag == 0.0

    @property
    def n_open(self) -> int:
        return int(np.sum(self.k.imag == 0.0))

    def outgoing(self, n: int) -> float:
        if not self.is_open(n):
            raise ClosedChannelError(f"channel {n} closed at E={self.e_in:.6g} hartree")
        return float(self.k[n].real)

    def replace(self, n: int, k_n: complex) -> "Kinematics":
        k = self.k.copy()
        k[n] = k_n
        return Kinematics(self.e_in, k)


def channel_momentum(energy: float) -> complex:
    """sqrt(2E) for E >= 0, i sqrt(-2E) below threshold."""
    if energy >= 0:
        return complex(np.sqrt(2.0 * energy), 0.0)
    return complex(0.0, np.sqrt(-2.0 * energy))


def kinematics(model: ChannelModel, e_in: float) -> Kinematics:
    if e_in <= 0:
        raise ValueError("incident energy must be positive")
    k = np.array([channel_momentum(e_in - dE) for dE in model.thresholds])
    return Kinematics(float(e_in), k)


def theta(model: ChannelModel, kin: Kinematics, n, sign: int, R):
    """theta_n^(sign) = alpha_n + i k_n + sign * p_n exp(2 i k_n R) / (2R)."""
    R = np.asarray(R, dtype=float)
    k = kin.k[n]
    p = model.parity_products[n]
    return model.alphas[n] + 1j * k + sign * p * np.exp(2j * k * R) / (2.0 * R)


def lambda_matrix(model: ChannelModel, kin: Kinematics, sign: int, R) -> np.ndarray:
    """Lambda^(sign) stacked over ``R``: shape ``shape(R) + (N+1, N+1)``."""
    R = np.asarray(R, dtype=float)
    idx = np.arange(model.n_channels)
    th = theta(model, kin, idx, sign, R[..., None])
    lam = np.broadcast_to(model.coupling.astype(complex), R.shape + model.coupling.shape).copy()
    lam[..., idx, idx] += th
    return lam


def omega(model: ChannelModel, kin: Kinematics, sign: int, R) -> np.ndarray:
    """First column of (Lambda^(sign))^{-1}, shape ``shape(R) + (N+1,)``."""
    lam = lambda_matrix(model, kin, sign, R)
    n = model.n_channels
    det = np.abs(np.linalg.det(lam))
    scale = np.linalg.norm(lam, 2, axis=(-2, -1)) ** n
    bad = det <= SINGULAR_TOL * scale
    if np.any(bad):
        cond = np.max(np.linalg.cond(lam[bad]))
        raise SingularMatrixError(
            f"Lambda^({'+' if sign > 0 else '-'}) is near-singular (condition ~{cond:.3g}); "
            "the model has a resonance at this geometry"
        )
    e0 = np.zeros(lam.shape[:-1], dtype=complex)
    e0[..., 0] = 1.0
    return np.linalg.solve(lam, e0[..., None])[..., 0]


@dataclass(frozen=True)
class AmplitudeFactors:
    R: np.ndarray
    theta_plus: np.ndarray
    theta_minus: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray


def amplitude_factors(model: ChannelModel, kin: Kinematics, R) -> AmplitudeFactors:
    R = np.asarray(R, dtype=float)
    idx = np.arange(model.n_channels)
    return AmplitudeFactors(
        R=R,
        theta_plus=theta(model, kin, idx, +1, R[..., None]),
        theta_minus=theta(model, kin, idx, -1, R[..., None]),
        omega_plus=omega(model, kin, +1, R),
        omega_minus=omega(model, kin, -1, R),
    )
