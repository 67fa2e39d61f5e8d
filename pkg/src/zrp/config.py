"""Run configuration, unit constants and the figure presets.

Energies are eV and lengths bohr in config files; everything handed to the
physics modules is converted to hartree here.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .channels import ChannelModel, from_scattering_length_matrix
from .molecule import H2_REDUCED_MASS, ModelError, MorseState

HARTREE_EV = 27.2114
BOHR2_CM2_E16 = 0.280028  # 1 bohr^2 in units of 1e-16 cm^2
UNITS = ("bohr2", "cm2e-16")

PRESETS = {
    "fig2a": {"command": "dcs", "energy_eV": 15.0, "channel": 1, "v": 0, "b_values": [1.35, 1.40, 1.45]},
    "fig2b": {"command": "dcs", "energy_eV": 18.0, "channel": 1, "v": 0, "b_values": [1.35, 1.40, 1.45]},
    "fig3": {"command": "ics", "energy_grid_eV": [12.0, 24.0, 0.1], "channel": 1, "v": 0, "b_values": [1.40]},
}


class ConfigError(ValueError):
    pass


def default_config_text() -> str:
    return resources.files("zrp").joinpath("data/h2.yaml").read_text()


def _require(mapping, key, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"missing field {where}.{key}")
    return mapping[key]


def _positive(value, where):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where} must be a number, got {value!r}") from None
    if not x > 0:
        raise ConfigError(f"{where} must be > 0, got {value!r}")
    return x


@dataclass
class RunConfig:
    raw: dict

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"unparseable config: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        return cls(raw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)

    @classmethod
    def default(cls) -> "RunConfig":
        return cls.from_text(default_config_text())

    def validate(self) -> None:
        ch = _require(self.raw, "channels", "config")
        S = _require(ch, "scattering_length_matrix", "channels")
        try:
            S = np.array(S, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("channels.scattering_length_matrix must be a numeric matrix") from None
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ConfigError("channels.scattering_length_matrix must be square")
        if np.max(np.abs(S - S.T)) > 1e-12:
            raise ConfigError("channels.scattering_length_matrix is not symmetric")
        n = S.shape[0]
        parities = _require(ch, "parity_products", "channels")
        if len(parities) != n or any(p not in (1, -1) for p in parities) or parities[0] != 1:
            raise ConfigError("channels.parity_products must list +1/-1 per channel, starting with +1")
        thresholds = _require(ch, "thresholds_eV", "channels")
        if len(thresholds) != n:
            raise ConfigError("channels.thresholds_eV needs one entry per channel")
        if float(thresholds[0]) != 0.0:
            raise ConfigError("channels.thresholds_eV[0] must be 0")
        self.channel_model()

        morse = _require(self.raw, "morse", "config")
        if not isinstance(morse, list) or not morse:
            raise ConfigError("morse must be a non-empty list of electronic states")
        for i, state in enumerate(morse):
            if state is None:
                continue
            for key in ("omega", "anharm", "r_eq"):
                _positive(_require(state, key, f"morse[{i}]"), f"morse[{i}].{key}")
            _positive(state.get("mu", H2_REDUCED_MASS), f"morse[{i}].mu")
            try:
                self.morse_state(i)
            except ModelError as exc:
                raise ConfigError(f"morse[{i}]: {exc}") from None

        num = self.raw.get("numerics", {}) or {}
        for key in ("radial_nodes", "l_max_pad", "tail_tol"):
            if key in num:
                _positive(num[key], f"numerics.{key}")
        out = self.raw.get("output", {}) or {}
        if out.get("units", "bohr2") not in UNITS:
            raise ConfigError(f"output.units must be one of {UNITS}")
        if "angle_step_deg" in out:
            _positive(out["angle_step_deg"], "output.angle_step_deg")
        if "energy_grid_eV" in out:
            grid = out["energy_grid_eV"]
            if len(grid) != 3:
                raise ConfigError("output.energy_grid_eV must be [lo, hi, step]")
            _positive(grid[2], "output.energy_grid_eV step")

    # derived quantities

    @property
    def n_channels(self) -> int:
        return len(self.raw["channels"]["parity_products"])

    def channel_model(self) -> ChannelModel:
        ch = self.raw["channels"]
        thresholds = [float(t) / HARTREE_EV for t in ch["thresholds_eV"]]
        try:
            return from_scattering_length_matrix(ch["scattering_length_matrix"], ch["parity_products"], thresholds)
        except (ValueError, ArithmeticError) as exc:
            raise ConfigError(f"channels.scattering_length_matrix: {exc}") from None

    def morse_state(self, i: int) -> MorseState | None:
        states = self.raw["morse"]
        if i >= len(states) or states[i] is None:
            return None
        s = states[i]
        omega, anharm, r_eq = float(s["omega"]), float(s["anharm"]), float(s["r_eq"])
        mu = float(s.get("mu", H2_REDUCED_MASS))
        if i == 0:
            return MorseState.ground(omega, anharm, r_eq, mu)
        if "u_offset" in s:
            return MorseState(omega, anharm, r_eq, float(s["u_offset"]), mu)
        origin = float(s.get("origin_eV", self.raw["channels"]["thresholds_eV"][i])) / HARTREE_EV
        return MorseState.with_origin(omega, anharm, r_eq, origin, mu)

    def numerics(self) -> dict:
        num = self.raw.get("numerics", {}) or {}
        return {
            "n_nodes": int(num.get("radial_nodes", 256)),
            "l_pad": int(num.get("l_max_pad", 20)),
            "tail_tol": float(num.get("tail_tol", 1e-10)),
        }

    def output(self) -> dict:
        out = self.raw.get("output", {}) or {}
        return {
            "units": out.get("units", "bohr2"),
            "angle_step_deg": float(out.get("angle_step_deg", 1.0)),
            "energy_grid_eV": [float(x) for x in out.get("energy_grid_eV", [12.0, 24.0, 0.1])],
        }

    def with_b(self, b: float) -> "RunConfig":
        """Copy with the last diagonal scattering length replaced."""
        raw = copy.deepcopy(self.raw)
        S = raw["channels"]["scattering_length_matrix"]
        S[-1][-1] = float(b)
        return RunConfig(raw)

    def with_coupling_sign_flipped(self) -> "RunConfig":
        """Copy with the couplings to channel 0 negated (lambda -> -lambda for two channels)."""
        raw = copy.deepcopy(self.raw)
        S = raw["channels"]["scattering_length_matrix"]
        for j in range(1, len(S)):
            S[0][j] = -S[0][j]
            S[j][0] = -S[j][0]
        return RunConfig(raw)

    def digest(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()
