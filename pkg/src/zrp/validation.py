"""Oracle suite run by ``zrp validate``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .amplitude import Geometry, f_fixed_nuclei, f_partial_wave
from .channels import kinematics
from .config import HARTREE_EV, RunConfig
from .molecule import reference_grid, v_max, vib_harmonic
from .xsection import dcs_pure, dcs_vib, ics_pure, ics_vib, vib_kinematics


@dataclass
class Check:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<34s} max dev {self.deviation:.3e}  (tol {self.tolerance:.0e})"
        return text + (f"  [{self.note}]" if self.note else "")

    def as_dict(self) -> dict:
        return asdict(self)


def _check(name, deviation, tolerance, note="") -> Check:
    return Check(name, float(deviation), tolerance, bool(deviation <= tolerance), note)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def random_geometry(rng: np.random.Generator, R: float) -> Geometry:
    vecs = rng.normal(size=(3, 3))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return Geometry(vecs[0], vecs[1], vecs[2], R)


def _target_channel(model, e_in) -> int:
    kin = kinematics(model, e_in)
    open_ = [n for n in range(model.n_channels) if kin.is_open(n) and kin.k[n].real > 0]
    return open_[-1]


def run_checks(cfg: RunConfig, energy_eV: float = 15.0, seed: int = 20240501) -> list[Check]:
    model = cfg.channel_model()
    ground = cfg.morse_state(0)
    num = cfg.numerics()
    nodes = num["n_nodes"]
    e_in = energy_eV / HARTREE_EV
    kin = kinematics(model, e_in)
    n = _target_channel(model, e_in)
    rng = np.random.default_rng(seed)
    checks = []

    devs = []
    for _ in range(50):
        geom = random_geometry(rng, rng.uniform(0.4, 1.2))
        for m in range(model.n_channels):
            if kin.is_open(m):
                devs.append(_rel(f_fixed_nuclei(model, kin, m, geom), oracle.direct_bc_amplitude(model, kin, m, geom)))
    checks.append(_check("amplitude vs boundary conditions", max(devs), 1e-10))

    devs = []
    for _ in range(20):
        geom = random_geometry(rng, rng.uniform(0.4, 1.2))
        devs.append(_rel(f_partial_wave(model, kin, n, geom), f_fixed_nuclei(model, kin, n, geom)))
    checks.append(_check("partial-wave identity", max(devs), 1e-10))

    angles = np.radians(np.linspace(0.0, 180.0, 19))
    closed = dcs_pure(model, ground, 0, e_in, n, angles, n_nodes=nodes)
    brute = [oracle.angular_average_dcs(model, ground, 0, e_in, n, a, 32, n_nodes=nodes) for a in angles]
    checks.append(_check("orientation average (pure DCS)", _rel(closed, brute), 1e-6))

    ics = ics_pure(model, ground, 0, e_in, n, n_nodes=nodes)
    integ = oracle.solid_angle_integral(lambda a: dcs_pure(model, ground, 0, e_in, n, a, n_nodes=nodes))
    checks.append(_check("pure ICS vs integrated DCS", _rel(integ, ics), 1e-6))

    excited = cfg.morse_state(n)
    if excited is not None:
        vib_args = (model, ground, excited, 0, 0, e_in, n)
        try:
            vib_kinematics(*vib_args).outgoing(n)
        except ValueError:
            checks.append(Check("vibrational ICS vs integrated DCS", 0.0, 1e-4, True, "skipped: final level closed"))
        else:
            sig = ics_vib(*vib_args, n_nodes=nodes, l_pad=num["l_pad"], tail_tol=num["tail_tol"])
            integ = oracle.solid_angle_integral(
                lambda a: dcs_vib(*vib_args, a, n_nodes=nodes, l_pad=num["l_pad"], tail_tol=num["tail_tol"])
            )
            checks.append(_check("vibrational ICS vs integrated DCS", _rel(integ, sig), 1e-4))
    else:
        checks.append(Check("vibrational ICS vs integrated DCS", 0.0, 1e-4, True, f"skipped: no morse[{n}]"))

    v_hi = min(5, v_max(ground))
    rule = reference_grid(ground, v_hi, nodes)
    xs = np.array([vib_harmonic(ground, v, nodes)(rule.nodes) for v in range(v_hi + 1)])
    gram = (xs * rule.weights) @ xs.T
    checks.append(_check("vibrational orthonormality", float(np.max(np.abs(gram - np.eye(v_hi + 1)))), 1e-8))

    flipped = cfg.with_coupling_sign_flipped()
    fmodel = flipped.channel_model()
    same = np.array_equal(closed, dcs_pure(fmodel, ground, 0, e_in, n, angles, n_nodes=nodes))
    same &= ics == ics_pure(fmodel, ground, 0, e_in, n, n_nodes=nodes)
    checks.append(Check("coupling-sign invariance", 0.0 if same else math.inf, 0.0, bool(same), "bit-identical"))
    return checks
