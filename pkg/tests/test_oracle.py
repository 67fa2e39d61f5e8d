import math

import numpy as np
import pytest

from zrp import oracle
from zrp.amplitude import Geometry
from zrp.channels import ChannelModel, Kinematics, kinematics, omega
from zrp.xsection import dcs_pure, radial_weights

from conftest import ev, h2_model
from test_amplitude import random_geometry
from test_channels import random_model

ANGLES = np.radians([0.0, 30.0, 75.0, 110.0, 180.0])


def test_orientation_grid_weights():
    for order in (8, 16, 32):
        dirs, w = oracle.orientation_grid(order)
        assert w.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
        # second moments of the unit sphere
        assert np.allclose((dirs**2).T @ w, 1 / 3, atol=1e-14)


def test_grid_convergence(model, ground):
    e = ev(15)
    for a in ANGLES:
        coarse = oracle.angular_average_dcs(model, ground, 0, e, 1, a, 32)
        fine = oracle.angular_average_dcs(model, ground, 0, e, 1, a, 64)
        assert coarse == pytest.approx(fine, rel=1e-8)


def test_grid_order_floor(model, ground):
    with pytest.raises(ValueError):
        oracle.angular_average_dcs(model, ground, 0, ev(15), 1, 0.3, 4)


def test_constant_amplitude(model, ground):
    e = ev(15)
    kin = kinematics(model, e)
    c = 0.7 - 0.2j
    val = oracle.angular_average_dcs(model, ground, 0, e, 1, 0.9, 16, amplitude=lambda d: np.full(len(d), c))
    assert val == pytest.approx(abs(c) ** 2 * kin.k[1].real / kin.k_in, rel=1e-12)


def test_coefficient_structure(rng):
    # C_1 = S+ + S-, C_2 = p (S+ - S-) with S+ = -cos(k0.R) Omega+, S- = i sin(k0.R) Omega-
    for parity in ([1, 1, -1], [1, -1, -1]):
        for _ in range(10):
            m = random_model(rng, 3, parity=parity)
            kin = kinematics(m, rng.uniform(0.3, 1.0))
            g = random_geometry(rng)
            c1, c2 = oracle.direct_bc_coefficients(m, kin, g)
            phase = kin.k_in * g.R * float(g.k0_hat @ g.r_hat)
            s_plus = -math.cos(phase) * omega(m, kin, +1, g.R)
            s_minus = 1j * math.sin(phase) * omega(m, kin, -1, g.R)
            assert np.allclose(c1, s_plus + s_minus, rtol=0, atol=1e-12 * np.abs(c1).max())
            assert np.allclose(c2, m.parity_products * (s_plus - s_minus), rtol=0, atol=1e-12 * np.abs(c2).max())


def test_single_channel_direct_solve(rng):
    alpha = 0.45
    m = ChannelModel([alpha], [[0.0]], [1], [0.0])
    kin = kinematics(m, 0.6)
    k = kin.k_in
    for _ in range(5):
        g = random_geometry(rng)
        tail = np.exp(2j * k * g.R) / (2 * g.R)
        om_p, om_m = 1 / (alpha + 1j * k + tail), 1 / (alpha + 1j * k - tail)
        psi, phi = k * g.R * (g.k_hat @ g.r_hat), k * g.R * (g.k0_hat @ g.r_hat)
        closed = -2 * om_p * math.cos(psi) * math.cos(phi) - 2 * om_m * math.sin(psi) * math.sin(phi)
        assert oracle.direct_bc_amplitude(m, kin, 0, g) == pytest.approx(closed, rel=1e-12)


def test_elastic_reference_matches_one_channel(ground):
    alpha = 0.62
    m = ChannelModel([alpha], [[0.0]], [1], [0.0])
    rule, w = radial_weights(ground, 0)
    for e_eV in (2.0, 15.0):
        e = ev(e_eV)
        k0 = math.sqrt(2 * e)
        ours = dcs_pure(m, ground, 0, e, 0, ANGLES)
        ref = [oracle.elastic_reference(alpha, k0, rule.nodes, a, w) for a in ANGLES]
        assert np.allclose(ours, ref, rtol=1e-12, atol=0)


def test_elastic_reference_large_separation():
    alpha, k0 = 0.5, 0.8
    iso = 1 / abs(alpha + 1j * k0) ** 2
    # far apart, the orientation-averaged DCS tends to twice the single-centre value
    far = oracle.elastic_reference(alpha, k0, 5e4, 0.7)
    assert far == pytest.approx(2 * iso, rel=1e-4)
    # forward direction keeps the interference term, yet stays finite
    fwd = oracle.elastic_reference(alpha, k0, 5e4, 0.0)
    assert math.isfinite(fwd) and fwd == pytest.approx(4 * iso, rel=1e-4)


def test_elastic_reference_zero_energy():
    alpha, R = 0.5, 1.3
    om_p, om_m = oracle._elastic_omegas(alpha, 0.0, R)
    assert om_p == pytest.approx(1 / (alpha + 1 / (2 * R)), rel=1e-15) and om_p.imag == 0
    assert om_m == pytest.approx(1 / (alpha - 1 / (2 * R)), rel=1e-15) and om_m.imag == 0
    # k0 -> 0: both sincs go to 1, so only Omega+ survives with weight 4
    assert oracle.elastic_reference(alpha, 1e-9, R, 1.0) == pytest.approx(4 * abs(om_p) ** 2, rel=1e-12)


def test_elastic_reference_ics_is_integrated(ground):
    alpha, k0 = 0.62, 1.0
    rule, w = radial_weights(ground, 0)
    integ = oracle.solid_angle_integral(
        lambda angs: np.array([oracle.elastic_reference(alpha, k0, rule.nodes, a, w) for a in np.atleast_1d(angs)])
    )
    assert integ == pytest.approx(oracle.elastic_reference_ics(alpha, k0, rule.nodes, w), rel=1e-10)


def test_geometry_is_frame_free(rng, model):
    kin = kinematics(model, ev(16))
    g = random_geometry(rng)
    # rotate every vector by the same orthogonal matrix
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    rot = Geometry(q @ g.k_hat, q @ g.k0_hat, q @ g.r_hat, g.R)
    a, b = oracle.direct_bc_amplitude(model, kin, 1, g), oracle.direct_bc_amplitude(model, kin, 1, rot)
    assert a == pytest.approx(b, rel=1e-12)
