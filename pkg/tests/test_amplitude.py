import math

import numpy as np
import pytest

from zrp import oracle
from zrp.amplitude import ConvergenceError, Geometry, f_fixed_nuclei, f_partial_wave
from zrp.channels import kinematics, omega
from zrp.numerics import legendre_all, sph_bessel_all

from conftest import ev, h2_model
from test_channels import random_model


def random_geometry(rng, R=None):
    v = rng.normal(size=(3, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return Geometry(v[0], v[1], v[2], rng.uniform(0.4, 1.2) if R is None else R)


def perpendicular_geometry(R=0.7005):
    return Geometry(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]), R)


def test_broadside_even(model):
    kin = kinematics(model, ev(15))
    om = omega(model, kin, +1, 0.7005)
    assert f_fixed_nuclei(model, kin, 1, perpendicular_geometry()) == pytest.approx(-2 * om[1], rel=1e-15)


def test_broadside_incident_odd():
    m = h2_model(parity=-1)
    kin = kinematics(m, ev(15))
    g = Geometry(np.array([0.6, 0.0, 0.8]), np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]), 0.7005)
    om = omega(m, kin, +1, g.R)
    expected = -2j * om[1] * math.sin(kin.k[1].real * g.R * 0.6)
    assert f_fixed_nuclei(m, kin, 1, g) == pytest.approx(expected, rel=1e-14)


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(np.array([1.0, 0, 0]), np.array([0, 0, 2.0]), np.array([0, 1.0, 0]), 1.0)


def test_closed_channel_rejected(model):
    kin = kinematics(model, ev(10))
    with pytest.raises(ValueError, match="closed"):
        f_fixed_nuclei(model, kin, 1, perpendicular_geometry())


@pytest.mark.parametrize("n_channels", [2, 3])
def test_matches_boundary_condition_solve(rng, n_channels):
    for _ in range(20):
        m = random_model(rng, n_channels)
        kin = kinematics(m, rng.uniform(0.3, 1.2))
        g = random_geometry(rng)
        for n in range(n_channels):
            if kin.is_open(n) and kin.k[n].real > 0:
                f = f_fixed_nuclei(m, kin, n, g)
                assert abs(f - oracle.direct_bc_amplitude(m, kin, n, g)) <= 1e-10 * abs(f)


def test_reflection_symmetry_of_axis(rng):
    for parity, factor in ((1, 1), (-1, -1)):
        m = h2_model(parity=parity)
        kin = kinematics(m, ev(16))
        for _ in range(5):
            g = random_geometry(rng)
            flipped = Geometry(g.k_hat, g.k0_hat, -g.r_hat, g.R)
            assert f_fixed_nuclei(m, kin, 1, flipped) == pytest.approx(factor * f_fixed_nuclei(m, kin, 1, g), rel=1e-13)


def test_outgoing_reflection_even(rng, model):
    kin = kinematics(model, ev(16))
    g = random_geometry(rng)
    k = kin.k[1].real
    om_p, om_m = omega(model, kin, 1, g.R)[1], omega(model, kin, -1, g.R)[1]
    cos_k0 = math.cos(kin.k_in * g.R * g.k0_hat @ g.r_hat)
    sin_k0 = math.sin(kin.k_in * g.R * g.k0_hat @ g.r_hat)
    even = -2 * om_p * math.cos(k * g.R * g.k_hat @ g.r_hat) * cos_k0
    odd = -2 * om_m * math.sin(k * g.R * g.k_hat @ g.r_hat) * sin_k0
    reflected = Geometry(-g.k_hat, g.k0_hat, g.r_hat, g.R)
    assert f_fixed_nuclei(model, kin, 1, g) == pytest.approx(even + odd, rel=1e-13)
    assert f_fixed_nuclei(model, kin, 1, reflected) == pytest.approx(even - odd, rel=1e-13)


class TestPartialWave:
    @pytest.mark.parametrize("parity", [1, -1])
    def test_identity(self, rng, parity):
        m = h2_model(parity=parity)
        kin = kinematics(m, ev(15))
        for _ in range(10):
            g = random_geometry(rng)
            for n in (0, 1):
                f = f_fixed_nuclei(m, kin, n, g)
                assert abs(f_partial_wave(m, kin, n, g) - f) <= 1e-10 * abs(f)

    def test_even_amplitude_has_no_odd_waves(self, rng, model):
        # full plane-wave expansion of cos(q.R): the odd orders cancel between e^{+iq.R} and e^{-iq.R}
        g = random_geometry(rng)
        q, x = 1.7 * g.R, 0.3
        ls = np.arange(31)
        plus = (2 * ls + 1) * 1j**ls * sph_bessel_all(30, q) * legendre_all(30, x)
        minus = (2 * ls + 1) * 1j**ls * sph_bessel_all(30, q) * legendre_all(30, -x)
        cos_terms = 0.5 * (plus + minus)
        assert np.all(cos_terms[1::2] == 0)
        assert cos_terms.sum().real == pytest.approx(math.cos(q * x), rel=1e-13)

    def test_forward_elastic(self, model):
        kin = kinematics(model, ev(15))
        g = Geometry(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0]), np.array([0.6, 0.0, 0.8]), 0.7)
        f = f_fixed_nuclei(model, kin, 0, g)
        assert f_partial_wave(model, kin, 0, g) == pytest.approx(f, rel=1e-12)

    def test_tail_convergence(self, rng, model):
        kin = kinematics(model, ev(18))
        g = random_geometry(rng, R=1.1)
        qR = (kin.k_in + kin.k[1].real) * g.R
        base = f_partial_wave(model, kin, 1, g, l_max=math.ceil(qR) + 15)
        more = f_partial_wave(model, kin, 1, g, l_max=math.ceil(qR) + 40)
        assert abs(base - more) < 1e-10 * abs(more)

    def test_non_convergence(self, rng, model):
        kin = kinematics(model, ev(18))
        with pytest.raises(ConvergenceError):
            f_partial_wave(model, kin, 1, random_geometry(rng, R=1.1), l_max=6)
