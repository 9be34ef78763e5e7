import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirac_torus import (
    GOLDEN,
    CircleLift,
    growth_sequence,
    iterate_lift,
    make_diffeo,
    radon_nikodym,
)
from dirac_torus.errors import NotADiffeomorphism, RationalRotation

thetas = st.floats(-10.0, 10.0, allow_nan=False)


def compose(f, k, theta, times):
    """Compose iterate_lift(f, k, .) with itself, chaining derivatives."""
    value, deriv = np.asarray(theta, float), np.ones_like(np.asarray(theta, float))
    for _ in range(times):
        value, d = iterate_lift(f, k, value)
        deriv = deriv * d
    return value, deriv


class TestConstruction:
    def test_identity_conjugator_is_rotation(self, rotation):
        theta = np.linspace(0, 2 * np.pi, 7)
        value, deriv = rotation.power(1, theta)
        assert np.allclose(value, theta + 2 * np.pi * GOLDEN, atol=1e-14)
        assert np.all(deriv == 1.0)

    def test_sine_conjugator_derivative_range(self):
        H = CircleLift.sine(0.3)
        d = H.derivative(np.linspace(0, 2 * np.pi, 1001))
        assert d.min() >= 0.7 - 1e-15 and d.max() <= 1.3 + 1e-15

    def test_large_amplitude_rejected(self):
        with pytest.raises(NotADiffeomorphism):
            make_diffeo(CircleLift.sine(1.2), GOLDEN)

    def test_rational_rotation_rejected(self):
        from fractions import Fraction
        with pytest.raises(RationalRotation):
            make_diffeo(CircleLift.identity(), Fraction(1, 3))

    @pytest.mark.parametrize("rho", [0.0, 1.0, -0.2])
    def test_rotation_number_range(self, rho):
        with pytest.raises(ValueError):
            make_diffeo(CircleLift.identity(), rho)

    def test_lift_is_degree_one(self, two_mode_diffeo):
        H = two_mode_diffeo.conjugator
        t = np.linspace(-3, 3, 11)
        assert np.allclose(H(t + 2 * np.pi), H(t) + 2 * np.pi, atol=1e-13)

    def test_inverse_round_trip(self, two_mode_diffeo):
        H = two_mode_diffeo.conjugator
        t = np.linspace(-7, 7, 501)
        assert np.abs(H(H.inverse(t)) - t).max() < 1e-12


class TestIterates:
    def test_k_zero_is_identity(self, sine_diffeo):
        t = np.linspace(0, 6, 9)
        value, deriv = iterate_lift(sine_diffeo, 0, t)
        assert np.allclose(value, t, atol=1e-13) and np.allclose(deriv, 1.0, atol=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_rotation_even_iterates(self, rotation, n):
        t = np.linspace(0, 6, 9)
        value, deriv = iterate_lift(rotation, 2 * n, t)
        assert np.allclose(value, t + 2 * np.pi * n * GOLDEN, atol=1e-12)
        assert np.all(deriv == 1.0)

    def test_six_equals_three_twos(self, sine_diffeo, rng):
        t = rng.uniform(0, 2 * np.pi, 200)
        direct = iterate_lift(sine_diffeo, 6, t)
        composed = compose(sine_diffeo, 2, t, 3)
        assert np.abs(direct[0] - composed[0]).max() <= 1e-10
        assert np.abs(direct[1] - composed[1]).max() <= 1e-10

    @given(k=st.integers(-8, 8), theta=thetas)
    def test_conjugation_identity(self, two_mode_diffeo, k, theta):
        step = 1 if k >= 0 else -1
        direct = iterate_lift(two_mode_diffeo, k, theta)
        composed = compose(two_mode_diffeo, step, theta, abs(k))
        assert abs(float(direct[0]) - float(composed[0])) <= 1e-9
        assert abs(float(direct[1]) - float(composed[1])) <= 1e-9

    @given(theta=thetas)
    def test_square_root_squares_to_f(self, sine_diffeo, theta):
        H = sine_diffeo.conjugator
        # conjugate R_rho directly, twice
        once = H(H.inverse(theta) + 2 * np.pi * GOLDEN)
        twice = H(H.inverse(once) + 2 * np.pi * GOLDEN)
        assert abs(float(iterate_lift(sine_diffeo, 4, theta)[0]) - float(twice)) <= 1e-10
        assert abs(float(iterate_lift(sine_diffeo, 2, theta)[0]) - float(once)) <= 1e-10


class TestCocycle:
    def test_rotation_density_is_one(self, rotation):
        c = radon_nikodym(rotation, 3, 256)
        assert np.all(c.samples == 1.0)
        coeffs = c.fourier["d"]
        K = (coeffs.size - 1) // 2
        expected = np.zeros_like(coeffs)
        expected[K] = 1.0
        assert np.abs(coeffs - expected).max() < 1e-15

    @pytest.mark.parametrize("n", [-4, -1, 1, 2, 7])
    def test_mean_one(self, two_mode_diffeo, n):
        assert abs(radon_nikodym(two_mode_diffeo, n, 1024).mean() - 1.0) <= 1e-9

    @pytest.mark.parametrize("n", [1, 3, -2])
    def test_finite_difference_oracle(self, sine_diffeo, rng, n):
        t = rng.uniform(0, 2 * np.pi, 10_000)
        h = 1e-5
        fd = (sine_diffeo.power(n, t + h)[0] - sine_diffeo.power(n, t - h)[0]) / (2 * h)
        assert np.abs(sine_diffeo.power(n, t)[1] - fd).max() <= 1e-6

    def test_complex_quotient_oracle(self, two_mode_diffeo):
        # the density as |d/dtheta e^{iF}| computed through complex exponentials
        t = np.linspace(0, 2 * np.pi, 257)
        h = 1e-6
        z = lambda s: np.exp(1j * two_mode_diffeo.power(2, s)[0])
        quotient = (z(t + h) - z(t - h)) / (2j * h * z(t))
        assert np.abs(quotient.real - two_mode_diffeo.power(2, t)[1]).max() < 1e-7

    @given(m=st.integers(-5, 5), n=st.integers(-5, 5))
    def test_cocycle_identity(self, two_mode_diffeo, m, n):
        t = np.linspace(0, 2 * np.pi, 512, endpoint=False)
        Fn, dn = two_mode_diffeo.power(n, t)
        _, dm_at = two_mode_diffeo.power(m, Fn)
        _, dmn = two_mode_diffeo.power(m + n, t)
        assert np.abs(dmn - dm_at * dn).max() <= 1e-9


class TestGrowth:
    def test_rotation_is_flat(self, rotation):
        table = growth_sequence(rotation, 6, 256)
        assert all(table[n] == 1.0 for n in range(7))

    def test_gamma_zero(self, sine_diffeo):
        assert growth_sequence(sine_diffeo, 2, 1024)[0] == 1.0

    def test_refined_grid_oracle(self, sine_diffeo):
        def grid_sup(n, size):
            t = np.linspace(0, 2 * np.pi, size, endpoint=False)
            return max(sine_diffeo.power(n, t)[1].max(), sine_diffeo.power(-n, t)[1].max())
        a, b = grid_sup(1, 2 ** 12), grid_sup(1, 2 ** 13)
        assert abs(a - b) <= 1e-6
        gamma = growth_sequence(sine_diffeo, 1, 2 ** 12)[1]
        assert abs(gamma - b) <= 1e-6 and gamma >= b - 1e-15

    def test_inverse_derivative_bound(self, two_mode_diffeo):
        table = growth_sequence(two_mode_diffeo, 5, 2048)
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        for n in range(1, 6):
            inv_sup = (1.0 / two_mode_diffeo.power(n, t)[1]).max()
            assert inv_sup <= table[n] + table.gaps[n] + 1e-12

    def test_growth_bounded_by_conjugator_distortion(self, sine_diffeo):
        # F_n' = H'(.)/H'(.) lies in [0.7/1.3, 1.3/0.7]
        table = growth_sequence(sine_diffeo, 10, 1024)
        assert max(table.entries.values()) <= 1.3 / 0.7 + 1e-12
        assert math.isclose(table.running_max(3), max(table[j] for j in range(4)))
