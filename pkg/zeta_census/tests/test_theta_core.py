import math

import mpmath
from django.test import SimpleTestCase
from hypothesis import example, given, settings as hypothesis_settings, strategies as st

from zeta_census.exceptions import DomainError
from zeta_census.services.theta_core import (
    TWO_PI, evaluate, theta1, theta1_derivative, theta1_inverse,
    theta_correction, theta_full,
)


def mp_theta1(t):
    with mpmath.workdps(50):
        t = mpmath.mpf(t)
        return t / 2 * mpmath.log(t / (2 * mpmath.pi)) - t / 2 - mpmath.pi / 8


class Theta1Tests(SimpleTestCase):
    def test_known_values(self):
        self.assertAlmostEqual(theta1(TWO_PI), -math.pi - math.pi / 8, places=12)
        self.assertAlmostEqual(theta1(TWO_PI * math.e), -math.pi / 8, places=12)

    def test_against_high_precision(self):
        for t in (10.0, 100.0, 1e4, 1e6, 1e9):
            expected = float(mp_theta1(t))
            self.assertTrue(math.isclose(theta1(t), expected, rel_tol=1e-14, abs_tol=1e-13), t)

    def test_derivative(self):
        self.assertEqual(theta1_derivative(TWO_PI), 0.0)
        self.assertAlmostEqual(theta1_derivative(TWO_PI * math.e ** 2), 1.0, places=14)

    def test_derivative_matches_central_differences(self):
        # third derivative -1/(2t^2) keeps the truncation error visible at t=12
        t = 12.0
        exact = theta1_derivative(t)
        errors = []
        for h in (1e-2, 1e-3, 1e-4):
            approx = (theta1(t + h) - theta1(t - h)) / (2 * h)
            errors.append(abs(approx - exact))
        order = math.log10(errors[0] / errors[1])
        self.assertGreater(order, 1.8)
        self.assertLess(order, 2.2)
        self.assertLess(errors[2], errors[1] / 10)

    def test_rejects_non_positive(self):
        for t in (0.0, -1.0, math.nan, math.inf):
            with self.assertRaises(DomainError):
                theta1(t)


class ThetaFullTests(SimpleTestCase):
    def test_adds_correction_terms(self):
        t = 1e6
        expected = theta1(t) + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t ** 3)
        self.assertAlmostEqual(theta_full(t), expected, delta=1e-8)

    def test_correction_is_small_and_positive(self):
        difference = theta_full(100.0) - theta1(100.0)
        self.assertGreater(difference, 0.0)
        self.assertLess(difference, 1.01 / 4800.0)
        self.assertAlmostEqual(theta_correction(100.0), 1.0 / 4800.0 + 7.0 / 5760.0 / 1e6,
                               places=15)

    def test_matches_log_gamma_phase(self):
        t = 1000.0
        with mpmath.workdps(40):
            tm = mpmath.mpf(t)
            phase = mpmath.im(mpmath.loggamma(mpmath.mpc(0.25, tm / 2))) - tm / 2 * mpmath.log(mpmath.pi)
        self.assertAlmostEqual(theta_full(t), float(phase), delta=1e-9)

    def test_refuses_small_heights(self):
        with self.assertRaises(DomainError) as ctx:
            theta_full(5.0)
        self.assertIn('z_em', str(ctx.exception))

    def test_evaluate_records_engine(self):
        value = evaluate(1e4, 'theta_full')
        self.assertEqual(value.engine, 'theta_full')
        self.assertGreater(value.error_bound, 0.0)
        self.assertEqual(evaluate(1e4).value, theta1(1e4))
        with self.assertRaises(DomainError):
            evaluate(1e4, 'gamma')


class Theta1InverseTests(SimpleTestCase):
    def test_minimum_of_the_shifted_branch(self):
        self.assertTrue(math.isclose(theta1_inverse(-math.pi / 8), TWO_PI * math.e, rel_tol=1e-12))

    def test_against_root_finder(self):
        y = math.pi / 2
        with mpmath.workdps(30):
            root = mpmath.findroot(lambda x: mp_theta1(x) - y, 20.6)
        self.assertAlmostEqual(theta1_inverse(y), float(root), delta=1e-9)

    def test_refuses_values_below_the_branch(self):
        with self.assertRaises(DomainError):
            theta1_inverse(theta1(10.0) - 1.0)
        with self.assertRaises(DomainError):
            theta1_inverse(math.nan)

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(t=st.floats(min_value=20.0, max_value=1e8))
    def test_inverts_theta1(self, t):
        self.assertLessEqual(abs(theta1_inverse(theta1(t)) - t), 1e-10 * t)

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(y=st.floats(min_value=0.0, max_value=1e9))
    @example(y=0.0)
    @example(y=1e9)
    def test_residual(self, y):
        self.assertLessEqual(abs(theta1(theta1_inverse(y)) - y), 1e-10 * max(1.0, y))

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(t=st.floats(min_value=TWO_PI * 1.01, max_value=1e8),
           gap=st.floats(min_value=1e-6, max_value=1.0))
    def test_theta1_increasing(self, t, gap):
        self.assertGreater(theta1(t * (1.0 + gap)), theta1(t))
