import math
import random

import mpmath
from django.core.cache import cache
from django.test import SimpleTestCase, tag

from zeta_census.exceptions import DomainError
from zeta_census.services.asymptotics import rvm_zero_count
from zeta_census.services.gram_points import omega
from zeta_census.services.hardy_z import (
    EXTENDED_PHASE_FLOOR, Sign, SignSample, hardy_z_service, lattice,
)

FIRST_ZERO = 14.134725141734693


def oracle_float(t, digits=30):
    return float(hardy_z_service.z_em(t, digits))


class SignSampleTests(SimpleTestCase):
    def test_classify(self):
        self.assertIs(SignSample.classify(300.0, 2.0, 1e-6).sign, Sign.POSITIVE)
        self.assertIs(SignSample.classify(300.0, -2.0, 1e-6).sign, Sign.NEGATIVE)
        uncertain = SignSample.classify(300.0, 1e-9, 1e-6)
        self.assertIs(uncertain.sign, Sign.UNCERTAIN)
        self.assertFalse(uncertain.certain)
        self.assertEqual(uncertain.value, 0)
        self.assertEqual(SignSample.classify(300.0, -2.0, 1e-6).value, -1)

    def test_lattice_ends_at_window_end(self):
        points = lattice(1000.0, 1001.0, 0.3)
        self.assertEqual(len(points), 5)
        self.assertEqual(points[0], 1000.0)
        self.assertEqual(points[-1], 1001.0)
        self.assertTrue(all(a < b for a, b in zip(points, points[1:])))


class RiemannSiegelTests(SimpleTestCase):
    def test_agrees_with_oracle(self):
        rng = random.Random(20240611)
        for _ in range(20):
            t = rng.uniform(200.0, 5000.0)
            z, err = hardy_z_service.z_rs(t)
            self.assertLessEqual(err, 1e-4)
            self.assertLessEqual(abs(z - oracle_float(t)), err, t)

    @tag('acceptance')
    def test_agrees_with_oracle_hundred_points(self):
        rng = random.Random(7)
        for _ in range(100):
            t = rng.uniform(200.0, 5000.0)
            z, err = hardy_z_service.z_rs(t)
            self.assertLessEqual(abs(z - oracle_float(t)), err, t)

    def test_extended_phase_path(self):
        t = 2.0e7 + 0.123
        self.assertGreater(t, EXTENDED_PHASE_FLOOR)
        z, err = hardy_z_service.z_rs(t)
        self.assertLessEqual(err, 1e-4)
        self.assertLessEqual(abs(z - float(mpmath.siegelz(t))), err + 1e-8)

    @tag('acceptance')
    def test_envelope_at_the_top_of_the_range(self):
        t = 1e10
        z, err = hardy_z_service.z_rs(t)
        self.assertLessEqual(err, 1e-4)
        self.assertLessEqual(abs(z - float(mpmath.siegelz(t))), err + 1e-8)

    def test_batching_does_not_change_values(self):
        ts = [5e6 + 0.5, 2e7 + 0.25, 1e6 + 0.75, 3e5]
        values, errors = hardy_z_service.z_rs_many(ts)
        for t, value, err in zip(ts, values, errors):
            single, single_err = hardy_z_service.z_rs(t)
            self.assertEqual(value, single)
            self.assertEqual(err, single_err)

    def test_refuses_small_heights(self):
        with self.assertRaises(DomainError) as ctx:
            hardy_z_service.z_rs(100.0)
        self.assertIn('z_em', str(ctx.exception))


class EulerMaclaurinTests(SimpleTestCase):
    def test_first_zero(self):
        lo, hi = 14.0, 14.2
        sign_lo = math.copysign(1.0, oracle_float(lo, 20))
        self.assertNotEqual(sign_lo, math.copysign(1.0, oracle_float(hi, 20)))
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            if math.copysign(1.0, oracle_float(mid, 20)) == sign_lo:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        self.assertLessEqual(abs(oracle_float(root, 20)), 1e-6)
        self.assertAlmostEqual(root, FIRST_ZERO, delta=1e-8)

    def test_value_is_real(self):
        # the self-check raises when the rotated value keeps an imaginary part
        value = hardy_z_service.z_em(500.0, 25)
        self.assertIsInstance(value, mpmath.mpf)

    def test_domain(self):
        with self.assertRaises(DomainError):
            hardy_z_service.z_em(500.0, 10)
        with self.assertRaises(DomainError):
            hardy_z_service.z_em(2e6)
        with self.assertRaises(DomainError):
            hardy_z_service.z_em(0.0)

    def test_signs_below_riemann_siegel_floor(self):
        self.assertIs(hardy_z_service.sign_at(14.0).sign, Sign.NEGATIVE)
        self.assertIs(hardy_z_service.sign_at(14.3).sign, Sign.POSITIVE)


class ZeroScanTests(SimpleTestCase):
    def setUp(self):
        cache.clear()

    def test_zero_count_near_one_million(self):
        T, U = 1e6, 100.0
        zeros = [b for b in hardy_z_service.zeros_in(T, T + U) if T <= b.root <= T + U]
        self.assertLessEqual(abs(len(zeros) - rvm_zero_count(T, U)), 10)
        for bracket in zeros:
            self.assertLessEqual(bracket.refinement_width, 1e-9 * bracket.lo)
            self.assertNotEqual(hardy_z_service.sign_at(bracket.lo).value,
                                hardy_z_service.sign_at(bracket.hi).value)

    def test_parity_of_sign_changes(self):
        lo, hi = 1e6, 1e6 + 20.0
        scan = hardy_z_service.scan(lo, hi)
        left, right = hardy_z_service.sign_at(lo), hardy_z_service.sign_at(hi)
        self.assertTrue(left.certain and right.certain)
        self.assertEqual(len(scan.brackets) % 2 == 0, left.value == right.value)

    def test_brackets_are_ordered_and_disjoint(self):
        brackets = hardy_z_service.zeros_in(1e6, 1e6 + 30.0)
        for a, b in zip(brackets, brackets[1:]):
            self.assertLess(a.hi, b.lo)

    def test_finer_lattice_never_loses_zeros(self):
        lo, hi = 1e6, 1e6 + 50.0
        step = omega(lo) / 4.0
        coarse = hardy_z_service.scan(lo, hi, step)
        fine = hardy_z_service.scan(lo, hi, step / 2.0)
        self.assertGreaterEqual(len(fine.brackets), len(coarse.brackets))

    def test_repeatable(self):
        first = hardy_z_service.zeros_in(2e5, 2e5 + 20.0)
        cache.clear()
        self.assertEqual(hardy_z_service.zeros_in(2e5, 2e5 + 20.0), first)

    @tag('acceptance')
    def test_independent_of_worker_count(self):
        single = hardy_z_service.scan(1e6, 1e6 + 200.0, workers=1)
        cache.clear()
        pooled = hardy_z_service.scan(1e6, 1e6 + 200.0, workers=4)
        self.assertEqual(pooled.brackets, single.brackets)
        self.assertEqual(pooled.unresolved, single.unresolved)

    def test_rejects_bad_windows(self):
        with self.assertRaises(DomainError):
            hardy_z_service.scan(100.0, 300.0)
        with self.assertRaises(DomainError):
            hardy_z_service.scan(1e6, 1e6 + 1.0, scan_step=omega(1e6))
        with self.assertRaises(DomainError):
            hardy_z_service.scan(1e6, 1e6)
