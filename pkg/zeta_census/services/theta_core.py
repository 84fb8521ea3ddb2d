"""
Riemann-Siegel theta functions on the monotone branch t >= 10.

theta1 is the leading part (t/2)ln(t/2pi) - t/2 - pi/8; theta_full adds the
first terms of the asymptotic correction series. Everything here is binary64
and pure, so it may be called from any thread or worker process.
"""
import logging
import math
from dataclasses import dataclass

import mpmath

from ..exceptions import DomainError, NumericalError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
PI_OVER_8 = math.pi / 8.0

# Monotone-branch floor; theta1 has its minimum at 2*pi.
T_FLOOR = 10.0
THETA_FULL_FLOOR = 10.0

MAX_NEWTON_STEPS = 64
INVERSE_TOLERANCE = 1e-12

# Correction series theta - theta1 = 1/(48t) + 7/(5760t^3) + 31/(80640t^5) + ...
_CORRECTIONS = (1.0 / 48.0, 7.0 / 5760.0)
_NEXT_CORRECTION = 31.0 / 80640.0

ENGINE_THETA1 = 'theta1'
ENGINE_FULL = 'theta_full'


@dataclass(frozen=True)
class ThetaValue:
    t: float
    value: float
    engine: str
    error_bound: float = 0.0


def _check_abscissa(t):
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"theta needs a finite positive abscissa, got t={t!r}")


def theta1(t):
    """(t/2)ln(t/2pi) - t/2 - pi/8"""
    _check_abscissa(t)
    return 0.5 * t * (math.log(t / TWO_PI) - 1.0) - PI_OVER_8


def theta1_derivative(t):
    """(1/2)ln(t/2pi)"""
    _check_abscissa(t)
    return 0.5 * math.log(t / TWO_PI)


def theta_full_error_bound(t):
    """Envelope of the first dropped term of the correction series."""
    return _NEXT_CORRECTION / t ** 5


def theta_correction(t):
    """theta(t) - theta1(t) truncated after two terms."""
    inv = 1.0 / t
    inv3 = inv * inv * inv
    return _CORRECTIONS[0] * inv + _CORRECTIONS[1] * inv3


def theta_full(t):
    """
    Full theta through the asymptotic series. Below t = 10 the series is not
    trusted; callers needing small heights should use the log-Gamma phase of
    the oracle engine (HardyZService.z_em).
    """
    if not math.isfinite(t) or t < THETA_FULL_FLOOR:
        raise DomainError(
            f"theta_full is defined for t >= {THETA_FULL_FLOOR}, got t={t!r}; "
            f"use the oracle engine (z_em) for small heights"
        )
    return theta1(t) + theta_correction(t)


def evaluate(t, engine=ENGINE_THETA1):
    """ThetaValue record for either engine."""
    if engine == ENGINE_THETA1:
        return ThetaValue(t=t, value=theta1(t), engine=engine)
    if engine == ENGINE_FULL:
        return ThetaValue(t=t, value=theta_full(t), engine=engine,
                          error_bound=theta_full_error_bound(t))
    raise DomainError(f"Unknown theta engine '{engine}'")


THETA1_FLOOR_VALUE = 0.5 * T_FLOOR * (math.log(T_FLOOR / TWO_PI) - 1.0) - PI_OVER_8


def _inverse_seed(y):
    # theta1 + pi/8 = pi*e*x*ln(x) with x = t/(2*pi*e)
    z = (y + PI_OVER_8) / (math.pi * math.e)
    if z <= 0.0:
        return TWO_PI * math.e
    return TWO_PI * math.e * math.exp(float(mpmath.lambertw(z).real))


def _bisect_inverse(y, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if theta1(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta1_inverse(y):
    """
    Unique t >= 10 with theta1(t) = y.

    Newton iteration with the analytic derivative, seeded from the Lambert-W
    form of the leading terms. theta1 is convex and increasing on the branch,
    so after at most one overshoot the iterates decrease monotonically.
    Falls back to bisection if an iterate leaves the branch.
    """
    if not math.isfinite(y):
        raise DomainError(f"theta1_inverse needs a finite value, got {y!r}")
    if y < THETA1_FLOOR_VALUE:
        raise DomainError(
            f"y={y!r} lies below theta1(10)={THETA1_FLOOR_VALUE:.6f}, "
            f"outside the monotone branch"
        )

    tolerance = INVERSE_TOLERANCE * max(1.0, abs(y))
    t = max(_inverse_seed(y), T_FLOOR)
    for _ in range(MAX_NEWTON_STEPS):
        residual = theta1(t) - y
        slope = theta1_derivative(t)
        step = residual / slope
        t_next = t - step
        if t_next <= T_FLOOR:
            # Left the branch; the root is in [10, t] since theta1(t) > y here
            t = _bisect_inverse(y, T_FLOOR, max(t, T_FLOOR * 2.0))
            break
        t = t_next
        if abs(step) <= 2.0 * 2.220446049250313e-16 * t:
            break
    else:
        if abs(theta1(t) - y) > tolerance:
            raise NumericalError(
                f"theta1_inverse did not converge in {MAX_NEWTON_STEPS} steps for y={y!r}"
            )

    residual = abs(theta1(t) - y)
    if residual > tolerance:
        raise NumericalError(
            f"theta1_inverse residual {residual:.3e} exceeds {tolerance:.3e} for y={y!r}"
        )
    return t
