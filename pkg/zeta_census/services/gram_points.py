"""
Translated Gram sequences g_nu(tau): theta1(g_nu(tau)) = pi*nu/2 + tau/2.

The lattice advances theta1 by pi/2 per index, so consecutive points are about
omega(T) = pi/ln(T/2pi) apart (half the classical Gram spacing). The shift tau
ranges over [-pi, pi]; since tau/2 spans pi, g_nu(pi) = g_{nu+2}(-pi).
"""
import logging
import math
import statistics
from dataclasses import dataclass

from ..exceptions import DomainError, NumericalError, ValidationError
from .theta_core import (
    T_FLOOR, THETA1_FLOOR_VALUE, TWO_PI,
    theta1, theta1_derivative, theta1_inverse,
)

logger = logging.getLogger(__name__)

# g_nu(pi) coincides with g_{nu + STITCH_SHIFT}(-pi)
STITCH_SHIFT = 2
MIN_WINDOW_START = 1e3
RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GramPoint:
    nu: int
    tau: float
    t: float
    residual: float


@dataclass(frozen=True)
class GridSpec:
    T: float
    U: float
    omega: float
    M: int
    tau: float

    @classmethod
    def build(cls, T, U, M, tau=0.0):
        if U <= 0:
            raise DomainError(f"Window length must be positive, got U={U}")
        if M < 0:
            raise DomainError(f"Sample count must be non-negative, got M={M}")
        check_tau(tau)
        return cls(T=float(T), U=float(U), omega=omega(T), M=int(M), tau=float(tau))

    def admissibility(self):
        """(lower, upper) of the sample-count condition ln T < M < T^(1/3) ln T."""
        log_t = math.log(self.T)
        return log_t, self.T ** (1.0 / 3.0) * log_t

    def validate(self, strict):
        """
        In strict mode the sample count must satisfy the admissibility bounds;
        otherwise a violation is only logged.
        """
        lower, upper = self.admissibility()
        if lower < self.M < upper:
            return True
        message = (f"M={self.M} outside admissible range ({lower:.3f}, {upper:.3f}) "
                   f"at T={self.T:g}")
        if strict:
            raise ValidationError(message)
        logger.warning(f"Exploration mode: {message}")
        return False


@dataclass(frozen=True)
class IndexRange:
    nu_first: int
    count: int
    tau: float

    @property
    def nu_last(self):
        return self.nu_first + self.count - 1

    @property
    def span(self):
        """Index span of the window (first to last), the N1 of the spacing model."""
        return max(self.count - 1, 0)

    def indices(self):
        return range(self.nu_first, self.nu_first + self.count)


@dataclass(frozen=True)
class SpacingModel:
    omega_bar0: float
    Q: float
    anchor: float
    index_range: IndexRange


def check_tau(tau):
    if not math.isfinite(tau) or not -math.pi <= tau <= math.pi:
        raise DomainError(f"Shift tau must lie in [-pi, pi], got {tau!r}")


def omega(T):
    """pi/ln(T/2pi), equivalently pi/(2 ln P0) with P0 = sqrt(T/2pi)."""
    if not math.isfinite(T) or T <= TWO_PI * 1.01:
        raise DomainError(f"omega needs T > 2pi*1.01, got T={T!r}")
    return math.pi / math.log(T / TWO_PI)


def gram_target(nu, tau):
    return 0.5 * math.pi * nu + 0.5 * tau


def gram_point(nu, tau=0.0):
    """Solve theta1(t) = pi*nu/2 + tau/2 on the monotone branch."""
    if isinstance(nu, bool) or int(nu) != nu or nu < 1:
        raise DomainError(f"Gram index must be a positive integer, got {nu!r}")
    check_tau(tau)
    nu = int(nu)
    y = gram_target(nu, tau)
    if y < THETA1_FLOOR_VALUE:
        raise DomainError(
            f"Index nu={nu} with tau={tau} falls below the monotone branch (t < {T_FLOOR})"
        )
    t = theta1_inverse(y)
    residual = theta1(t) - y
    if abs(residual) > RESIDUAL_TOLERANCE * max(1.0, 0.5 * math.pi * nu):
        raise NumericalError(f"Gram point nu={nu}, tau={tau} left residual {residual:.3e}")
    return GramPoint(nu=nu, tau=float(tau), t=t, residual=residual)


def gram_points(indices, tau=0.0):
    return [gram_point(nu, tau) for nu in indices]


def _first_index(T, tau):
    return max(1, math.ceil((2.0 * theta1(T) - tau) / math.pi))


def index_range(T, U, tau=0.0):
    """
    Gram indices with T <= g_nu(tau) <= T + U.

    The estimate from theta1 is confirmed against solved Gram points at both
    ends, so rounding in the estimate never shifts the range.
    """
    if not math.isfinite(T) or T < MIN_WINDOW_START:
        raise DomainError(f"index_range needs T >= {MIN_WINDOW_START:g}, got T={T!r}")
    if not math.isfinite(U) or U <= 0:
        raise DomainError(f"index_range needs U > 0, got U={U!r}")
    check_tau(tau)
    end = T + U

    first = _first_index(T, tau)
    while gram_point(first, tau).t < T:
        first += 1
    while first > 1 and gram_point(first - 1, tau).t >= T:
        first -= 1

    last = math.floor((2.0 * theta1(end) - tau) / math.pi)
    while gram_point(last + 1, tau).t <= end:
        last += 1
    while last >= first and gram_point(last, tau).t > end:
        last -= 1

    return IndexRange(nu_first=first, count=max(0, last - first + 1), tau=float(tau))


def spacing_model(T, U, tau=0.0):
    """Window-anchored step and curvature of the Gram lattice."""
    window = index_range(T, U, tau)
    if window.count == 0:
        raise DomainError(f"No Gram points in [{T:g}, {T + U:g}] for tau={tau}")
    anchor = gram_point(window.nu_first, tau).t
    log_r = math.log(T / TWO_PI)
    omega_bar0 = (math.pi / log_r
                  - 0.5 * math.pi ** 2 / (T * log_r ** 3)
                  - math.pi * (anchor - T) / (T * log_r ** 2))
    Q = math.pi / (T * log_r ** 2)
    return SpacingModel(omega_bar0=omega_bar0, Q=Q, anchor=anchor, index_range=window)


def curvature_sum(p, Q):
    """
    D(p) = sum_{q=1}^{p} (1 - (1-Q)^q).

    For pQ <= 1 the binomial form sum_m (-1)^(m+1) C(p+1, m+1) Q^m is used
    (alternating, rapidly decreasing); beyond that the geometric closed form
    no longer cancels badly.
    """
    if p < 0:
        raise DomainError(f"D(p) needs p >= 0, got p={p}")
    if p == 0:
        return 0.0
    if p * Q <= 1.0:
        terms = []
        term = (p + 1) * p / 2.0 * Q
        m = 1
        while term != 0.0 and m <= p:
            terms.append(term if m % 2 else -term)
            if abs(term) < 1e-18 * abs(terms[0]):
                break
            term *= (p - m) / (m + 2.0) * Q
            m += 1
        return math.fsum(terms)
    geometric = -math.expm1(p * math.log1p(-Q))
    return p - (1.0 - Q) * geometric / Q


def spacing_predict(p, model):
    """g_anchor + omega_bar0*p - omega_bar0*D(p) for 0 <= p <= N1 - 1."""
    n1 = model.index_range.span
    if p < 0 or p > n1 - 1:
        raise DomainError(f"spacing_predict needs 0 <= p <= {n1 - 1}, got p={p}")
    return model.anchor + model.omega_bar0 * p - model.omega_bar0 * curvature_sum(p, model.Q)


@dataclass(frozen=True)
class SpacingProfile:
    index_offset: int
    max_error: float
    envelope: float
    growth_exponent: float
    errors: tuple


def spacing_error_profile(T, U, tau=0.0, index_offset=0, fit_from=0.125):
    """
    Residuals of spacing_predict(p) against the solved g_{nu1 + p + index_offset}
    over the window, with a least-squares growth exponent of the error in p
    fitted over the upper part of the range.
    """
    if index_offset not in (0, 1):
        raise DomainError(f"index_offset must be 0 or 1, got {index_offset}")
    model = spacing_model(T, U, tau)
    nu1 = model.index_range.nu_first
    n1 = model.index_range.span
    errors = []
    for p in range(n1):
        actual = gram_point(nu1 + p + index_offset, tau).t
        errors.append(abs(spacing_predict(p, model) - actual))

    start = max(1, int(n1 * fit_from))
    xs = [math.log(p) for p in range(start, n1) if errors[p] > 0.0]
    ys = [math.log(errors[p]) for p in range(start, n1) if errors[p] > 0.0]
    exponent = statistics.linear_regression(xs, ys).slope if len(xs) >= 2 else 0.0

    envelope = U ** 3 / (T ** 2 * math.log(T))
    max_error = max(errors) if errors else 0.0
    logger.info(f"Spacing profile T={T:g} U={U:g} offset={index_offset}: "
                f"max error {max_error:.3e}, envelope {envelope:.3e}, exponent {exponent:.2f}")
    return SpacingProfile(index_offset=index_offset, max_error=max_error,
                          envelope=envelope, growth_exponent=exponent,
                          errors=tuple(errors))


def grid_samples(g, spec):
    """Sampling abscissae g.t + k*omega for k = 0..M."""
    if not math.isclose(g.tau, spec.tau, rel_tol=0.0, abs_tol=1e-15):
        raise DomainError(f"Gram point shift {g.tau} does not match grid shift {spec.tau}")
    return [g.t + k * spec.omega for k in range(spec.M + 1)]


def phase_parity_residuals(spec):
    """
    Largest deviation over the window of
    4 cos(a_k) cos(a_l) cos(a_k - a_l) from 1 + (-1)^(k+l) + ((-1)^(nu+k) + (-1)^(nu+l)) cos(tau),
    where a_k = theta1(g_nu(tau) + k*omega), together with the envelope MU/(T ln T).
    """
    window = index_range(spec.T, spec.U, spec.tau)
    worst = 0.0
    cos_tau = math.cos(spec.tau)
    for nu in window.indices():
        g = gram_point(nu, spec.tau)
        phases = [theta1(x) for x in grid_samples(g, spec)]
        for k, a_k in enumerate(phases):
            for l, a_l in enumerate(phases):
                lhs = 4.0 * math.cos(a_k) * math.cos(a_l) * math.cos(a_k - a_l)
                rhs = (1.0 + (-1) ** (k + l)
                       + ((-1) ** (nu + k) + (-1) ** (nu + l)) * cos_tau)
                worst = max(worst, abs(lhs - rhs))
    envelope = spec.M * spec.U / (spec.T * math.log(spec.T))
    return worst, envelope
