"""
Closed-form main terms, window arithmetic, and verdicts against census reports.

Every count prediction is emitted under two log conventions: ln T as the
asymptotic statements write it, and ln(T/2pi), the density the lattice actually
has at finite height.
"""
import logging
import math
from dataclasses import dataclass, field

from ..exceptions import DomainError, ValidationError
from .gram_points import index_range, omega
from .theta_core import TWO_PI, theta1

logger = logging.getLogger(__name__)

GRAM_EXPONENT = 5.0 / 12.0
KARATSUBA_EXPONENT = 27.0 / 82.0
EPSILON_CEILING = 0.1
WINDOW_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Prediction:
    name: str
    formula_id: str
    value: float
    inputs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Verdict:
    prediction: str
    empirical: float
    predicted: float
    ratio: float
    abs_deviation: float
    rel_deviation: float
    tolerance: float
    passed: bool
    infinite_ratio: bool
    provenance: dict

    def as_dict(self):
        return {
            'prediction': self.prediction,
            'empirical': self.empirical,
            'predicted': self.predicted,
            'ratio': self.ratio,
            'abs_deviation': self.abs_deviation,
            'rel_deviation': self.rel_deviation,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'infinite_ratio': self.infinite_ratio,
            'provenance': self.provenance,
        }


@dataclass(frozen=True)
class BudgetWindow:
    T: float
    epsilon: float
    a1: float
    a2: float
    xi: float
    P0: float
    omega: float
    H_bounds: tuple
    budget_bounds: tuple
    consistency: dict


def _check_height(T, floor=1.0):
    if not math.isfinite(T) or T <= floor:
        raise DomainError(f"Height must exceed {floor:g}, got T={T!r}")


def _check_epsilon(epsilon):
    if not math.isfinite(epsilon) or not 0.0 < epsilon <= EPSILON_CEILING:
        raise DomainError(f"epsilon must lie in (0, {EPSILON_CEILING}], got {epsilon!r}")


def _check_length(U):
    if not math.isfinite(U) or U < 0.0:
        raise DomainError(f"Window length must be non-negative, got U={U!r}")


def window_length(T, psi):
    """T^(5/12) psi(T) ln^3 T"""
    _check_height(T)
    return T ** GRAM_EXPONENT * psi(T) * math.log(T) ** 3


def predicted_gram_count(T, U, convention='lnT'):
    _check_height(T, TWO_PI)
    _check_length(U)
    if convention == 'lnT':
        return U * math.log(T) / math.pi
    if convention == 'ln_T_2pi':
        return U * math.log(T / TWO_PI) / math.pi
    raise DomainError(f"Unknown log convention '{convention}'")


def exact_gram_count(T, U, tau=0.0):
    return index_range(T, U, tau).count


def theta_difference_count(T, U, tau=0.0):
    """floor((2 theta1(T+U) - tau)/pi) - ceil((2 theta1(T) - tau)/pi) + 1"""
    return (math.floor((2.0 * theta1(T + U) - tau) / math.pi)
            - math.ceil((2.0 * theta1(T) - tau) / math.pi) + 1)


def predicted_zero_count(T, U, convention='lnT'):
    return 0.5 * predicted_gram_count(T, U, convention)


def rvm_zero_count(T, U):
    """Smooth zero-count increment (theta1(T+U) - theta1(T))/pi."""
    _check_length(U)
    return (theta1(T + U) - theta1(T)) / math.pi


def selberg_span(T, epsilon):
    _check_height(T)
    if not 0.0 < epsilon <= 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2], got {epsilon!r}")
    return T ** (0.5 + epsilon)


def karatsuba_window_length(T, epsilon):
    _check_height(T)
    _check_epsilon(epsilon)
    return T ** (KARATSUBA_EXPONENT + epsilon)


def segment_budget_window(T, epsilon):
    """
    Admissible per-point search budgets for windowed good segments.

    a1 = 10/(pi eps), a2 = a1 sqrt(2/pi), xi = (T/2pi)^(eps/10) and the step
    bounds 1/ln xi <= H <= 1/sqrt(ln xi), with H = budget * omega. The budget
    range is [a1, a2 sqrt(ln P0)]; the consistency record compares both ends
    of it, scaled by omega, with the H bounds.
    """
    _check_height(T, TWO_PI)
    _check_epsilon(epsilon)
    a1 = 10.0 / (math.pi * epsilon)
    a2 = a1 * math.sqrt(2.0 / math.pi)
    P0 = math.sqrt(T / TWO_PI)
    log_p0 = math.log(P0)
    xi = P0 ** (epsilon / 5.0)
    log_xi = math.log(xi)
    step = omega(T)
    H_bounds = (1.0 / log_xi, 1.0 / math.sqrt(log_xi))
    budget_bounds = (a1, a2 * math.sqrt(log_p0))
    consistency = {
        'lower_H': budget_bounds[0] * step,
        'upper_H': budget_bounds[1] * step,
        'lower_ok': budget_bounds[0] * step >= H_bounds[0] * (1.0 - WINDOW_TOLERANCE),
        'upper_ok': budget_bounds[1] * step <= H_bounds[1] * (1.0 + WINDOW_TOLERANCE),
        'nonempty': math.ceil(budget_bounds[0]) <= math.floor(budget_bounds[1]),
    }
    logger.info(f"Budget window T={T:g} eps={epsilon}: budget in "
                f"[{budget_bounds[0]:.3f}, {budget_bounds[1]:.3f}], H in "
                f"[{H_bounds[0]:.4f}, {H_bounds[1]:.4f}]")
    return BudgetWindow(T=T, epsilon=epsilon, a1=a1, a2=a2, xi=xi, P0=P0, omega=step,
                        H_bounds=H_bounds, budget_bounds=budget_bounds,
                        consistency=consistency)


def budget_range(T, epsilon):
    """Integer budgets inside segment_budget_window(T, epsilon)."""
    low, high = segment_budget_window(T, epsilon).budget_bounds
    return range(max(1, math.ceil(low)), math.floor(high) + 1)


# Main terms per census kind, each as (ln T form, ln(T/2pi) form, anchor text).
# Terms needing more than the window read their parameters from report.extra.

def _gram_terms(T, U, extra):
    return (predicted_gram_count(T, U), predicted_gram_count(T, U, 'ln_T_2pi'),
            '(1/pi) U ln T')


def _zero_terms(T, U, extra):
    return (predicted_zero_count(T, U), predicted_zero_count(T, U, 'ln_T_2pi'),
            '(1/2pi) U ln T')


def _sign_preserving_terms(T, U, extra):
    M = max(int(extra.get('M', 1)), 1)
    return (U * math.log(T) ** 2 / M, U * math.log(T / TWO_PI) ** 2 / M,
            'U (ln T)^2 / M')


def _bounded_segment_terms(T, U, extra):
    return U, U, 'U'


def _windowed_segment_terms(T, U, extra):
    return U * math.log(T), U * math.log(T / TWO_PI), 'U ln T'


def _grid_terms(T, U, extra):
    total = float(extra.get('grid_points', 0))
    return total, total, 'grid points'


MAIN_TERMS = {
    'gram_intervals': _gram_terms,
    'zero_count': _zero_terms,
    'sign_preserving': _sign_preserving_terms,
    'good_segments_bounded': _bounded_segment_terms,
    'good_segments_windowed': _windowed_segment_terms,
    'selberg_intervals': _grid_terms,
    'exceptional_intervals': _grid_terms,
}


def main_terms(kind, T, U, extra=None):
    if kind not in MAIN_TERMS:
        raise ValidationError(f"No main term registered for census kind '{kind}'")
    return MAIN_TERMS[kind](T, U, extra or {})


def compare(report, prediction, tolerance=0.05):
    """
    Verdict of a report's hit count against a prediction for the same window.

    Both zero counts as a pass with ratio 1; a zero prediction against a nonzero
    count fails with the infinite ratio flagged.
    """
    window = prediction.inputs
    for key, value in (('T', report.T), ('U', report.U)):
        if key in window and not math.isclose(window[key], value, rel_tol=WINDOW_TOLERANCE):
            raise ValidationError(
                f"Prediction '{prediction.name}' is for {key}={window[key]:g}, "
                f"report has {key}={value:g}"
            )

    empirical = float(report.hits)
    predicted = float(prediction.value)
    infinite = False
    if predicted == 0.0:
        if empirical == 0.0:
            ratio = 1.0
        else:
            ratio = math.inf
            infinite = True
    else:
        ratio = empirical / predicted
    abs_deviation = abs(empirical - predicted)
    rel_deviation = abs_deviation / abs(predicted) if predicted else (0.0 if empirical == 0 else math.inf)
    passed = not infinite and abs(ratio - 1.0) <= tolerance

    return Verdict(
        prediction=prediction.name, empirical=empirical, predicted=predicted,
        ratio=ratio, abs_deviation=abs_deviation, rel_deviation=rel_deviation,
        tolerance=tolerance, passed=passed, infinite_ratio=infinite,
        provenance={
            'formula': prediction.formula_id,
            'strict': report.strict,
            'overrides': dict(report.overrides),
            'engine_version': report.engine_version,
        },
    )


def report_predictions(report):
    """Both log-convention predictions for a census report."""
    value, value_2pi, anchor = main_terms(report.kind, report.T, report.U, report.extra)
    inputs = {'T': report.T, 'U': report.U}
    return [
        Prediction(name=f"{report.kind}_main_term", formula_id=anchor, value=value, inputs=inputs),
        Prediction(name=f"{report.kind}_main_term_2pi",
                   formula_id=anchor.replace('ln T', 'ln(T/2pi)'),
                   value=value_2pi, inputs=inputs),
    ]
