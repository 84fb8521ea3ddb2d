"""
Counting objects on translated Gram lattices.

Every census enumerates the Gram points g_nu(tau) of a window, attaches an
interval or a sample sequence to each, and classifies it as a hit, a miss or
uncertain from certified signs of Z. Zero lists come from one scan lattice
anchored at the window start and shared by all intervals of the census.
"""
import bisect
import logging
import math
import time
from dataclasses import dataclass
from enum import Enum

from django.conf import settings

from ..exceptions import DomainError, ValidationError
from .asymptotics import (
    budget_range, main_terms, rvm_zero_count, segment_budget_window,
    selberg_span, window_length,
)
from .gram_points import GridSpec, gram_points, grid_samples, index_range
from .hardy_z import hardy_z_service
from .psi import validate_pair
from .reports import CensusReport, MomentReport
from .theta_core import TWO_PI, theta1, theta_full
from .workers import chunked, partition, run_tasks

logger = logging.getLogger(__name__)

THETA_VARIANTS = ('theta1', 'theta_full')


class Outcome(str, Enum):
    HIT = 'hit'
    MISS = 'miss'
    UNCERTAIN = 'uncertain'


@dataclass(frozen=True)
class IntervalOutcome:
    index: int
    a: float
    b: float
    outcome: Outcome


@dataclass(frozen=True)
class Segment:
    nu: int
    k: int
    lo: float
    hi: float


def classify_interval(a, b, brackets, bounds, unresolved):
    """
    Hit when a certified bracket lies strictly inside (a, b). Otherwise
    uncertain when a bracket straddles an endpoint or an unresolved lattice
    point falls inside; otherwise a miss. `bounds` are the sorted lower ends
    of the disjoint `brackets`.
    """
    i = bisect.bisect_right(bounds, a)
    if i < len(brackets):
        nxt = brackets[i]
        if nxt.hi < b:
            return Outcome.HIT
        if nxt.lo < b:
            return Outcome.UNCERTAIN
    if i > 0 and brackets[i - 1].hi > a:
        return Outcome.UNCERTAIN
    j = bisect.bisect_right(unresolved, a)
    if j < len(unresolved) and unresolved[j] < b:
        return Outcome.UNCERTAIN
    return Outcome.MISS


def tally(outcomes):
    hits = sum(1 for o in outcomes if o.outcome is Outcome.HIT)
    uncertain = sum(1 for o in outcomes if o.outcome is Outcome.UNCERTAIN)
    return len(outcomes), hits, uncertain


def _solve_task(task):
    nu0, nu1, tau = task
    return gram_points(range(nu0, nu1), tau)


def _sample_task(task):
    points, spec = task
    rows = [grid_samples(g, spec) for g in points]
    flat = hardy_z_service.signs([x for row in rows for x in row])
    width = spec.M + 1
    return [flat[i * width:(i + 1) * width] for i in range(len(points))]


def _first_change(row, first, last):
    """Smallest k in [first, last] whose pair (k-1, k) has certain opposite signs,
    and whether an uncertain pair was passed over on the way."""
    skipped = False
    for k in range(first, last + 1):
        left, right = row[k - 1], row[k]
        if not (left.certain and right.certain):
            skipped = True
            continue
        if left.value != right.value:
            return k, skipped
    return None, skipped


def _greedy_disjoint(candidates):
    """
    Left-to-right sweep accepting a segment when it meets no accepted segment
    (closed intervals). Returns the set of accepted nu.
    """
    starts, ends, accepted = [], [], set()
    for seg in candidates:
        i = bisect.bisect_left(starts, seg.lo)
        if i > 0 and ends[i - 1] >= seg.lo:
            continue
        if i < len(starts) and starts[i] <= seg.hi:
            continue
        starts.insert(i, seg.lo)
        ends.insert(i, seg.hi)
        accepted.add(seg.nu)
    return accepted


class CensusService:
    def __init__(self, z_service=None):
        self.z_service = z_service or hardy_z_service

    def _strict(self, strict):
        return settings.GRAMGRID_STRICT if strict is None else bool(strict)

    def solve_window(self, T, U, tau=0.0, workers=None):
        """Index range of the window and its solved Gram points, in index order."""
        window = index_range(T, U, tau)
        tasks = [(lo, hi, tau) for lo, hi in
                 partition(window.nu_first, window.nu_first + window.count)]
        points = [g for part in run_tasks(_solve_task, tasks, workers) for g in part]
        return window, points

    def sample_grid(self, points, spec, workers=None):
        """Signs of Z at g + k*omega, k = 0..M, one row per Gram point."""
        tasks = [(chunk, spec) for chunk in chunked(points)]
        return [row for part in run_tasks(_sample_task, tasks, workers) for row in part]

    def zero_scan(self, lo, hi, scan_step=None, workers=None, scan=None):
        if scan is None:
            return self.z_service.scan(lo, hi, scan_step, workers)
        if scan.lo > lo or scan.hi < hi:
            raise DomainError(
                f"Zero scan [{scan.lo:g}, {scan.hi:g}] does not cover [{lo:g}, {hi:g}]"
            )
        return scan

    def _interval_census(self, intervals, T, scan_step, workers, scan):
        """Outcomes of (index, a, b) intervals against one shared scan."""
        if not intervals:
            return [], None
        end = max(b for _, _, b in intervals)
        step = scan_step or self.z_service.default_step(T)
        scan = self.zero_scan(T, end + 2.0 * step, step, workers, scan)
        bounds = scan.bracket_bounds()
        outcomes = [
            IntervalOutcome(index=index, a=a, b=b,
                            outcome=classify_interval(a, b, scan.brackets, bounds, scan.unresolved))
            for index, a, b in intervals
        ]
        return outcomes, scan

    def _report(self, command, kind, T, U, tau, outcomes, strict, overrides, extra):
        total, hits, uncertain = tally(outcomes)
        value, value_2pi, anchor = main_terms(kind, T, U, extra)
        report = CensusReport(
            command=command, kind=kind, T=T, U=U, tau=tau,
            total=total, hits=hits, uncertain=uncertain,
            predicted_main_term=value, predicted_main_term_2pi=value_2pi,
            strict=strict, overrides=overrides,
            anchors={'main_term': anchor,
                     'main_term_2pi': anchor.replace('ln T', 'ln(T/2pi)')},
            extra=extra, outcomes=outcomes,
        )
        logger.info(f"{kind} T={T:g} U={U:g} tau={tau:g}: {hits}/{total} hits, "
                    f"{uncertain} uncertain, main term {value:.3f}")
        return report

    def gram_interval_census(self, T, psi, psi_bar, tau=0.0, U_override=None,
                             scan_step=None, workers=None, scan=None, strict=None):
        """
        Gram points g in [T, T+U] whose interval (g, g + psi_bar(g)) contains a
        certified odd-order zero, against (1/pi) U ln T. Without U_override the
        window length is T^(5/12) psi(T) ln^3 T.
        """
        start = time.time()
        strict = self._strict(strict) and U_override is None
        U = float(U_override) if U_override is not None else window_length(T, psi)
        psi.validate(T, T + U, strict)
        validate_pair(psi, psi_bar, T, U, strict)

        window, points = self.solve_window(T, U, tau, workers)
        intervals = [(g.nu, g.t, g.t + psi_bar(g.t)) for g in points]
        outcomes, scan = self._interval_census(intervals, T, scan_step, workers, scan)

        overrides = {'U_override': U_override} if U_override is not None else {}
        extra = {
            'nu_first': window.nu_first, 'nu_last': window.nu_last,
            'psi': psi.label(), 'psi_bar': psi_bar.label(),
            'scan_step': scan.step if scan else None,
            'zeros': len(scan.brackets) if scan else 0,
            'elapsed': round(time.time() - start, 3),
        }
        return self._report('gram_intervals', 'gram_intervals', T, U, tau, outcomes,
                            strict, overrides, extra)

    def selberg_interval_census(self, T, epsilon, psi, grid_step, span_override=None,
                                scan_step=None, workers=None, scan=None, strict=None):
        """
        Fraction of the grid T + j*grid_step over [T, T + span] whose interval
        (t, t + psi(t)/ln t) contains a certified odd-order zero; estimates the
        measure of such t relative to the span.
        """
        if not grid_step > 0.0:
            raise DomainError(f"grid_step must be positive, got {grid_step!r}")
        strict = self._strict(strict) and span_override is None
        span = float(span_override) if span_override is not None else selberg_span(T, epsilon)
        psi.validate(T, T + span, strict)

        count = int(math.floor(span / grid_step)) + 1
        intervals = []
        for j in range(count):
            t = T + j * grid_step
            intervals.append((j, t, t + psi(t) / math.log(t)))
        outcomes, scan = self._interval_census(intervals, T, scan_step, workers, scan)

        overrides = {'span_override': span_override} if span_override is not None else {}
        extra = {
            'epsilon': epsilon, 'grid_step': grid_step, 'grid_points': count,
            'psi': psi.label(), 'scan_step': scan.step,
            'zeros': len(scan.brackets),
        }
        return self._report('selberg_intervals', 'selberg_intervals', T, span, 0.0,
                            outcomes, strict, overrides, extra)

    def exceptional_interval_census(self, T, epsilon, psi, tau=0.0, span_override=None,
                                    scan_step=None, workers=None, scan=None, strict=None):
        """
        The Selberg intervals (g, g + psi(g)/ln g) taken on the Gram lattice
        itself, for g in [T, T + T^(1/2+eps) ln T]. The budget diagnostic
        a1 <= floor(psi(T)/2pi) <= a2 sqrt(ln P0) uses the bounds of
        segment_budget_window, so epsilon lies in (0, 0.1]; it is reported, not enforced.
        """
        a1, upper = segment_budget_window(T, epsilon).budget_bounds
        strict = self._strict(strict) and span_override is None
        if span_override is not None:
            span = float(span_override)
        else:
            span = selberg_span(T, epsilon) * math.log(T)
        psi.validate(T, T + span, strict)

        window, points = self.solve_window(T, span, tau, workers)
        intervals = [(g.nu, g.t, g.t + psi(g.t) / math.log(g.t)) for g in points]
        outcomes, scan = self._interval_census(intervals, T, scan_step, workers, scan)

        budget = math.floor(psi(T) / TWO_PI)
        overrides = {'span_override': span_override} if span_override is not None else {}
        extra = {
            'epsilon': epsilon, 'grid_points': len(points),
            'nu_first': window.nu_first, 'nu_last': window.nu_last,
            'psi': psi.label(), 'budget': budget, 'budget_a1': a1, 'budget_upper': upper,
            'budget_in_window': a1 <= budget <= upper,
            'zeros': len(scan.brackets) if scan else 0,
        }
        return self._report('exceptional_intervals', 'exceptional_intervals', T, span, tau,
                            outcomes, strict, overrides, extra)

    def count_sign_preserving(self, spec, workers=None, strict=None, desk_window=False):
        """
        Gram points whose samples Z(g + k*omega), k = 1..M, all share one certain
        sign; a point with any uncertain sample is tallied as uncertain.
        With desk_window the length spec.U is a desk-scale choice: strict checks
        are relaxed and the length is recorded as an override.
        """
        if spec.M < 1:
            raise DomainError(f"Sign preservation needs M >= 1, got M={spec.M}")
        strict = self._strict(strict) and not desk_window
        spec.validate(strict)

        window, points = self.solve_window(spec.T, spec.U, spec.tau, workers)
        rows = self.sample_grid(points, spec, workers)
        outcomes = []
        for g, row in zip(points, rows):
            tail = row[1:]
            if any(not s.certain for s in tail):
                outcome = Outcome.UNCERTAIN
            elif len({s.value for s in tail}) == 1:
                outcome = Outcome.HIT
            else:
                outcome = Outcome.MISS
            outcomes.append(IntervalOutcome(index=g.nu, a=tail[0].t, b=tail[-1].t,
                                            outcome=outcome))

        overrides = {'U_override': spec.U} if desk_window else {}
        extra = {'M': spec.M, 'omega': spec.omega,
                 'nu_first': window.nu_first, 'nu_last': window.nu_last}
        return self._report('sign_preserving', 'sign_preserving', spec.T, spec.U, spec.tau,
                            outcomes, strict, overrides, extra)

    def _segment_census(self, points, rows, last, spec):
        """First-fit segment per Gram point, then the disjoint greedy sweep."""
        candidates, status = [], {}
        for g, row in zip(points, rows):
            k, skipped = _first_change(row, 1, last)
            if k is None:
                status[g.nu] = Outcome.UNCERTAIN if skipped else Outcome.MISS
                continue
            candidates.append(Segment(nu=g.nu, k=k, lo=row[k - 1].t, hi=row[k].t))
        accepted = _greedy_disjoint(candidates)
        outcomes = []
        for g in points:
            if g.nu in accepted:
                outcome = Outcome.HIT
            else:
                outcome = status.get(g.nu, Outcome.MISS)
            outcomes.append(IntervalOutcome(index=g.nu, a=g.t, b=g.t + spec.M * spec.omega,
                                            outcome=outcome))
        return outcomes

    def good_segments_bounded(self, T, U, delta, tau=0.0, workers=None, strict=None):
        """
        Disjoint good segments [g + k*omega, g + (k+1)*omega] with
        0 <= k <= floor(delta ln T), first fit per Gram point, against U.
        """
        if not delta > 1.0:
            raise DomainError(f"delta must exceed 1, got {delta!r}")
        strict = self._strict(strict)
        budget = math.floor(delta * math.log(T))
        spec = GridSpec.build(T, U, budget + 1, tau)

        window, points = self.solve_window(T, U, tau, workers)
        rows = self.sample_grid(points, spec, workers)
        # pair (k-1, k) for k = 1..budget+1 is the segment starting at k-1
        outcomes = self._segment_census(points, rows, budget + 1, spec)
        extra = {'delta': delta, 'budget': budget,
                 'nu_first': window.nu_first, 'nu_last': window.nu_last}
        return self._report('good_segments', 'good_segments_bounded', T, U, tau, outcomes,
                            strict, {}, extra)

    def good_segments_windowed(self, T, U, tau=0.0, budget=None, epsilon=0.1,
                               workers=None, strict=None):
        """
        Disjoint good segments [g + (k-1)*omega, g + k*omega] with
        1 <= k <= min(budget, N1), against U ln T. Without a budget every integer
        budget of the admissible window is tried and the one with the most hits
        (smallest on ties) is reported.
        """
        strict = self._strict(strict)
        budgets = list(budget_range(T, epsilon))
        if budget is not None:
            if budget < 1:
                raise DomainError(f"Segment budget must be positive, got {budget}")
            if budget not in budgets:
                window_bounds = segment_budget_window(T, epsilon).budget_bounds
                message = (f"Budget {budget} outside [{window_bounds[0]:.3f}, "
                           f"{window_bounds[1]:.3f}] at T={T:g}, eps={epsilon}")
                if strict:
                    raise ValidationError(message)
                logger.warning(f"Exploration mode: {message}")
            candidates = [budget]
        else:
            if not budgets:
                raise ValidationError(f"Empty budget window at T={T:g}, eps={epsilon}")
            candidates = budgets

        window, points = self.solve_window(T, U, tau, workers)
        n1 = window.span
        spec = GridSpec.build(T, U, max(1, min(max(candidates), n1)), tau)
        rows = self.sample_grid(points, spec, workers)

        scan_hits, best = {}, None
        for b in candidates:
            outcomes = self._segment_census(points, rows, max(0, min(b, n1)), spec)
            hits = sum(1 for o in outcomes if o.outcome is Outcome.HIT)
            scan_hits[b] = hits
            if best is None or hits > best[1]:
                best = (b, hits, outcomes)

        chosen, _, outcomes = best
        overrides = {'budget': budget} if budget is not None else {}
        extra = {'budget': chosen, 'epsilon': epsilon, 'N1': n1,
                 'budget_scan': scan_hits if budget is None else {},
                 'nu_first': window.nu_first, 'nu_last': window.nu_last}
        return self._report('good_segments', 'good_segments_windowed', T, U, tau, outcomes,
                            strict, overrides, extra)

    def zero_count_increment(self, T, U, scan_step=None, workers=None, scan=None):
        """Certified odd-order zeros in [T, T+U]; unresolved lattice points count as uncertain."""
        if not U > 0.0:
            raise DomainError(f"Window length must be positive, got U={U!r}")
        scan = self.zero_scan(T, T + U, scan_step, workers, scan)
        zeros = [b for b in scan.brackets if T <= b.root <= T + U]
        unresolved = [x for x in scan.unresolved if T <= x <= T + U]
        outcomes = ([IntervalOutcome(index=i, a=b.lo, b=b.hi, outcome=Outcome.HIT)
                     for i, b in enumerate(zeros)]
                    + [IntervalOutcome(index=-1, a=x, b=x, outcome=Outcome.UNCERTAIN)
                       for x in unresolved])
        extra = {'scan_step': scan.step, 'rvm_main_term': rvm_zero_count(T, U),
                 'samples': scan.samples}
        return self._report('zero_count', 'zero_count', T, U, 0.0, outcomes, False, {}, extra)

    def moments(self, spec, theta_variant='theta1', workers=None, strict=None,
                desk_window=False):
        """
        J = sum over Gram points of (sum_k Z(g + k*omega))^2 and
        N = sum over Gram points of |sum_k (e^{-i theta(g + k*omega)} Z(g + k*omega) - 1)|^2
        for k = 0..M, one report per theta variant.
        """
        variants = THETA_VARIANTS if theta_variant == 'both' else (theta_variant,)
        for variant in variants:
            if variant not in THETA_VARIANTS:
                raise DomainError(f"Unknown theta variant '{variant}'")
        strict = self._strict(strict) and not desk_window
        spec.validate(strict)

        window, points = self.solve_window(spec.T, spec.U, spec.tau, workers)
        tasks = [(chunk, spec, variants) for chunk in chunked(points)]
        terms = [row for part in run_tasks(_moment_task, tasks, workers) for row in part]

        J_bar = math.fsum(j for j, _ in terms)
        reports = []
        for variant in variants:
            N_bar = math.fsum(n[variant] for _, n in terms)
            report = MomentReport(
                command='moments', T=spec.T, U=spec.U, M=spec.M, tau=spec.tau,
                theta_variant=variant, gram_points=len(points),
                J_bar=J_bar, N_bar=N_bar, strict=strict,
                overrides={'U_override': spec.U} if desk_window else {},
            )
            logger.info(f"Moments T={spec.T:g} M={spec.M} tau={spec.tau:g} ({variant}): "
                        f"J={J_bar:.6g} N={N_bar:.6g} over {len(points)} points")
            reports.append(report)
        return reports


_THETA = {'theta1': theta1, 'theta_full': theta_full}


def _moment_task(task):
    points, spec, variants = task
    rows = _sample_task((points, spec))
    out = []
    for row in rows:
        j = math.fsum(s.z for s in row) ** 2
        n = {}
        for variant in variants:
            phase = _THETA[variant]
            re = math.fsum(math.cos(phase(s.t)) * s.z - 1.0 for s in row)
            im = math.fsum(-math.sin(phase(s.t)) * s.z for s in row)
            n[variant] = re * re + im * im
        out.append((j, n))
    return out


# Global instance
census_service = CensusService()
