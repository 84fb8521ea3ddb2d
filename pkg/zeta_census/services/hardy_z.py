import torch
import mpmath
from django.conf import settings
from django.core.cache import cache
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum

from .. import __version__
from ..exceptions import DomainError, NumericalError
from .gram_points import omega
from .theta_core import TWO_PI, theta_full
from .workers import chunked, partition, run_tasks

logger = logging.getLogger(__name__)

RS_FLOOR = 200.0
EM_CEILING = 1e6
EM_DIGITS_RANGE = (15, 60)
# Above this height t*ln(n) is reduced mod 2pi in double-double arithmetic
EXTENDED_PHASE_FLOOR = 1e7
BATCH_SIZE = 1024
MAX_BLOCK_TERMS = 1 << 22
# Main-sum columns are padded to a multiple of two AVX-512 double vectors
LANE_MULTIPLE = 16
PROBE_DEPTH = 4
REFINE_RELATIVE_WIDTH = 1e-9
ORACLE_DIGITS = 20

EPS = 2.220446049250313e-16
# Remainder bound after the C4 term for t >= 200: 0.017 (t/2pi)^(-11/4)
RS_TAIL_CONSTANT = 0.017
RS_TAIL_EXPONENT = -11.0 / 4.0

TWO_PI_HI = TWO_PI
TWO_PI_LO = 2.4492935982947064e-16
_SPLITTER = 134217729.0

# Riemann-Siegel correction coefficients in z = 2p - 1, p = frac(sqrt(t/2pi)).
# Even functions are listed by z^0, z^2, ...; odd ones by z^1, z^3, ...
_C0 = (
    .38268343236508977173, .43724046807752044936, .13237657548034352332,
    -.01360502604767418865, -.01356762197010358089, -.00162372532314446528,
    .00029705353733379691, .00007943300879521470, .00000046556124614505,
    -.00000143272516309551, -.00000010354847112313, .00000001235792708386,
    .00000000178810838580, -.00000000003391414390, -.00000000001632663390,
    -.00000000000037851093, .00000000000009327423, .00000000000000522184,
    -.00000000000000033507, -.00000000000000003412, .00000000000000000058,
    .00000000000000000015,
)
_C1 = (
    -.02682510262837534703, .01378477342635185305, .03849125048223508223,
    .00987106629906207647, -.00331075976085840433, -.00146478085779541508,
    -.00001320794062487696, .00005922748701847141, .00000598024258537345,
    -.00000096413224561698, -.00000018334733722714, .00000000446708756272,
    .00000000270963508218, .00000000007785288654, -.00000000002343762601,
    -.00000000000158301728, .00000000000012119942, .00000000000001458378,
    -.00000000000000028786, -.00000000000000008663,
)
_C2 = (
    .00518854283029316849, .00030946583880634746, -.01133594107822937338,
    .00223304574195814477, .00519663740886233021, .00034399144076208337,
    -.00059106484274705828, -.00010229972547935857, .00002088839221699276,
    .00000592766549309654, -.00000016423838362436, -.00000015161199700941,
    -.00000000590780369821, .00000000209115148595, .00000000017815649583,
    -.00000000001616407246, -.00000000000238069625, .00000000000005398265,
    .00000000000001975014, .00000000000000023333, -.00000000000000011188,
)
_C3 = (
    -.00133971609071945690, .00374421513637939370, -.00133031789193214681,
    -.00226546607654717871, .00095484999985067304, .00060100384589636039,
    -.00010128858286776622, -.00006865733449299826, .00000059853667915386,
    .00000333165985123995, .00000021919289102435, -.00000007890884245681,
    -.00000000941468508130, .00000000095701162109, .00000000018763137453,
    -.00000000000443783768, -.00000000000224267385, -.00000000000003627687,
    .00000000000001763981, .00000000000000079608, -.00000000000000009420,
    -.00000000000000000713, .00000000000000000033,
)
_C4 = (
    .00046483389361763382, -.00100566073653404708, .00024044856573725793,
    .00102830861497023219, -.00076578610717556442, -.00020365286803084818,
    .00023212290491068728, .00003260214424386520, -.00002557906251794953,
    -.00000410746443891574, .00000117811136403713, .00000024456561422485,
    -.00000002391582476734, -.00000000750521420704, .00000000013312279416,
    .00000000013440626754, .00000000000351377004, -.00000000000151915445,
    -.00000000000008915418, .00000000000000119589, .00000000000000064618,
    .00000000000000001051, -.00000000000000000331, -.00000000000000000005,
)
_CORRECTIONS = ((_C0, False), (_C1, True), (_C2, False), (_C3, True), (_C4, False))


class Sign(str, Enum):
    POSITIVE = 'positive'
    NEGATIVE = 'negative'
    UNCERTAIN = 'uncertain'


@dataclass(frozen=True)
class SignSample:
    t: float
    z: float
    err: float
    sign: Sign

    @classmethod
    def classify(cls, t, z, err):
        if z > err:
            sign = Sign.POSITIVE
        elif z < -err:
            sign = Sign.NEGATIVE
        else:
            sign = Sign.UNCERTAIN
        return cls(t=t, z=z, err=err, sign=sign)

    @property
    def certain(self):
        return self.sign is not Sign.UNCERTAIN

    @property
    def value(self):
        """+1, -1, or 0 when uncertain"""
        if self.sign is Sign.POSITIVE:
            return 1
        if self.sign is Sign.NEGATIVE:
            return -1
        return 0


@dataclass(frozen=True)
class ZeroBracket:
    lo: float
    hi: float
    root: float
    refinement_width: float


@dataclass
class ZeroScan:
    """Certified odd-order zeros of one scan lattice plus its uncertainty tally."""
    lo: float
    hi: float
    step: float
    brackets: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    samples: int = 0

    @property
    def uncertain(self):
        return len(self.unresolved)

    def bracket_bounds(self):
        return [b.lo for b in self.brackets]


def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def _two_prod(a, b):
    """Error-free product: a*b == p + e exactly."""
    p = a * b
    a_hi, a_lo = _split(a)
    b_hi, b_lo = _split(b)
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def _poly(coeffs, z, odd):
    z2 = z * z
    acc = torch.zeros_like(z)
    for c in reversed(coeffs):
        acc = acc * z2 + c
    return acc * z if odd else acc


def lattice(lo, hi, step):
    """Scan abscissae lo + i*step (strictly below hi) followed by hi."""
    count = max(1, math.ceil((hi - lo) / step))
    points = [lo + i * step for i in range(count) if lo + i * step < hi]
    points.append(hi)
    return points


def _probe_points(x, step, is_last):
    offsets = [step / 2 ** j for j in range(PROBE_DEPTH, 0, -1)]
    if is_last:
        return [x - d for d in reversed(offsets)]
    return [x + d for d in offsets]


def _refine_target(lo):
    return REFINE_RELATIVE_WIDTH * max(1.0, lo)


class HardyZService:
    def __init__(self):
        self.device = None
        self._initialized = False
        self._log_table = None

    def initialize(self):
        """Initialize only when needed"""
        if not self._initialized:
            requested = settings.GRAMGRID_DEVICE
            if requested.startswith('cuda') and not torch.cuda.is_available():
                logger.warning(f"Device {requested} unavailable, falling back to cpu")
                requested = 'cpu'
            self.device = torch.device(requested)
            torch.set_num_threads(1)
            torch.use_deterministic_algorithms(True)
            logger.info(f"Using device: {self.device}")
            self._initialized = True

    # Riemann-Siegel engine

    def z_rs(self, t):
        """Z(t) and its error envelope by Riemann-Siegel, t >= 200."""
        values, errors = self.z_rs_many([t])
        return values[0], errors[0]

    def z_rs_many(self, ts):
        self.initialize()
        ts = [float(t) for t in ts]
        for t in ts:
            if not math.isfinite(t) or t < RS_FLOOR:
                raise DomainError(
                    f"z_rs needs t >= {RS_FLOOR:g}, got t={t!r}; use z_em for small heights"
                )
        values, errors = [0.0] * len(ts), [0.0] * len(ts)
        # Each abscissa's phase path depends on its own height only, so results
        # do not change with how the caller batches them
        for extended in (False, True):
            indices = [i for i, t in enumerate(ts) if (t >= EXTENDED_PHASE_FLOOR) == extended]
            if not indices:
                continue
            # Rows per block shrink as the main sum grows
            terms = int(math.sqrt(max(ts[i] for i in indices) / TWO_PI))
            rows = max(1, min(BATCH_SIZE, MAX_BLOCK_TERMS // max(terms, 1)))
            for start in range(0, len(indices), rows):
                part = indices[start:start + rows]
                block_values, block_errors = self._z_rs_block([ts[i] for i in part], extended)
                for i, value, err in zip(part, block_values, block_errors):
                    values[i] = value
                    errors[i] = err
        return values, errors

    def _log_split(self, n_max):
        """ln(n) as hi + lo double-double pairs for n = 1..n_max, cached and grown."""
        if self._log_table is None or self._log_table[0].numel() < n_max:
            logger.info(f"Building double-double log table up to n={n_max}")
            hi, lo = [], []
            with mpmath.workdps(40):
                for n in range(1, n_max + 1):
                    value = mpmath.log(n)
                    head = float(value)
                    hi.append(head)
                    lo.append(float(value - head))
            self._log_table = (
                torch.tensor(hi, dtype=torch.float64, device=self.device),
                torch.tensor(lo, dtype=torch.float64, device=self.device),
            )
        hi, lo = self._log_table
        return hi[:n_max], lo[:n_max]

    def _extended_phases(self, block, t, n_max):
        """theta(t) - t ln(n) reduced mod 2pi with ~1e-15 absolute accuracy."""
        theta_mod = []
        with mpmath.workdps(40):
            for x in block:
                tm = mpmath.mpf(x)
                value = (tm / 2 * mpmath.log(tm / (2 * mpmath.pi)) - tm / 2 - mpmath.pi / 8
                         + 1 / (48 * tm) + 7 / (5760 * tm ** 3))
                theta_mod.append(float(value - 2 * mpmath.pi * mpmath.nint(value / (2 * mpmath.pi))))
        theta_mod = torch.tensor(theta_mod, dtype=torch.float64, device=self.device)

        log_hi, log_lo = self._log_split(n_max)
        tt = t[:, None].expand(-1, n_max)
        p, e = _two_prod(tt, log_hi[None, :].expand_as(tt))
        e = e + tt * log_lo[None, :]
        k = torch.round(p / TWO_PI_HI)
        q, qe = _two_prod(k, torch.full_like(k, TWO_PI_HI))
        reduced = ((p - q) - qe) + (e - k * TWO_PI_LO)
        return theta_mod[:, None] - reduced

    def _z_rs_block(self, block, extended):
        t = torch.tensor(block, dtype=torch.float64, device=self.device)
        a = torch.sqrt(t / TWO_PI)
        N = torch.floor(a)
        p = a - N
        # Whole vector lanes only: no element goes through the scalar tail of a kernel
        width = -(-int(N.max().item()) // LANE_MULTIPLE) * LANE_MULTIPLE
        n = torch.arange(1, width + 1, dtype=torch.float64, device=self.device)

        if extended:
            phase = self._extended_phases(block, t, width)
            phase_err = torch.full_like(t, 16.0 * EPS * TWO_PI)
        else:
            thetas = [theta_full(x) for x in block]
            theta = torch.tensor(thetas, dtype=torch.float64, device=self.device)
            phase = theta[:, None] - t[:, None] * torch.log(n)[None, :]
            phase_err = torch.tensor(
                [4.0 * EPS * (abs(th) + x * math.log(math.floor(math.sqrt(x / TWO_PI))) + 1.0)
                 for th, x in zip(thetas, block)],
                dtype=torch.float64, device=self.device,
            )

        weights = torch.rsqrt(n)
        mask = n[None, :] <= N[:, None]
        terms = torch.where(mask, torch.cos(phase) * weights[None, :], torch.zeros_like(phase))
        # Sequential left-to-right sum: trailing zero padding leaves each row unchanged
        main = 2.0 * torch.cumsum(terms, dim=1)[:, -1]

        z = 2.0 * p - 1.0
        inv_a = 1.0 / a
        correction = torch.zeros_like(t)
        for coeffs, odd in reversed(_CORRECTIONS):
            correction = correction * inv_a + _poly(coeffs, z, odd)
        parity = torch.where(torch.remainder(N, 2.0) == 1.0,
                             torch.ones_like(N), -torch.ones_like(N))
        remainder = parity * torch.rsqrt(a) * correction
        value = main + remainder

        weight_sum = 2.0 * torch.sqrt(N)
        rounding = 2.0 * weight_sum * (phase_err + 2.0 * EPS) + N * EPS * 2.0 * weight_sum
        tail = torch.tensor([RS_TAIL_CONSTANT * (x / TWO_PI) ** RS_TAIL_EXPONENT for x in block],
                            dtype=torch.float64, device=self.device)
        err = tail + rounding + 8.0 * EPS
        return value.tolist(), err.tolist()

    # Euler-Maclaurin oracle

    def z_em(self, t, precision_digits=30):
        """
        Z(t) from zeta(1/2 + it) by Euler-Maclaurin summation with a Bernoulli
        tail, rotated by the log-Gamma phase. Runs in mpmath at
        precision_digits + 15 working digits and returns an mpf; the imaginary
        part of the rotated value is checked against the accuracy target.
        """
        lo_digits, hi_digits = EM_DIGITS_RANGE
        if not lo_digits <= precision_digits <= hi_digits:
            raise DomainError(
                f"z_em precision must be in [{lo_digits}, {hi_digits}] digits, got {precision_digits}"
            )
        if not math.isfinite(t) or t <= 0.0 or t > EM_CEILING:
            raise DomainError(f"z_em needs 0 < t <= {EM_CEILING:g}, got t={t!r}")

        target = mpmath.mpf(10) ** (-(precision_digits + 2))
        with mpmath.workdps(precision_digits + 15):
            tm = mpmath.mpf(t)
            s = mpmath.mpc(mpmath.mpf(1) / 2, tm)
            cutoff = max(30, int(t / 2) + 10)
            head = mpmath.fsum(mpmath.power(n, -s) for n in range(1, cutoff))
            N = mpmath.mpf(cutoff)
            N_pow = mpmath.power(N, -s)
            total = head + N * N_pow / (s - 1) + N_pow / 2

            rising = s
            N_inv2 = 1 / (N * N)
            scale = N_pow / N
            previous = None
            for k in range(1, 400):
                term = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * rising * scale
                total += term
                size = abs(term)
                if size < target * mpmath.mpf(10) ** -3:
                    break
                if previous is not None and size > previous:
                    raise NumericalError(f"Euler-Maclaurin tail diverged at t={t} after {k} terms")
                previous = size
                rising *= (s + 2 * k - 1) * (s + 2 * k)
                scale *= N_inv2
            else:
                raise NumericalError(f"Euler-Maclaurin tail did not converge at t={t}")

            phase = mpmath.im(mpmath.loggamma(mpmath.mpc(mpmath.mpf(1) / 4, tm / 2))) \
                - tm / 2 * mpmath.log(mpmath.pi)
            rotated = mpmath.expj(phase) * total
            if abs(mpmath.im(rotated)) > mpmath.mpf(10) ** (-precision_digits + 2):
                raise NumericalError(
                    f"z_em self-check failed at t={t}: imaginary part {mpmath.nstr(mpmath.im(rotated), 5)}"
                )
            return +mpmath.re(rotated)

    # Signs

    def sign_at(self, t):
        return self.signs([t])[0]

    def signs(self, ts):
        """Tri-state signs; t >= 200 goes to Riemann-Siegel, smaller t to the oracle."""
        ts = [float(t) for t in ts]
        fast = [i for i, t in enumerate(ts) if t >= RS_FLOOR]
        out = [None] * len(ts)
        if fast:
            values, errors = self.z_rs_many([ts[i] for i in fast])
            for i, value, err in zip(fast, values, errors):
                out[i] = SignSample.classify(ts[i], value, err)
        for i, t in enumerate(ts):
            if out[i] is None:
                value = float(self.z_em(t, ORACLE_DIGITS))
                out[i] = SignSample.classify(t, value, 1e-15 * max(1.0, abs(value)))
        return out

    # Zero location

    def scan_chunk(self, lo, hi, step, i0, i1):
        """
        Certain samples of lattice points i0..i1-1 in order, with the probes
        x + step/2^j (j = 1..4) of every uncertain point, plus the points whose
        probes were all uncertain.
        """
        points = lattice(lo, hi, step)
        last = len(points) - 1
        chunk = points[i0:i1]
        samples = self.signs(chunk)
        uncertain = [(i0 + j, s.t) for j, s in enumerate(samples) if not s.certain]
        probes = {}
        if uncertain:
            flat = []
            for index, x in uncertain:
                flat.extend(_probe_points(x, step, index == last))
            probe_samples = self.signs(flat)
            for n, (index, x) in enumerate(uncertain):
                probes[index] = probe_samples[n * PROBE_DEPTH:(n + 1) * PROBE_DEPTH]

        certain, unresolved = [], []
        evaluated = len(chunk)
        for j, sample in enumerate(samples):
            index = i0 + j
            if sample.certain:
                certain.append((sample.t, sample.value))
                continue
            around = probes[index]
            evaluated += len(around)
            hits = [(s.t, s.value) for s in around if s.certain]
            if not hits:
                unresolved.append(sample.t)
            certain.extend(hits)
        certain.sort()
        return certain, unresolved, evaluated

    def refine(self, pairs):
        """
        Bisect certified sign changes in lockstep until each bracket is narrower
        than 1e-9*max(1, lo). A midpoint with uncertain sign is replaced by a
        quarter point; if both quarter points are uncertain the bracket stays as is.
        """
        lo = [a for a, _, _ in pairs]
        hi = [b for _, b, _ in pairs]
        sign_lo = [s for _, _, s in pairs]
        active = [i for i in range(len(pairs)) if hi[i] - lo[i] > _refine_target(lo[i])]
        while active:
            mids = [0.5 * (lo[i] + hi[i]) for i in active]
            samples = self.signs(mids)
            retry, next_active = [], []
            for i, sample in zip(active, samples):
                if not sample.certain:
                    retry.append(i)
                    continue
                if sample.value == sign_lo[i]:
                    lo[i] = sample.t
                else:
                    hi[i] = sample.t
                if hi[i] - lo[i] > _refine_target(lo[i]):
                    next_active.append(i)
            if retry:
                quarters = []
                for i in retry:
                    width = hi[i] - lo[i]
                    quarters.extend([lo[i] + 0.25 * width, lo[i] + 0.75 * width])
                quarter_samples = self.signs(quarters)
                for n, i in enumerate(retry):
                    moved = False
                    for sample in quarter_samples[2 * n:2 * n + 2]:
                        if sample.certain:
                            if sample.value == sign_lo[i]:
                                lo[i] = sample.t
                            else:
                                hi[i] = sample.t
                            moved = True
                            break
                    if moved and hi[i] - lo[i] > _refine_target(lo[i]):
                        next_active.append(i)
                    elif not moved:
                        logger.warning(f"Bracket [{lo[i]!r}, {hi[i]!r}] stopped refining "
                                       f"at width {hi[i] - lo[i]:.3e}: uncertain interior")
            active = sorted(next_active)
        return [ZeroBracket(lo=lo[i], hi=hi[i], root=0.5 * (lo[i] + hi[i]),
                            refinement_width=hi[i] - lo[i])
                for i in range(len(pairs))]

    def default_step(self, lo):
        return omega(lo) / 4.0

    def scan(self, lo, hi, scan_step=None, workers=None):
        """
        Certified odd-order zeros in [lo, hi] from a lattice anchored at lo.
        Results are memoized in the Django cache per (lo, hi, step).
        """
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo < RS_FLOOR or hi <= lo:
            raise DomainError(f"Zero scan needs {RS_FLOOR:g} <= lo < hi, got [{lo!r}, {hi!r}]")
        step = self.default_step(lo) if scan_step is None else float(scan_step)
        if not step > 0.0 or step > omega(lo) / 2.0:
            raise DomainError(
                f"scan_step must be in (0, omega(lo)/2 = {omega(lo) / 2.0:.6g}], got {step!r}"
            )

        cache_key = f"zeros_{__version__}_{lo!r}_{hi!r}_{step!r}"
        cached = cache.get(cache_key)
        if cached is not None:
            logger.info(f"Cache hit for zero scan [{lo:g}, {hi:g}]")
            return cached

        start_time = time.time()
        size = len(lattice(lo, hi, step))
        tasks = [(lo, hi, step, i0, i1) for i0, i1 in partition(0, size)]
        parts = run_tasks(_scan_task, tasks, workers)

        certain, unresolved, evaluated = [], [], 0
        for part_certain, part_unresolved, part_evaluated in parts:
            certain.extend(part_certain)
            unresolved.extend(part_unresolved)
            evaluated += part_evaluated
        # Probes of the closing point may fall before the previous lattice point
        certain = sorted(set(certain))

        pairs = [(a, b, sa) for (a, sa), (b, sb) in zip(certain, certain[1:]) if sa != sb]
        brackets = []
        for part in run_tasks(_refine_task, chunked(pairs), workers):
            brackets.extend(part)

        result = ZeroScan(lo=lo, hi=hi, step=step, brackets=brackets,
                          unresolved=sorted(unresolved), samples=evaluated)
        if unresolved:
            logger.warning(f"{len(unresolved)} lattice points in [{lo:g}, {hi:g}] stayed "
                           f"uncertain after {PROBE_DEPTH} probes")
        logger.info(f"Scanned [{lo:g}, {hi:g}] step {step:.4g}: {len(brackets)} zeros, "
                    f"{evaluated} samples in {time.time() - start_time:.2f}s")
        cache.set(cache_key, result, settings.GRAMGRID_ZERO_CACHE_TIMEOUT)
        return result

    def zeros_in(self, lo, hi, scan_step=None, workers=None):
        return list(self.scan(lo, hi, scan_step, workers).brackets)


def _scan_task(task):
    lo, hi, step, i0, i1 = task
    return hardy_z_service.scan_chunk(lo, hi, step, i0, i1)


def _refine_task(pairs):
    return hardy_z_service.refine(pairs)


# Global instance
hardy_z_service = HardyZService()
