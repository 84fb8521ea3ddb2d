"""
Slowly growing test functions for interval lengths.

A PsiFunction is written on the command line as one of

    lnlnln            ln ln ln t
    powlog:a:c        c * (ln t)^a
    const:c           c
    pow:psi:e         psi(t)^e, built on the paired psi

optionally followed by "*factor" to scale the value.
"""
import logging
import math
from dataclasses import dataclass, replace

from ..exceptions import DomainError, ValidationError

logger = logging.getLogger(__name__)

ROLE_PSI = 'psi'
ROLE_PSI_BAR = 'psi_bar'

KIND_LNLNLN = 'lnlnln'
KIND_POWLOG = 'powlog'
KIND_CONST = 'const'
KIND_POWER = 'pow'

# Finite-height stand-in for psi_bar / psi^(1/3) -> 0
PAIR_RATIO_LIMIT = 0.5


@dataclass(frozen=True)
class PsiFunction:
    kind: str
    params: tuple = ()
    role: str = ROLE_PSI
    scale: float = 1.0
    base: 'PsiFunction' = None

    @classmethod
    def lnlnln(cls, role=ROLE_PSI):
        return cls(kind=KIND_LNLNLN, role=role)

    @classmethod
    def powlog(cls, a, c=1.0, role=ROLE_PSI):
        return cls(kind=KIND_POWLOG, params=(float(a), float(c)), role=role)

    @classmethod
    def const(cls, c, role=ROLE_PSI):
        return cls(kind=KIND_CONST, params=(float(c),), role=role)

    @classmethod
    def power(cls, base, exponent, role=ROLE_PSI_BAR):
        return cls(kind=KIND_POWER, params=(float(exponent),), role=role, base=base)

    def _raw(self, t):
        if self.kind == KIND_LNLNLN:
            inner = math.log(t)
            if inner <= 1.0:
                raise DomainError(f"lnlnln needs t > e^e, got t={t!r}")
            return math.log(math.log(inner))
        if self.kind == KIND_POWLOG:
            a, c = self.params
            return c * math.log(t) ** a
        if self.kind == KIND_CONST:
            return self.params[0]
        if self.kind == KIND_POWER:
            value = self.base(t)
            if value < 0.0:
                raise DomainError(f"Cannot raise negative {self.base.label()}({t:g}) to a power")
            return value ** self.params[0]
        raise DomainError(f"Unknown psi kind '{self.kind}'")

    def __call__(self, t):
        if not math.isfinite(t) or t <= 1.0:
            raise DomainError(f"psi needs t > 1, got t={t!r}")
        return self.scale * self._raw(t)

    @property
    def diverging(self):
        if self.scale <= 0.0:
            return False
        if self.kind == KIND_LNLNLN:
            return True
        if self.kind == KIND_POWLOG:
            a, c = self.params
            return a > 0.0 and c > 0.0
        if self.kind == KIND_POWER:
            return self.params[0] > 0.0 and self.base.diverging
        return False

    def scaled(self, factor):
        return replace(self, scale=self.scale * factor)

    def label(self):
        if self.kind == KIND_LNLNLN:
            text = KIND_LNLNLN
        elif self.kind == KIND_POWLOG:
            text = f"{KIND_POWLOG}:{self.params[0]:g}:{self.params[1]:g}"
        elif self.kind == KIND_CONST:
            text = f"{KIND_CONST}:{self.params[0]:.17g}"
        else:
            text = f"{KIND_POWER}:psi:{self.params[0]:g}"
        if self.scale != 1.0:
            text += f"*{self.scale:.17g}"
        return text

    @classmethod
    def parse(cls, text, role=ROLE_PSI, base=None):
        """Build a PsiFunction from its command-line form."""
        if not text:
            raise ValidationError("Empty psi specification")
        body, _, factor = text.strip().partition('*')
        parts = body.split(':')
        try:
            scale = float(factor) if factor else 1.0
            if parts[0] == KIND_LNLNLN and len(parts) == 1:
                psi = cls.lnlnln(role=role)
            elif parts[0] == KIND_POWLOG and len(parts) == 3:
                psi = cls.powlog(float(parts[1]), float(parts[2]), role=role)
            elif parts[0] == KIND_CONST and len(parts) == 2:
                psi = cls.const(float(parts[1]), role=role)
            elif parts[0] == KIND_POWER and len(parts) == 3 and parts[1] == 'psi':
                if base is None:
                    raise ValidationError(f"'{text}' refers to psi but no psi was given")
                psi = cls.power(base, float(parts[2]), role=role)
            else:
                raise ValidationError(f"Unrecognized psi specification '{text}'")
        except ValueError as e:
            raise ValidationError(f"Malformed psi specification '{text}': {e}")
        return psi.scaled(scale) if scale != 1.0 else psi

    def validate(self, T, T_end, strict=False):
        """
        Check positivity, monotonicity and the sqrt(ln t) ceiling at both ends of
        the window, and divergence for the psi role. Returns the list of problems;
        strict mode raises on the first.
        """
        problems = []
        start, end = self(T), self(T_end)
        if start <= 0.0:
            problems.append(f"{self.label()} is not positive at T={T:g} ({start:.6g})")
        if end < start:
            problems.append(f"{self.label()} decreases over [{T:g}, {T_end:g}]")
        for t, value in ((T, start), (T_end, end)):
            ceiling = math.sqrt(math.log(t))
            if value > ceiling:
                problems.append(
                    f"{self.label()}({t:g}) = {value:.6g} exceeds sqrt(ln t) = {ceiling:.6g}"
                )
        if self.role == ROLE_PSI and not self.diverging:
            problems.append(f"{self.label()} does not grow to infinity")
        _report(problems, strict)
        return problems


def validate_pair(psi, psi_bar, T, U, strict=False):
    """psi_bar(T+U) / psi(T)^(1/3) must stay below PAIR_RATIO_LIMIT."""
    base = psi(T)
    if base <= 0.0:
        problems = [f"psi({T:g}) is not positive"]
    else:
        ratio = psi_bar(T + U) / base ** (1.0 / 3.0)
        problems = []
        if ratio > PAIR_RATIO_LIMIT:
            problems.append(
                f"psi_bar/psi^(1/3) = {ratio:.4f} exceeds {PAIR_RATIO_LIMIT} at T={T:g}"
            )
    _report(problems, strict)
    return problems


def _report(problems, strict):
    if not problems:
        return
    if strict:
        raise ValidationError('; '.join(problems))
    for problem in problems:
        logger.warning(f"Exploration mode: {problem}")
