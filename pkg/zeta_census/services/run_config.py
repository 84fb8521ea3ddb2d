"""
Run configuration for the management commands.

Each option is taken from the command line when given there, otherwise from
the --config file, otherwise from the command's defaults. Config files are flat
KEY=value text; keys are the upper-cased option names (U_OVERRIDE=500).
"""
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from decouple import Csv, RepositoryEnv
from django.conf import settings

from ..exceptions import ValidationError

logger = logging.getLogger(__name__)

COMMON_OPTIONS = ('out', 'format', 'workers', 'strict', 'tolerance')

_TAU_PATTERN = re.compile(
    r'^(?P<sign>[-+]?)\s*(?P<coef>\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$'
)


def parse_tau(text):
    """A shift given as a number or as a multiple of pi ('-pi', 'pi/2', '0.5*pi')."""
    if isinstance(text, (int, float)):
        return float(text)
    value = str(text).strip().lower()
    match = _TAU_PATTERN.match(value)
    try:
        if match:
            coef = float(match.group('coef')) if match.group('coef') else 1.0
            den = float(match.group('den')) if match.group('den') else 1.0
            tau = coef * math.pi / den
            return -tau if match.group('sign') == '-' else tau
        return float(value)
    except ValueError:
        raise ValidationError(f"Cannot read tau value '{text}'")


def tau_list(value):
    if isinstance(value, (list, tuple)):
        return [parse_tau(v) for v in value]
    return [parse_tau(v) for v in Csv()(value)]


def int_list(value):
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return Csv(cast=int)(value)


def float_list(value):
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return Csv(cast=float)(value)


def as_bool(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


def _cast(name, cast, value):
    try:
        return cast(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"Option '{name}' has invalid value {value!r}: {e}")


@dataclass
class RunConfig:
    command: str
    values: dict
    strict: bool
    workers: int
    out: str = None
    fmt: str = 'csv'
    tolerance: float = 0.05
    sources: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.values[name]

    def get(self, name, default=None):
        value = self.values.get(name)
        return default if value is None else value

    def overridden(self, name):
        """True when the option was supplied rather than defaulted."""
        return self.sources.get(name) in ('flag', 'config')

    @classmethod
    def resolve(cls, command, options, defaults, casts=None):
        """
        Merge parsed command-line options (None when absent), an optional config
        file named by options['config'], and the command defaults.
        """
        casts = casts or {}
        repository = {}
        config_path = options.get('config')
        if config_path:
            if not Path(config_path).exists():
                raise ValidationError(f"Config file not found: {config_path}")
            repository = RepositoryEnv(config_path).data
            logger.info(f"Loaded {len(repository)} keys from {config_path}")

        values, sources = {}, {}
        names = list(defaults) + [n for n in COMMON_OPTIONS if n not in defaults]
        for name in names:
            key = name.upper()
            cast = casts.get(name)
            if options.get(name) is not None:
                value, source = options[name], 'flag'
            elif key in repository:
                value, source = repository[key], 'config'
            else:
                value, source = defaults.get(name), 'default'
            if value is not None and cast is not None:
                value = _cast(name, cast, value)
            values[name] = value
            sources[name] = source

        unknown = set(repository) - {n.upper() for n in names}
        for key in sorted(unknown):
            logger.warning(f"Ignoring unknown config key {key} for {command}")

        strict = values['strict']
        strict = settings.GRAMGRID_STRICT if strict is None else as_bool(strict)
        workers = values['workers']
        workers = settings.GRAMGRID_WORKERS if workers is None else int(workers)
        fmt = values['format'] or 'csv'
        if fmt not in ('csv', 'json'):
            raise ValidationError(f"Unknown format '{fmt}'")
        tolerance = float(values['tolerance']) if values['tolerance'] is not None else 0.05

        return cls(command=command, values=values, strict=strict, workers=max(1, workers),
                   out=values['out'], fmt=fmt, tolerance=tolerance, sources=sources)

    def require(self, *names):
        missing = [n for n in names if self.values.get(n) is None]
        if missing:
            flags = ', '.join('--' + n.replace('_', '-') for n in missing)
            raise ValidationError(f"{self.command} needs {flags}")
