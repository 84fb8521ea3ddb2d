"""
Report records produced by the censuses, their merge, and CSV/JSON files.

CSV and JSON carry the same columns in the same order; structured columns
(overrides, anchors, extra) are JSON-encoded inside CSV cells.
"""
import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from django.core.serializers.json import DjangoJSONEncoder

from .. import __version__
from ..exceptions import ValidationError
from .asymptotics import main_terms

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json')

CSV_COLUMNS = [
    'command', 'kind', 'T', 'U', 'tau',
    'total', 'hits', 'misses', 'uncertain', 'fraction',
    'predicted_main_term', 'predicted_main_term_2pi', 'ratio', 'ratio_2pi',
    'strict', 'overrides', 'anchors', 'extra', 'engine_version',
]

# Good-segment sweeps carry state across the window and cannot be added up
UNMERGEABLE_KINDS = ('good_segments_bounded', 'good_segments_windowed')

_STRUCTURED = ('overrides', 'anchors', 'extra')

# Relative slack when checking that one window ends where the next starts
CONTIGUITY_TOLERANCE = 1e-12

# Scales the moment and exponential sums are divided by
MOMENT_ANCHORS = {'J': 'max(M, 1) U (ln T)^2', 'N': 'max(M, 1) U (ln T)^2'}
EXP_SUM_ANCHORS = {'S1': 'max(M, 1) T^(5/12) (ln T)^3', 'S2': 'T^(5/12) (ln T)^2'}


def _ratio(hits, predicted):
    if predicted > 0.0:
        return hits / predicted
    return None


@dataclass
class CensusReport:
    command: str
    kind: str
    T: float
    U: float
    tau: float
    total: int = 0
    hits: int = 0
    uncertain: int = 0
    predicted_main_term: float = 0.0
    predicted_main_term_2pi: float = 0.0
    strict: bool = False
    overrides: dict = field(default_factory=dict)
    anchors: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    engine_version: str = __version__
    # Per-index outcomes, kept in memory only
    outcomes: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.hits <= self.total or self.uncertain < 0 \
                or self.hits + self.uncertain > self.total:
            raise ValidationError(
                f"Inconsistent counts: total={self.total} hits={self.hits} "
                f"uncertain={self.uncertain}"
            )

    @property
    def misses(self):
        return self.total - self.hits - self.uncertain

    @property
    def fraction(self):
        return self.hits / self.total if self.total else None

    @property
    def ratio(self):
        return _ratio(self.hits, self.predicted_main_term)

    @property
    def ratio_2pi(self):
        return _ratio(self.hits, self.predicted_main_term_2pi)

    def as_row(self):
        return {
            'command': self.command,
            'kind': self.kind,
            'T': self.T,
            'U': self.U,
            'tau': self.tau,
            'total': self.total,
            'hits': self.hits,
            'misses': self.misses,
            'uncertain': self.uncertain,
            'fraction': self.fraction,
            'predicted_main_term': self.predicted_main_term,
            'predicted_main_term_2pi': self.predicted_main_term_2pi,
            'ratio': self.ratio,
            'ratio_2pi': self.ratio_2pi,
            'strict': self.strict,
            'overrides': self.overrides,
            'anchors': self.anchors,
            'extra': self.extra,
            'engine_version': self.engine_version,
        }

    @classmethod
    def from_row(cls, row):
        values = {}
        for key in _STRUCTURED:
            value = row.get(key) or {}
            values[key] = json.loads(value) if isinstance(value, str) else dict(value)
        strict = row.get('strict')
        if isinstance(strict, str):
            strict = strict.strip().lower() in ('true', '1', 'yes')
        try:
            return cls(
                command=row['command'], kind=row['kind'],
                T=float(row['T']), U=float(row['U']), tau=float(row['tau']),
                total=int(row['total']), hits=int(row['hits']),
                uncertain=int(row['uncertain']),
                predicted_main_term=float(row['predicted_main_term']),
                predicted_main_term_2pi=float(row['predicted_main_term_2pi']),
                strict=bool(strict), engine_version=row.get('engine_version') or __version__,
                **values,
            )
        except (KeyError, ValueError, TypeError) as e:
            raise ValidationError(f"Malformed census report row: {e}")


@dataclass
class MomentReport:
    command: str
    T: float
    U: float
    M: int
    tau: float
    theta_variant: str
    gram_points: int
    J_bar: float
    N_bar: float
    strict: bool = False
    overrides: dict = field(default_factory=dict)
    anchors: dict = field(default_factory=lambda: dict(MOMENT_ANCHORS))
    engine_version: str = __version__

    def _scale(self):
        return max(self.M, 1) * self.U * math.log(self.T) ** 2

    @property
    def normalized_J(self):
        return self.J_bar / self._scale()

    @property
    def normalized_N(self):
        return self.N_bar / self._scale()

    def as_row(self):
        return {
            'command': self.command, 'T': self.T, 'U': self.U, 'M': self.M,
            'tau': self.tau, 'theta_variant': self.theta_variant,
            'gram_points': self.gram_points, 'J_bar': self.J_bar, 'N_bar': self.N_bar,
            'normalized_J': self.normalized_J, 'normalized_N': self.normalized_N,
            'strict': self.strict, 'overrides': self.overrides,
            'anchors': self.anchors,
            'engine_version': self.engine_version,
        }


@dataclass
class ExpSumReport:
    command: str
    T: float
    U: float
    tau: float
    k: int
    l: int
    M: int
    pairs: int
    gram_points: int
    S1: float
    S2: float
    strict: bool = False
    overrides: dict = field(default_factory=dict)
    anchors: dict = field(default_factory=lambda: dict(EXP_SUM_ANCHORS))
    engine_version: str = __version__

    @property
    def normalized_S1(self):
        log_t = math.log(self.T)
        return abs(self.S1) / (max(self.M, 1) * self.T ** (5.0 / 12.0) * log_t ** 3)

    @property
    def normalized_S2(self):
        log_t = math.log(self.T)
        return abs(self.S2) / (self.T ** (5.0 / 12.0) * log_t ** 2)

    def as_row(self):
        return {
            'command': self.command, 'T': self.T, 'U': self.U, 'tau': self.tau,
            'k': self.k, 'l': self.l, 'M': self.M, 'pairs': self.pairs,
            'gram_points': self.gram_points, 'S1': self.S1, 'S2': self.S2,
            'normalized_S1': self.normalized_S1, 'normalized_S2': self.normalized_S2,
            'strict': self.strict, 'overrides': self.overrides, 'anchors': self.anchors,
            'engine_version': self.engine_version,
        }


def merge_reports(reports):
    """
    Add census reports over a disjoint cover of one window.

    Reports are taken in window order and must tile the window: an overlap
    would count its hits twice and a gap would inflate the main term. Counts
    are summed and the main terms recomputed for the covering window.
    """
    reports = sorted(reports, key=lambda r: (r.T, r.extra.get('nu_first', 0)))
    if not reports:
        raise ValidationError("Nothing to merge")
    first = reports[0]
    if first.kind in UNMERGEABLE_KINDS:
        raise ValidationError(f"Reports of kind '{first.kind}' depend on sweep order and cannot be merged")
    for report in reports[1:]:
        if report.kind != first.kind:
            raise ValidationError(f"Cannot merge '{report.kind}' into '{first.kind}'")
        if report.tau != first.tau:
            raise ValidationError(f"Cannot merge tau={report.tau} into tau={first.tau}")
    for left, right in zip(reports, reports[1:]):
        end = left.T + left.U
        slack = CONTIGUITY_TOLERANCE * max(1.0, abs(end))
        if right.T < end - slack:
            raise ValidationError(
                f"Windows [{left.T:g}, {end:g}] and [{right.T:g}, {right.T + right.U:g}] overlap"
            )
        if right.T > end + slack:
            raise ValidationError(f"Gap between {end:g} and {right.T:g} in the merged windows")

    T = min(r.T for r in reports)
    end = max(r.T + r.U for r in reports)
    extra = dict(first.extra)
    if 'grid_points' in extra:
        extra['grid_points'] = sum(int(r.extra.get('grid_points', 0)) for r in reports)
    extra['merged_from'] = len(reports)

    overrides = {}
    for report in reports:
        overrides.update(report.overrides)

    merged = CensusReport(
        command=first.command, kind=first.kind, T=T, U=end - T, tau=first.tau,
        total=sum(r.total for r in reports),
        hits=sum(r.hits for r in reports),
        uncertain=sum(r.uncertain for r in reports),
        strict=all(r.strict for r in reports),
        overrides=overrides, anchors=dict(first.anchors), extra=extra,
        outcomes=[o for r in reports for o in r.outcomes],
    )
    merged.predicted_main_term, merged.predicted_main_term_2pi, _ = main_terms(
        merged.kind, merged.T, merged.U, merged.extra)
    logger.info(f"Merged {len(reports)} '{first.kind}' reports into [{T:g}, {end:g}]: "
                f"{merged.hits}/{merged.total} hits")
    return merged


def _cell(value):
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, cls=DjangoJSONEncoder)
    if value is None:
        return ''
    return value


def _rows(reports):
    return [r if isinstance(r, dict) else r.as_row() for r in reports]


def render_reports(reports, fmt='csv'):
    """CSV or JSON text of report records (dicts pass through unchanged)."""
    if fmt not in FORMATS:
        raise ValidationError(f"Unknown report format '{fmt}', expected one of {FORMATS}")
    rows = _rows(reports)
    if fmt == 'json':
        return json.dumps(rows, indent=2, cls=DjangoJSONEncoder) + '\n'
    buffer = io.StringIO()
    columns = list(rows[0].keys()) if rows else CSV_COLUMNS
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buffer.getvalue()


def write_reports(reports, path, fmt='csv'):
    """Write report rows to path; returns the path written."""
    text = render_reports(reports, fmt)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(text)
    logger.info(f"Wrote {len(reports)} rows to {path}")
    return path


def read_reports(path):
    """Census reports from a CSV or JSON file written by write_reports."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"Report file not found: {path}")
    if path.suffix == '.json':
        with open(path, encoding='utf-8') as f:
            rows = json.load(f)
    else:
        with open(path, newline='', encoding='utf-8') as f:
            rows = list(csv.DictReader(f))
    return [CensusReport.from_row(row) for row in rows]


def write_error_record(error, command, out):
    """<out>.error.json next to the report that failed."""
    path = Path(f"{out}.error.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(error.as_record(command), f, indent=2)
    return path
