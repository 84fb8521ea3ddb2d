import argparse
import json
import logging
import time
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ...exceptions import GramGridError
from ...services.asymptotics import compare, report_predictions
from ...services.reports import CensusReport, render_reports, write_error_record, write_reports
from ...services.run_config import RunConfig

logger = logging.getLogger(__name__)


class GramGridCommand(BaseCommand):
    """
    Shared plumbing: option resolution, report emission, and the mapping of
    service errors onto exit codes 2 (domain/validation) and 3 (numerical).

    Subclasses declare `defaults` and `casts`, add their own options, and
    implement `run(config)` returning {file suffix: [records]}.
    """
    defaults = {}
    casts = {}

    def add_arguments(self, parser):
        parser.add_argument('--out', help='Report path; one file per tau when several are given')
        parser.add_argument('--format', choices=['csv', 'json'], help='Report format (default csv)')
        parser.add_argument('--config', help='Flat KEY=value file with option values')
        parser.add_argument('--workers', '-w', type=int, help='Worker processes')
        parser.add_argument('--strict', action=argparse.BooleanOptionalAction, default=None,
                            help='Enforce admissibility conditions instead of warning')
        parser.add_argument('--tolerance', type=float, help='Relative tolerance of verdicts')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, config):
        raise NotImplementedError

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def handle(self, *args, **options):
        start_time = time.time()
        config = None
        try:
            config = RunConfig.resolve(self.command_name, options, self.defaults, self.casts)
            groups = self.run(config)
            for records in groups.values():
                self.attach_verdicts(records, config.tolerance)
            self.emit(groups, config)
        except GramGridError as e:
            logger.error(f"{self.command_name} failed: {e}", exc_info=True)
            self.stderr.write(json.dumps(e.as_record(self.command_name)))
            if config is not None and config.out:
                write_error_record(e, self.command_name, config.out)
            raise CommandError(str(e), returncode=e.exit_code)
        logger.info(f"{self.command_name} finished in {time.time() - start_time:.2f}s")

    def attach_verdicts(self, records, tolerance):
        for record in records:
            if isinstance(record, CensusReport):
                record.extra['verdicts'] = {
                    p.name: {'ratio': v.ratio, 'passed': v.passed,
                             'infinite_ratio': v.infinite_ratio}
                    for p in report_predictions(record)
                    for v in [compare(record, p, tolerance)]
                }

    def emit(self, groups, config):
        if not config.out:
            for records in groups.values():
                self.stdout.write(render_reports(records, config.fmt), ending='')
            return
        out = Path(config.out)
        for suffix, records in groups.items():
            path = out.with_name(f"{out.stem}{suffix}{out.suffix}") if suffix else out
            write_reports(records, path, config.fmt)
            self.stdout.write(f"Wrote {len(records)} records to {path}")


def tau_suffix(taus, tau):
    """File suffix for one of several taus; empty when only one was requested."""
    return f"_tau{tau:+.6f}" if len(taus) > 1 else ''
