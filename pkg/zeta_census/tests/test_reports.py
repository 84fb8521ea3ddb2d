import json
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from zeta_census import __version__
from zeta_census.exceptions import DomainError, ValidationError
from zeta_census.services.asymptotics import predicted_zero_count
from zeta_census.services.reports import (
    CSV_COLUMNS, CensusReport, MomentReport, merge_reports, read_reports,
    render_reports, write_error_record, write_reports,
)


def zero_report(T, U, hits, total=None, uncertain=0):
    return CensusReport(
        command='zero_count', kind='zero_count', T=T, U=U, tau=0.0,
        total=hits + uncertain if total is None else total, hits=hits, uncertain=uncertain,
        predicted_main_term=predicted_zero_count(T, U),
        predicted_main_term_2pi=predicted_zero_count(T, U, 'ln_T_2pi'),
        anchors={'main_term': '(1/2pi) U ln T'}, extra={'scan_step': 0.05},
    )


class CensusReportTests(SimpleTestCase):
    def test_derived_columns(self):
        report = zero_report(1e6, 100.0, hits=180, total=200, uncertain=5)
        self.assertEqual(report.misses, 15)
        self.assertEqual(report.fraction, 0.9)
        self.assertAlmostEqual(report.ratio, 180 / predicted_zero_count(1e6, 100.0))
        self.assertEqual(list(report.as_row()), CSV_COLUMNS)

    def test_rejects_inconsistent_counts(self):
        with self.assertRaises(ValidationError):
            zero_report(1e6, 100.0, hits=10, total=5)
        with self.assertRaises(ValidationError):
            zero_report(1e6, 100.0, hits=4, total=5, uncertain=2)

    def test_empty_window(self):
        report = zero_report(1e6, 1.0, hits=0, total=0)
        self.assertIsNone(report.fraction)
        self.assertEqual(report.misses, 0)


class MergeTests(SimpleTestCase):
    def test_counts_add_and_main_terms_are_recomputed(self):
        left = zero_report(1e6, 100.0, hits=188, uncertain=1)
        right = zero_report(1e6 + 100.0, 100.0, hits=192)
        merged = merge_reports([left, right])
        self.assertEqual((merged.T, merged.U), (1e6, 200.0))
        self.assertEqual((merged.total, merged.hits, merged.uncertain), (381, 380, 1))
        self.assertAlmostEqual(merged.predicted_main_term, predicted_zero_count(1e6, 200.0))
        self.assertEqual(merged.extra['merged_from'], 2)

    def test_grid_points_add(self):
        parts = [
            CensusReport(command='selberg_intervals', kind='selberg_intervals', T=T, U=10.0,
                         tau=0.0, total=21, hits=20, extra={'grid_points': 21})
            for T in (1e6, 1e6 + 10.0)
        ]
        merged = merge_reports(parts)
        self.assertEqual(merged.extra['grid_points'], 42)
        self.assertEqual(merged.predicted_main_term, 42.0)

    def test_windows_must_tile_the_cover(self):
        left = zero_report(1e6, 100.0, hits=188)
        right = zero_report(1e6 + 100.0, 100.0, hits=192)
        merged = merge_reports([right, left])
        self.assertEqual((merged.T, merged.U, merged.hits), (1e6, 200.0, 380))
        with self.assertRaises(ValidationError):
            merge_reports([left, left])
        with self.assertRaises(ValidationError):
            merge_reports([left, zero_report(1e6 + 50.0, 100.0, hits=90)])
        with self.assertRaises(ValidationError):
            merge_reports([left, zero_report(1e6 + 150.0, 100.0, hits=190)])

    def test_refusals(self):
        with self.assertRaises(ValidationError):
            merge_reports([])
        segments = CensusReport(command='good_segments', kind='good_segments_bounded',
                                T=1e6, U=10.0, tau=0.0, total=30, hits=10)
        with self.assertRaises(ValidationError):
            merge_reports([segments, segments])
        gram = CensusReport(command='gram_intervals', kind='gram_intervals',
                            T=1e6, U=10.0, tau=0.0, total=30, hits=10)
        with self.assertRaises(ValidationError):
            merge_reports([zero_report(1e6, 10.0, hits=3), gram])


class MomentReportTests(SimpleTestCase):
    def test_normalisation(self):
        report = MomentReport(command='moments', T=1e6, U=10.0, M=0, tau=0.0,
                              theta_variant='theta1', gram_points=38, J_bar=50.0, N_bar=20.0)
        scale = 10.0 * math.log(1e6) ** 2
        self.assertAlmostEqual(report.normalized_J, 50.0 / scale)
        self.assertAlmostEqual(report.normalized_N, 20.0 / scale)

    def test_row_records_the_run(self):
        report = MomentReport(command='moments', T=1e6, U=10.0, M=2, tau=0.0,
                              theta_variant='theta_full', gram_points=38, J_bar=50.0,
                              N_bar=20.0, strict=True, overrides={'U_override': 10.0})
        row = report.as_row()
        self.assertTrue(row['strict'])
        self.assertEqual(row['overrides'], {'U_override': 10.0})
        self.assertEqual(set(row['anchors']), {'J', 'N'})
        self.assertEqual(row['engine_version'], __version__)


class FileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_csv_and_json_carry_the_same_columns(self):
        report = zero_report(1e6, 100.0, hits=188, uncertain=1)
        header = render_reports([report], 'csv').splitlines()[0]
        self.assertEqual(header.split(','), CSV_COLUMNS)
        [row] = json.loads(render_reports([report], 'json'))
        self.assertEqual(list(row), CSV_COLUMNS)
        with self.assertRaises(ValidationError):
            render_reports([report], 'xml')

    def test_written_reports_read_back(self):
        report = zero_report(1e6, 100.0, hits=188, uncertain=1)
        for fmt in ('csv', 'json'):
            path = write_reports([report], self.dir / f'zeros.{fmt}', fmt)
            [restored] = read_reports(path)
            self.assertEqual(restored.hits, 188)
            self.assertEqual(restored.extra, {'scan_step': 0.05})
            self.assertEqual(restored.predicted_main_term, report.predicted_main_term)

    def test_missing_file(self):
        with self.assertRaises(ValidationError):
            read_reports(self.dir / 'absent.csv')

    def test_error_record(self):
        path = write_error_record(DomainError('tau out of range'), 'gram', self.dir / 'points.csv')
        record = json.loads(path.read_text())
        self.assertEqual(record['exit_code'], 2)
        self.assertEqual(record['kind'], 'domain')
        self.assertFalse(record['success'])
        self.assertEqual(path.name, 'points.csv.error.json')
