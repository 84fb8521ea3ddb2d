import csv
import io
import json
import math
import tempfile
from pathlib import Path

from django.core.cache import cache
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from zeta_census import __version__
from zeta_census.exceptions import ValidationError
from zeta_census.services.asymptotics import exact_gram_count
from zeta_census.services.gram_points import gram_point
from zeta_census.services.reports import write_reports
from zeta_census.services.run_config import RunConfig, parse_tau, tau_list
from zeta_census.tests.test_reports import zero_report


def run(*args):
    out = io.StringIO()
    call_command(*args, stdout=out, stderr=io.StringIO())
    return out.getvalue()


def run_json(*args):
    return json.loads(run(*args, '--format', 'json'))


class RunConfigTests(SimpleTestCase):
    def test_tau_forms(self):
        self.assertEqual(parse_tau('pi'), math.pi)
        self.assertEqual(parse_tau('-pi/2'), -math.pi / 2)
        self.assertEqual(parse_tau('0.5*pi'), 0.5 * math.pi)
        self.assertEqual(parse_tau('0.25'), 0.25)
        self.assertEqual(tau_list('0, pi'), [0.0, math.pi])
        with self.assertRaises(ValidationError):
            parse_tau('half')

    def test_precedence(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.env'
            path.write_text('T=2000000\nU=300\nSTRICT=true\n')
            options = {'config': str(path), 'T': None, 'U': 50.0}
            config = RunConfig.resolve('gram_count', options, {'T': None, 'U': None, 'tau': '0'},
                                       {'T': float, 'U': float, 'tau': tau_list})
        self.assertEqual(config['T'], 2e6)
        self.assertEqual(config['U'], 50.0)
        self.assertEqual(config['tau'], [0.0])
        self.assertTrue(config.strict)
        self.assertEqual(config.sources['T'], 'config')
        self.assertEqual(config.sources['U'], 'flag')
        self.assertFalse(config.overridden('tau'))

    def test_unknown_keys_warn(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.env'
            path.write_text('T=2000000\nSPEED=fast\n')
            with self.assertLogs('zeta_census.services.run_config', 'WARNING'):
                RunConfig.resolve('gram_count', {'config': str(path)}, {'T': None})

    def test_missing_file_and_values(self):
        with self.assertRaises(ValidationError):
            RunConfig.resolve('gram_count', {'config': '/nonexistent/run.env'}, {'T': None})
        config = RunConfig.resolve('gram_count', {}, {'T': None})
        with self.assertRaises(ValidationError):
            config.require('T')


class CommandTests(SimpleTestCase):
    def setUp(self):
        cache.clear()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_gram_points(self):
        rows = list(csv.DictReader(io.StringIO(run('gram', '--nu', '1000000', '--count', '3'))))
        self.assertEqual(len(rows), 3)
        self.assertEqual(float(rows[0]['t']), gram_point(10 ** 6).t)
        self.assertEqual([int(r['nu']) for r in rows], [10 ** 6, 10 ** 6 + 1, 10 ** 6 + 2])

    def test_one_file_per_shift(self):
        out = self.dir / 'points.csv'
        run('gram', '--nu', '5000', '--tau', '0', 'pi/2', '--out', str(out))
        self.assertTrue((self.dir / 'points_tau+0.000000.csv').exists())
        self.assertTrue((self.dir / 'points_tau+1.570796.csv').exists())

    def test_domain_error_exit_code(self):
        out = self.dir / 'points.csv'
        with self.assertRaises(CommandError) as ctx:
            run('gram', '--nu', '5000', '--tau', '4', '--out', str(out))
        self.assertEqual(ctx.exception.returncode, 2)
        record = json.loads((self.dir / 'points.csv.error.json').read_text())
        self.assertEqual(record['kind'], 'domain')
        self.assertEqual(record['command'], 'gram')

    def test_missing_option_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            run('gram_count', '--T', '1e6')
        self.assertEqual(ctx.exception.returncode, 2)

    @override_settings(GRAMGRID_CHUNK_SIZE=0)
    def test_bad_chunk_setting_exits_with_a_record(self):
        out = self.dir / 'zeros.csv'
        with self.assertRaises(CommandError) as ctx:
            run('zero_count', '--T', '1e6', '--U', '10', '--out', str(out))
        self.assertEqual(ctx.exception.returncode, 2)
        record = json.loads((self.dir / 'zeros.csv.error.json').read_text())
        self.assertEqual(record['kind'], 'validation')

    def test_zeval(self):
        rs, em = run_json('zeval', '--t', '500', '--engine', 'both', '--digits', '20')
        self.assertEqual((rs['engine'], em['engine']), ('rs', 'em'))
        self.assertLessEqual(abs(rs['z'] - float(em['z'])), rs['err'])
        with self.assertRaises(CommandError) as ctx:
            run('zeval', '--t', '100', '--engine', 'rs')
        self.assertEqual(ctx.exception.returncode, 2)

    @override_settings(GRAMGRID_STRICT=False)
    def test_gram_count(self):
        [row] = run_json('gram_count', '--T', '1e6', '--U', '1000')
        self.assertEqual(row['exact'], exact_gram_count(1e6, 1000.0))
        self.assertLessEqual(abs(row['ratio_2pi'] - 1.0), 0.01)
        self.assertFalse(row['strict'])
        self.assertEqual(row['overrides'], {})
        self.assertEqual(set(row['anchors']), {'main_term', 'main_term_2pi'})
        self.assertEqual(row['engine_version'], __version__)

    def test_config_file(self):
        path = self.dir / 'count.env'
        path.write_text('T=1000000\nU=1000\n')
        [row] = run_json('gram_count', '--config', str(path), '--U', '500')
        self.assertEqual((row['T'], row['U']), (1e6, 500.0))

    def test_zero_count_carries_verdicts(self):
        [row] = run_json('zero_count', '--T', '1e6', '--U', '10')
        self.assertEqual(row['kind'], 'zero_count')
        verdicts = row['extra']['verdicts']
        self.assertEqual(set(verdicts), {'zero_count_main_term', 'zero_count_main_term_2pi'})

    def test_budget_window(self):
        [row] = run_json('budget_window', '--T', '1e6', '--epsilon', '0.1')
        self.assertAlmostEqual(row['a1'], 100.0 / math.pi)
        self.assertTrue(row['consistency']['lower_ok'])

    def test_exp_sums(self):
        rows = run_json('exp_sums', '--T', '1e4', '--U', '5', '--k', '0', '--l', '0', '1')
        self.assertEqual([(r['k'], r['l']) for r in rows], [(0, 0), (0, 1)])
        self.assertTrue(all(r['strict'] for r in run_json(
            'exp_sums', '--T', '1e4', '--U', '5', '--k', '0', '--l', '0', '--strict')))
        self.assertEqual(set(rows[0]['anchors']), {'S1', 'S2'})
        self.assertEqual(rows[0]['overrides'], {})

    def test_report_merge(self):
        left = write_reports([zero_report(1e6, 100.0, hits=188)], self.dir / 'a.csv')
        right = write_reports([zero_report(1e6 + 100.0, 100.0, hits=192)], self.dir / 'b.csv')
        [row] = run_json('report_merge', '--inputs', str(left), str(right))
        self.assertEqual((row['hits'], row['U']), (380, 200.0))
        self.assertIn('zero_count_main_term', row['extra']['verdicts'])
