from django.test import SimpleTestCase, override_settings

from zeta_census.exceptions import ValidationError
from zeta_census.services.workers import chunked, partition, resolve_workers, run_tasks


class PartitionTests(SimpleTestCase):
    def test_fixed_chunks(self):
        self.assertEqual(partition(0, 10, 4), [(0, 4), (4, 8), (8, 10)])
        self.assertEqual(partition(7, 8, 4), [(7, 8)])
        self.assertEqual(partition(5, 5, 3), [])
        for chunk in (-1, 0, 2.5):
            with self.assertRaises(ValidationError):
                partition(0, 10, chunk)

    @override_settings(GRAMGRID_CHUNK_SIZE=3)
    def test_default_chunk_from_settings(self):
        self.assertEqual(partition(0, 7), [(0, 3), (3, 6), (6, 7)])
        self.assertEqual(chunked(list('abcdefg')), [list('abc'), list('def'), ['g']])

    @override_settings(GRAMGRID_CHUNK_SIZE=0)
    def test_rejects_a_zero_chunk_setting(self):
        with self.assertRaises(ValidationError):
            partition(0, 7)


class RunTasksTests(SimpleTestCase):
    @override_settings(GRAMGRID_WORKERS=3)
    def test_worker_count(self):
        self.assertEqual(resolve_workers(), 3)
        self.assertEqual(resolve_workers(0), 1)
        self.assertEqual(resolve_workers(8), 8)

    def test_in_process_keeps_order(self):
        self.assertEqual(run_tasks(abs, [-3, 1, -2], workers=1), [3, 1, 2])
        self.assertEqual(run_tasks(abs, [], workers=4), [])
