from ._base import GramGridCommand
from ...services.reports import merge_reports, read_reports


class Command(GramGridCommand):
    help = 'Merge census reports over disjoint parts of one window'

    defaults = {'inputs': None}

    def add_command_arguments(self, parser):
        parser.add_argument('--inputs', nargs='+', help='CSV or JSON census reports')

    def run(self, config):
        config.require('inputs')
        reports = [r for path in config['inputs'] for r in read_reports(path)]
        return {'': [merge_reports(reports)]}
