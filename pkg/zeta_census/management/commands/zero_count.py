from ._base import GramGridCommand
from ...services.census import census_service


class Command(GramGridCommand):
    help = 'Certified odd-order zeros in [T, T+U] against (1/2pi) U ln T'

    defaults = {'T': None, 'U': None, 'scan_step': None}
    casts = {'T': float, 'U': float, 'scan_step': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float)
        parser.add_argument('--U', type=float)
        parser.add_argument('--scan-step', type=float, dest='scan_step',
                            help='Lattice step, at most omega(T)/2 (default omega/4)')

    def run(self, config):
        config.require('T', 'U')
        report = census_service.zero_count_increment(
            config['T'], config['U'], scan_step=config['scan_step'], workers=config.workers,
        )
        return {'': [report]}
