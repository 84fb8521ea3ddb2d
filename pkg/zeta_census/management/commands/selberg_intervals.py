from ._base import GramGridCommand
from ...services.census import census_service
from ...services.psi import PsiFunction


class Command(GramGridCommand):
    help = 'Measure of t in [T, T + span] whose interval (t, t + psi(t)/ln t) holds an odd-order zero'

    defaults = {'T': None, 'epsilon': 0.1, 'psi': 'powlog:0.5:1', 'grid_step': 0.05,
                'span_override': None, 'scan_step': None}
    casts = {'T': float, 'epsilon': float, 'psi': str, 'grid_step': float,
             'span_override': float, 'scan_step': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float, help='Window start')
        parser.add_argument('--epsilon', type=float, help='Span exponent: span = T^(1/2+eps)')
        parser.add_argument('--psi', help='psi specification (default powlog:0.5:1)')
        parser.add_argument('--grid-step', type=float, dest='grid_step')
        parser.add_argument('--span-override', type=float, dest='span_override')
        parser.add_argument('--scan-step', type=float, dest='scan_step')

    def run(self, config):
        config.require('T')
        report = census_service.selberg_interval_census(
            config['T'], config['epsilon'], PsiFunction.parse(config['psi']),
            config['grid_step'], span_override=config['span_override'],
            scan_step=config['scan_step'], workers=config.workers, strict=config.strict,
        )
        return {'': [report]}
