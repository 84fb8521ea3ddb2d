from ._base import GramGridCommand, tau_suffix
from ...exceptions import ValidationError
from ...services.census import census_service
from ...services.run_config import tau_list

KINDS = ('bounded', 'windowed')


class Command(GramGridCommand):
    help = ('Non-intersecting good segments: bounded (k <= delta ln T, against U) '
            'or windowed (k <= budget, against U ln T)')

    defaults = {'kind': 'bounded', 'T': None, 'U': None, 'delta': 1.5, 'tau': '0',
                'budget': None, 'epsilon': 0.1}
    casts = {'kind': str, 'T': float, 'U': float, 'delta': float, 'tau': tau_list,
             'budget': int, 'epsilon': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', choices=KINDS)
        parser.add_argument('--T', type=float)
        parser.add_argument('--U', type=float)
        parser.add_argument('--delta', type=float, help='bounded: search k <= floor(delta ln T)')
        parser.add_argument('--tau', nargs='+')
        parser.add_argument('--budget', type=int,
                            help='windowed: per-point budget; scanned over its window when absent')
        parser.add_argument('--epsilon', type=float, help='windowed: budget window parameter')

    def run(self, config):
        config.require('T', 'U')
        kind = config['kind']
        if kind not in KINDS:
            raise ValidationError(f"Unknown good-segment kind '{kind}'")
        taus = config['tau']
        groups = {}
        for tau in taus:
            if kind == 'bounded':
                report = census_service.good_segments_bounded(
                    config['T'], config['U'], config['delta'], tau=tau,
                    workers=config.workers, strict=config.strict,
                )
            else:
                report = census_service.good_segments_windowed(
                    config['T'], config['U'], tau=tau, budget=config['budget'],
                    epsilon=config['epsilon'], workers=config.workers, strict=config.strict,
                )
            groups[tau_suffix(taus, tau)] = [report]
        return groups
