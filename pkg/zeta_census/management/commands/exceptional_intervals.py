from ._base import GramGridCommand, tau_suffix
from ...services.census import census_service
from ...services.psi import PsiFunction
from ...services.run_config import tau_list


class Command(GramGridCommand):
    help = 'Selberg intervals (g, g + psi(g)/ln g) taken on the Gram lattice itself'

    defaults = {'T': None, 'epsilon': 0.1, 'psi': 'lnlnln', 'tau': '0',
                'span_override': None, 'scan_step': None}
    casts = {'T': float, 'epsilon': float, 'psi': str, 'tau': tau_list,
             'span_override': float, 'scan_step': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float, help='Window start')
        parser.add_argument('--epsilon', type=float, help='In (0, 0.1]')
        parser.add_argument('--psi', help='psi specification (default lnlnln)')
        parser.add_argument('--tau', nargs='+', help='Shift(s) in [-pi, pi]')
        parser.add_argument('--span-override', type=float, dest='span_override',
                            help='Desk-scale span instead of T^(1/2+eps) ln T')
        parser.add_argument('--scan-step', type=float, dest='scan_step')

    def run(self, config):
        config.require('T')
        psi = PsiFunction.parse(config['psi'])
        taus = config['tau']
        return {
            tau_suffix(taus, tau): [census_service.exceptional_interval_census(
                config['T'], config['epsilon'], psi, tau=tau,
                span_override=config['span_override'], scan_step=config['scan_step'],
                workers=config.workers, strict=config.strict,
            )]
            for tau in taus
        }
