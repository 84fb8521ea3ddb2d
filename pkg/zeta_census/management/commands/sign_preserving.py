import math

from ._base import GramGridCommand, tau_suffix
from ...services.asymptotics import window_length
from ...services.census import census_service
from ...services.gram_points import GridSpec
from ...services.psi import ROLE_PSI_BAR, PsiFunction
from ...services.run_config import tau_list


class Command(GramGridCommand):
    help = 'Gram points whose samples Z(g + k*omega), k = 1..M, keep one sign'

    defaults = {'T': None, 'U_override': None, 'M': None, 'tau': '0',
                'psi': 'lnlnln', 'psi_bar': 'pow:psi:0.25'}
    casts = {'T': float, 'U_override': float, 'M': int, 'tau': tau_list,
             'psi': str, 'psi_bar': str}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float)
        parser.add_argument('--U-override', type=float, dest='U_override')
        parser.add_argument('--M', type=int,
                            help='Samples per Gram point (default floor(psi_bar(T) ln T / 2pi))')
        parser.add_argument('--tau', nargs='+')
        parser.add_argument('--psi')
        parser.add_argument('--psi-bar', dest='psi_bar')

    def run(self, config):
        config.require('T')
        T = config['T']
        psi = PsiFunction.parse(config['psi'])
        U = config['U_override'] or window_length(T, psi)
        M = config['M']
        if M is None:
            psi_bar = PsiFunction.parse(config['psi_bar'], role=ROLE_PSI_BAR, base=psi)
            M = max(1, math.floor(psi_bar(T) * math.log(T) / (2.0 * math.pi)))
        taus = config['tau']
        return {
            tau_suffix(taus, tau): [census_service.count_sign_preserving(
                GridSpec.build(T, U, M, tau), workers=config.workers,
                strict=config.strict, desk_window=config['U_override'] is not None,
            )]
            for tau in taus
        }
