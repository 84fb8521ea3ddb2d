from ._base import GramGridCommand, tau_suffix
from ...services.asymptotics import window_length
from ...services.census import census_service
from ...services.gram_points import GridSpec
from ...services.psi import PsiFunction
from ...services.run_config import tau_list


class Command(GramGridCommand):
    help = 'Second moments of Z sums along the sampling grid'

    defaults = {'T': None, 'U_override': None, 'M': None, 'tau': '0',
                'theta': 'both', 'psi': 'lnlnln'}
    casts = {'T': float, 'U_override': float, 'M': int, 'tau': tau_list,
             'theta': str, 'psi': str}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float)
        parser.add_argument('--U-override', type=float, dest='U_override')
        parser.add_argument('--M', type=int)
        parser.add_argument('--tau', nargs='+')
        parser.add_argument('--theta', choices=['theta1', 'theta_full', 'both'],
                            help='Phase used in the centred sum (default both)')
        parser.add_argument('--psi', help='Sets the default window length')

    def run(self, config):
        config.require('T', 'M')
        T = config['T']
        U = config['U_override'] or window_length(T, PsiFunction.parse(config['psi']))
        taus = config['tau']
        return {
            tau_suffix(taus, tau): census_service.moments(
                GridSpec.build(T, U, config['M'], tau), theta_variant=config['theta'],
                workers=config.workers, strict=config.strict,
                desk_window=config['U_override'] is not None,
            )
            for tau in taus
        }
