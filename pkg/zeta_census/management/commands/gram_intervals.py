from ._base import GramGridCommand, tau_suffix
from ...services.asymptotics import window_length
from ...services.census import census_service
from ...services.psi import ROLE_PSI, ROLE_PSI_BAR, PsiFunction
from ...services.run_config import tau_list


class Command(GramGridCommand):
    help = ('Census of Gram intervals (g, g + psi_bar(g)) containing an odd-order zero, '
            'against (1/pi) U ln T')

    defaults = {'T': None, 'U_override': None, 'tau': '0', 'psi': 'lnlnln',
                'psi_bar': 'pow:psi:0.25', 'scan_step': None}
    casts = {'T': float, 'U_override': float, 'tau': tau_list, 'psi': str,
             'psi_bar': str, 'scan_step': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float, help='Window start')
        parser.add_argument('--U-override', type=float, dest='U_override',
                            help='Desk-scale window length instead of T^(5/12) psi ln^3 T')
        parser.add_argument('--tau', nargs='+', help='Shift(s) in [-pi, pi]')
        parser.add_argument('--psi', help='psi specification (default lnlnln)')
        parser.add_argument('--psi-bar', dest='psi_bar',
                            help='Interval length specification (default pow:psi:0.25)')
        parser.add_argument('--scan-step', type=float, dest='scan_step',
                            help='Zero scan step (default omega/4)')

    def run(self, config):
        config.require('T')
        T = config['T']
        psi = PsiFunction.parse(config['psi'], role=ROLE_PSI)
        psi_bar = PsiFunction.parse(config['psi_bar'], role=ROLE_PSI_BAR, base=psi)
        U = config['U_override'] or window_length(T, psi)
        step = config['scan_step'] or census_service.z_service.default_step(T)

        # One scan serves every shift: all intervals end before T + U + psi_bar(T + U)
        scan = census_service.zero_scan(T, T + U + psi_bar(T + U) + 3.0 * step, step,
                                        config.workers)
        taus = config['tau']
        groups = {}
        for tau in taus:
            report = census_service.gram_interval_census(
                T, psi, psi_bar, tau=tau, U_override=config['U_override'],
                scan_step=step, workers=config.workers, scan=scan, strict=config.strict,
            )
            groups[tau_suffix(taus, tau)] = [report]
        return groups
