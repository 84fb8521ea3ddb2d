from dataclasses import asdict

from ._base import GramGridCommand, tau_suffix
from ...services.gram_points import gram_point
from ...services.run_config import tau_list


class Command(GramGridCommand):
    help = 'Solve translated Gram points g_nu(tau)'

    defaults = {'nu': None, 'count': 1, 'tau': '0'}
    casts = {'nu': int, 'count': int, 'tau': tau_list}

    def add_command_arguments(self, parser):
        parser.add_argument('--nu', type=int, help='First Gram index')
        parser.add_argument('--count', type=int, help='Number of consecutive indices (default 1)')
        parser.add_argument('--tau', nargs='+', help='Shift(s) in [-pi, pi], e.g. 0 pi/2 -pi')

    def run(self, config):
        config.require('nu')
        taus = config['tau']
        groups = {}
        for tau in taus:
            rows = [asdict(gram_point(nu, tau))
                    for nu in range(config['nu'], config['nu'] + max(1, config['count']))]
            groups[tau_suffix(taus, tau)] = rows
        return groups
