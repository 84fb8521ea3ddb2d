from ._base import GramGridCommand, tau_suffix
from ...services.exp_sums import exp_sums
from ...services.run_config import int_list, tau_list


class Command(GramGridCommand):
    help = 'Direct evaluation of the difference and product lattice sums (T <= 1e5)'

    defaults = {'T': None, 'U': None, 'tau': '0', 'k': '0,1,2', 'l': '0,1,2', 'M': None}
    casts = {'T': float, 'U': float, 'tau': tau_list, 'k': int_list, 'l': int_list, 'M': int}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float)
        parser.add_argument('--U', type=float)
        parser.add_argument('--tau', nargs='+')
        parser.add_argument('--k', nargs='+', type=int, help='Phase shifts k (default 0 1 2)')
        parser.add_argument('--l', nargs='+', type=int, help='Phase shifts l (default 0 1 2)')
        parser.add_argument('--M', type=int, help='Normalising sample count (default max(k, l, 1))')

    def run(self, config):
        config.require('T', 'U')
        taus = config['tau']
        return {
            tau_suffix(taus, tau): [
                exp_sums(config['T'], config['U'], tau, k, l, config['M'], strict=config.strict)
                for k in config['k'] for l in config['l']
            ]
            for tau in taus
        }
