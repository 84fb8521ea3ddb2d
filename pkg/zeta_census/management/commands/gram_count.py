from ._base import GramGridCommand
from ... import __version__
from ...services.asymptotics import (
    exact_gram_count, predicted_gram_count, theta_difference_count,
)
from ...services.run_config import tau_list

GRAM_COUNT_ANCHORS = {'main_term': '(1/pi) U ln T', 'main_term_2pi': '(1/pi) U ln(T/2pi)'}


class Command(GramGridCommand):
    help = 'Exact number of Gram points in [T, T+U] against (1/pi) U ln T'

    defaults = {'T': None, 'U': None, 'tau': '0'}
    casts = {'T': float, 'U': float, 'tau': tau_list}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float, help='Window start (>= 1e3)')
        parser.add_argument('--U', type=float, help='Window length')
        parser.add_argument('--tau', nargs='+', help='Shift(s) in [-pi, pi]')

    def run(self, config):
        config.require('T', 'U')
        T, U = config['T'], config['U']
        rows = []
        for tau in config['tau']:
            exact = exact_gram_count(T, U, tau)
            predicted = predicted_gram_count(T, U)
            predicted_2pi = predicted_gram_count(T, U, 'ln_T_2pi')
            rows.append({
                'T': T, 'U': U, 'tau': tau, 'exact': exact,
                'theta_difference': theta_difference_count(T, U, tau),
                'predicted_main_term': predicted,
                'predicted_main_term_2pi': predicted_2pi,
                'ratio': exact / predicted if predicted else None,
                'ratio_2pi': exact / predicted_2pi if predicted_2pi else None,
                'strict': config.strict, 'overrides': {},
                'anchors': GRAM_COUNT_ANCHORS, 'engine_version': __version__,
            })
        return {'': rows}
