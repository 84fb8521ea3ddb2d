from ._base import GramGridCommand
from ...services.asymptotics import karatsuba_window_length, segment_budget_window


class Command(GramGridCommand):
    help = 'Admissible segment budgets and step bounds at height T'

    defaults = {'T': None, 'epsilon': 0.1}
    casts = {'T': float, 'epsilon': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--T', type=float)
        parser.add_argument('--epsilon', type=float, help='In (0, 0.1]')

    def run(self, config):
        config.require('T')
        T, epsilon = config['T'], config['epsilon']
        window = segment_budget_window(T, epsilon)
        row = {
            'T': T, 'epsilon': epsilon, 'a1': window.a1, 'a2': window.a2,
            'xi': window.xi, 'P0': window.P0, 'omega': window.omega,
            'H_lower': window.H_bounds[0], 'H_upper': window.H_bounds[1],
            'budget_lower': window.budget_bounds[0], 'budget_upper': window.budget_bounds[1],
            'karatsuba_window': karatsuba_window_length(T, epsilon),
            'consistency': window.consistency,
        }
        return {'': [row]}
