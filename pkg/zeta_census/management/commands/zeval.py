import mpmath

from ._base import GramGridCommand
from ...services.hardy_z import SignSample, hardy_z_service
from ...services.run_config import float_list


class Command(GramGridCommand):
    help = 'Evaluate Hardy Z(t) with the Riemann-Siegel engine, the Euler-Maclaurin oracle, or both'

    defaults = {'t': None, 'engine': 'rs', 'digits': 30}
    casts = {'t': float_list, 'engine': str, 'digits': int}

    def add_command_arguments(self, parser):
        parser.add_argument('--t', nargs='+', type=float, help='Abscissae')
        parser.add_argument('--engine', choices=['rs', 'em', 'both'])
        parser.add_argument('--digits', type=int, help='Oracle precision in digits (15-60)')

    def run(self, config):
        config.require('t')
        engine = config['engine']
        rows = []
        for t in config['t']:
            if engine in ('rs', 'both'):
                z, err = hardy_z_service.z_rs(t)
                sample = SignSample.classify(t, z, err)
                rows.append({'t': t, 'engine': 'rs', 'z': z, 'err': err,
                             'sign': sample.sign.value, 'digits': None})
            if engine in ('em', 'both'):
                digits = config['digits']
                z = hardy_z_service.z_em(t, digits)
                err = 10.0 ** (-digits + 2)
                sample = SignSample.classify(t, float(z), err)
                rows.append({'t': t, 'engine': 'em', 'z': mpmath.nstr(z, digits), 'err': err,
                             'sign': sample.sign.value, 'digits': digits})
        return {'': rows}
