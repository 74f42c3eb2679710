import json

from metric_currents.current import boundary, square_current
from metric_currents.exceptions import CommandError
from metric_currents.flatnorm import UPPER_BOUND_NOTE, build_complex, flat_norm
from metric_currents.management.base import BaseCommand, format_value, read_file
from metric_currents.serializers import chain_from_dict, chain_to_dict, complex_from_dict


class Command(BaseCommand):
    help = 'Simplicial flat norm of a chain in a complex.'

    def add_arguments(self, parser):
        parser.add_argument('--complex', help='Complex JSON file.')
        parser.add_argument('--chain', help='Chain JSON file.')
        parser.add_argument('--jacobian', default='mstar', help='Jacobian kind of the cell weights.')
        parser.add_argument('--solver', choices=['simplex', 'highs'], default='simplex')
        parser.add_argument('--demo', choices=['square-boundary'], help='Built in example.')
        parser.add_argument('--side', type=float, default=1.0, help='Side of the demo square.')

    def handle(self, **options):
        if options['demo'] == 'square-boundary':
            T = square_current(options['side'])
            K, (_, cycle) = build_complex([T, boundary(T)])
            result = flat_norm(cycle, K, options['jacobian'], options['solver'])
            self.stdout.write(format_value(result.value))
            return
        if not options['complex'] or not options['chain']:
            raise CommandError("--complex and --chain are required without --demo")
        try:
            K = complex_from_dict(json.loads(read_file(options['complex'])))
            t = chain_from_dict(json.loads(read_file(options['chain'])), K)
        except (ValueError, KeyError) as e:
            raise CommandError("Invalid input: %s" % e)
        result = flat_norm(t, K, options['jacobian'], options['solver'])
        report = result.as_dict()
        report['u'] = chain_to_dict(result.u)
        report['v'] = chain_to_dict(result.v)
        report['note'] = UPPER_BOUND_NOTE
        self.emit(report)
