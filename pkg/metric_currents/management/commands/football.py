from metric_currents.filling import football_flat_distance, make_flat_football
from metric_currents.management.base import BaseCommand
from metric_currents.serializers import write_csv, write_svg


class Command(BaseCommand):
    help = 'Flat football M_eps: area, collapse map and intrinsic distances across the slit.'

    def add_arguments(self, parser):
        parser.add_argument('--eps', type=float, default=0.05, help='Width of the strip.')
        parser.add_argument('--L', type=float, default=1.0, help='Length of the slit, in (0, 2).')
        parser.add_argument('--h', type=float, default=0.01, help='Mesh size.')
        parser.add_argument('--t', type=float, default=0.01, help='Height above the slit of the sample points.')
        parser.add_argument('--flat-distance', action='store_true',
                            help='Also bound the flat distance between the boundary and its collapse.')
        parser.add_argument('--svg', action='store_true', help='Write the collapsed boundary to football.svg.')

    def handle(self, **options):
        football = make_flat_football(options['eps'], options['L'], options['h'])
        report = football.report(options['t'])
        if options['flat_distance']:
            report['flat_distance'] = football_flat_distance(options['eps'], options['L'], options['h'])
        if options['svg']:
            self.artifact('football.svg', write_svg(football.collapsed_boundary()))
        self.artifact('football.csv', write_csv(['eps', 'area', 'edge_lipschitz', 'across_slit_distance'], [
            (report['eps'], report['area'], report['edge_lipschitz'], report['across_slit_distance'])]))
        self.emit(report)
