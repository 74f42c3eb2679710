from metric_currents.current import mass
from metric_currents.exceptions import CommandError
from metric_currents.jacobian import JacobianKind
from metric_currents.management.base import BaseCommand, format_value, load_current_file
from metric_currents.serializers import write_csv


class Command(BaseCommand):
    help = 'Finsler mass of a polyhedral current.'

    def add_arguments(self, parser):
        parser.add_argument('--current', required=True, help='Current JSON file.')
        parser.add_argument('--kind', default='mstar', help='Jacobian kind: b, mstar, ir or ak.')
        parser.add_argument('--cells', action='store_true', help='Write the mass of every cell to mass.csv.')

    def handle(self, **options):
        T = load_current_file(options['current'])
        try:
            kind = JacobianKind.parse(options['kind'])
        except ValueError as e:
            raise CommandError(str(e))
        report = mass(T, kind, rng=self.config.rng())
        if options['cells']:
            self.artifact('mass.csv', write_csv(['cell', 'mass'], enumerate(report.per_cell)))
        self.stdout.write(format_value(report.total))
