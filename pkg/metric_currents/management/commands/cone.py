from metric_currents.cone import cone_boundary_masses, cone_over_circle, cone_report
from metric_currents.exceptions import CommandError
from metric_currents.management.base import BaseCommand, format_value, load_current_file


class Command(BaseCommand):
    help = 'Masses of the cone over a current.'

    def add_arguments(self, parser):
        parser.add_argument('--current', help='Base current JSON file.')
        parser.add_argument('--report', action='store_true',
                            help='Print base mass, cone mass and ratio per Jacobian kind.')
        parser.add_argument('--demo', choices=['circle'], help='Built in example.')
        parser.add_argument('--m', type=int, default=64, help='Vertices of the polygonal circle.')

    def handle(self, **options):
        if options['demo'] == 'circle':
            result = cone_over_circle(options['m'], rng=self.config.rng())
            if options['report']:
                self.emit(result)
            else:
                self.stdout.write(format_value(result['ratio']))
            return
        if not options['current']:
            raise CommandError("Either --current or --demo is required")
        T = load_current_file(options['current'])
        report = cone_report(T)
        if options['report']:
            report['boundary'] = cone_boundary_masses(T)
            self.emit(report)
        else:
            self.stdout.write(format_value(report['ir']['ratio']))
