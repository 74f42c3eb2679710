from metric_currents.exceptions import CommandError
from metric_currents.management.base import BaseCommand, load_current_file
from metric_currents.serializers import current_to_dict, dumps, write_csv
from metric_currents.slicing import slice, slice_mass_profile, verify_mass_fubini


class Command(BaseCommand):
    help = 'Slice a current by a coordinate function, or tabulate its slice masses.'

    def add_arguments(self, parser):
        parser.add_argument('--current', required=True, help='Current JSON file.')
        parser.add_argument('--axis', type=int, default=0, help='Coordinate to slice by.')
        parser.add_argument('--level', type=float, help='Level of the slice.')
        parser.add_argument('--fubini', action='store_true',
                            help='Print a CSV of (level, weight, slice mass) and write fubini.json.')
        parser.add_argument('--kind', default='mstar', help='Jacobian kind of the masses.')

    def handle(self, **options):
        T = load_current_file(options['current'])
        axis = options['axis']
        if not 0 <= axis < T.ambient.dim:
            raise CommandError("Axis %d out of range for R^%d" % (axis, T.ambient.dim))
        if options['fubini']:
            profile = slice_mass_profile(T, axis, options['kind'])
            self.stdout.write(write_csv(['level', 'weight', 'slice_mass'], profile), ending='')
            self.artifact('fubini.json', dumps(verify_mass_fubini(T, axis, options['kind'])) + "\n")
            return
        if options['level'] is None:
            raise CommandError("Either --level or --fubini is required")
        self.emit(current_to_dict(slice(T, axis, options['level'])))
