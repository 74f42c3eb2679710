from metric_currents.management.base import BaseCommand, load_current_file
from metric_currents.onedim import decompose_1current


class Command(BaseCommand):
    help = 'Decompose an integer 1-current into paths and loops.'

    def add_arguments(self, parser):
        parser.add_argument('--current', required=True, help='1-current JSON file.')

    def handle(self, **options):
        decomposition = decompose_1current(load_current_file(options['current']))
        report = decomposition.as_dict()
        report['verification'] = decomposition.verify()
        self.emit(report)
