from metric_currents.filling import make_linfty_square, make_subspace_metric_witness
from metric_currents.management.base import BaseCommand

WITNESSES = {
    'linfty-square': make_linfty_square,
    'subspace-metric': make_subspace_metric_witness,
}


class Command(BaseCommand):
    help = 'Non-rigidity witnesses.'

    def add_arguments(self, parser):
        parser.add_argument('name', choices=sorted(WITNESSES))

    def handle(self, **options):
        self.emit(WITNESSES[options['name']]())
