from metric_currents.exceptions import CommandError
from metric_currents.filling import candidate_corpus, candidate_from_mesh, ell_infty_filling_bound
from metric_currents.management.base import BaseCommand, read_file
from metric_currents.mesh import ConvexBody
from metric_currents.serializers import read_off, write_csv

BODIES = {
    'square': ConvexBody.square,
    'hexagon': ConvexBody.hexagon,
}


class Command(BaseCommand):
    help = 'l_inf filling lower bound M(X) >= Vol(C) for candidate fillings of a convex body.'

    def add_arguments(self, parser):
        parser.add_argument('--body', choices=sorted(BODIES), default='square')
        parser.add_argument('--candidate', help='OFF mesh whose boundary lies over the boundary of the body.')
        parser.add_argument('--corpus', action='store_true', help='Run the built in candidate corpus.')
        parser.add_argument('--n', type=int, default=16, help='Mesh refinement of the corpus.')

    def handle(self, **options):
        rng = self.config.rng()
        if options['corpus']:
            reports = [ell_infty_filling_bound(c.body, c, rng=rng) for c in candidate_corpus(options['n'])]
            rows = [(r['candidate'], r['volume'], r['mass'], r['gap']) for r in reports]
            self.artifact('filling.csv', write_csv(['candidate', 'volume', 'mass', 'gap'], rows))
            self.emit(reports)
            return
        if not options['candidate']:
            raise CommandError("Either --candidate or --corpus is required")
        try:
            vertices, triangles = read_off(read_file(options['candidate']))
        except ValueError as e:
            raise CommandError("Invalid OFF file %s: %s" % (options['candidate'], e))
        body = BODIES[options['body']]()
        candidate = candidate_from_mesh(options['candidate'], body, vertices, triangles)
        self.emit(ell_infty_filling_bound(body, candidate, rng=rng))
