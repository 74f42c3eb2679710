import json

import numpy as np

from metric_currents.exceptions import CommandError
from metric_currents.jacobian import JacobianKind, jacobian
from metric_currents.management.base import BaseCommand, format_value
from metric_currents.seminorm import AmbientNorm, Seminorm


class Command(BaseCommand):
    help = 'Jacobian of the seminorm v -> norm(A v); A defaults to the identity.'

    def add_arguments(self, parser):
        parser.add_argument('--norm', default='l2', help='Ambient norm tag: l2, linf or l1.')
        parser.add_argument('--dim', type=int, default=2, help='Dimension of the ambient space.')
        parser.add_argument('--kind', default='mstar', help='Jacobian kind: b, mstar, ir or ak.')
        parser.add_argument('--matrix', help='JSON list of rows of A (dim rows).')

    def handle(self, **options):
        try:
            ambient = AmbientNorm.parse(options['norm'], options['dim'])
            kind = JacobianKind.parse(options['kind'])
            matrix = np.eye(options['dim']) if options['matrix'] is None else np.array(json.loads(options['matrix']))
            sigma = Seminorm(np.atleast_2d(matrix), ambient)
        except ValueError as e:
            raise CommandError(str(e))
        self.stdout.write(format_value(jacobian(sigma, kind, rng=self.config.rng())))
