from metric_currents.acceptance import CRITERIA, verify_all
from metric_currents.management.base import BaseCommand
from metric_currents.serializers import dumps


class Command(BaseCommand):
    help = 'Run the acceptance suite and write verify-all.json.'

    def add_arguments(self, parser):
        parser.add_argument('--quick', action='store_true', help='Smaller sample sizes.')
        parser.add_argument('--only', action='append', choices=list(CRITERIA),
                            help='Run only the named criterion, repeatable.')

    def handle(self, **options):
        report = verify_all(seed=self.config.seed, quick=options['quick'], only=options['only'])
        self.artifact('verify-all.json', dumps(report) + '\n')
        failed = [name for name, r in report['criteria'].items() if not r['passed']]
        if failed:
            self.stdout.write("FAILED: %s" % ', '.join(failed))
            return 1
        self.stdout.write("OK: %d criteria passed" % len(report['criteria']))
        return 0
