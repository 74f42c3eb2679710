"""
Small argparse based command framework in the shape of Django's management
commands: a command declares `add_arguments(parser)` and `handle(**options)`
and writes through `self.stdout` / `self.stderr`.
"""
import argparse
import json
import logging
import sys

from metric_currents.config import RunConfig
from metric_currents.exceptions import CommandError
from metric_currents.serializers import dumps, load_current

VERBOSITY_LEVELS = {
    0: logging.ERROR,
    1: logging.WARNING,
    2: logging.INFO,
    3: logging.DEBUG,
}


class OutputWrapper(object):
    """
    Wrapper around stdout/stderr that appends a newline to every write.
    """
    def __init__(self, out, ending='\n'):
        self._out = out
        self.ending = ending

    def write(self, msg='', ending=None):
        ending = self.ending if ending is None else ending
        if ending and not msg.endswith(ending):
            msg += ending
        self._out.write(msg)

    def flush(self):
        if hasattr(self._out, 'flush'):
            self._out.flush()


class CommandParser(argparse.ArgumentParser):
    """
    Parser raising CommandError instead of exiting, so that `run` decides
    the exit code.
    """
    def error(self, message):
        raise CommandError("%s: %s" % (self.prog, message), usage=self.format_usage())


class BaseCommand(object):
    help = ''

    def __init__(self, stdout=None, stderr=None):
        self.stdout = OutputWrapper(stdout or sys.stdout)
        self.stderr = OutputWrapper(stderr or sys.stderr)

    def create_parser(self, prog_name, subcommand):
        parser = CommandParser(prog='%s %s' % (prog_name, subcommand), description=self.help or None)
        parser.add_argument('--seed', type=int, default=0, help='Seed of the run generator.')
        parser.add_argument('--output-dir', default='.', help='Directory receiving artifacts.')
        parser.add_argument('--output', metavar='NAME',
                            help='Also write the indented JSON report to NAME in the output directory.')
        parser.add_argument('--tol', action='append', default=[], metavar='NAME=VALUE',
                            help='Tolerance override, repeatable.')
        parser.add_argument('-v', '--verbosity', type=int, choices=[0, 1, 2, 3], default=1,
                            help='Verbosity level; 0=minimal output, 3=debug logging.')
        self.add_arguments(parser)
        return parser

    def add_arguments(self, parser):
        """
        Entry point for subclassed commands to add custom arguments.
        """
        pass

    def run_from_argv(self, prog_name, subcommand, argv):
        parser = self.create_parser(prog_name, subcommand)
        options = vars(parser.parse_args(argv))
        logging.basicConfig(level=VERBOSITY_LEVELS[options['verbosity']],
                            format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
        try:
            tolerances = RunConfig.parse_tolerances(options.pop('tol'))
            self.config = RunConfig(seed=options['seed'], tolerances=tolerances,
                                    output_dir=options['output_dir'], params=options)
        except ValueError as e:
            raise CommandError(str(e))
        self.verbosity = options['verbosity']
        with self.config.override():
            return self.handle(**options)

    def handle(self, **options):
        """
        The actual logic of the command. Subclasses must implement this method.
        """
        raise NotImplementedError('subclasses of BaseCommand must provide a handle() method')

    def emit(self, data):
        """
        Print a report as one line of compact JSON with sorted keys; the
        indented document goes to --output when given.
        """
        self.stdout.write(json.dumps(data, sort_keys=True, separators=(',', ':')))
        if self.config.params.get('output'):
            self.artifact(self.config.params['output'], dumps(data) + '\n')

    def artifact(self, name, text):
        path = self.config.output_path(name)
        with open(path, 'w') as f:
            f.write(text)
        if self.verbosity >= 2:
            self.stderr.write("Wrote %s" % path)
        return path


def format_value(value):
    """
    Scalar summary printed by the commands, rounded to 12 decimals.
    """
    return repr(round(float(value), 12))


def read_file(path):
    try:
        with open(path) as f:
            return f.read()
    except IOError as e:
        raise CommandError("Cannot read %s: %s" % (path, e))


def load_current_file(path):
    try:
        return load_current(read_file(path))
    except ValueError as e:
        raise CommandError("Invalid current in %s: %s" % (path, e))
