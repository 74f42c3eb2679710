"""
Command line entry point: `metric-currents <subcommand> [options]`.
"""
import json
import logging
import sys
from importlib import import_module

from metric_currents import __version__
from metric_currents.exceptions import CommandError, MetricCurrentsError
from metric_currents.management import find_commands

logger = logging.getLogger(__name__)

PROG = 'metric-currents'


def usage():
    lines = ["usage: %s <subcommand> [options]" % PROG, "", "Available subcommands:"]
    lines.extend("    %s" % name for name in find_commands())
    return '\n'.join(lines)


def load_command_class(name):
    """
    Import the Command class of a subcommand; `verify-all` lives in `verify_all`.

    Raises:
        CommandError: for an unknown subcommand.
    """
    if name not in find_commands():
        raise CommandError("Unknown subcommand %r" % name)
    module = import_module('metric_currents.management.commands.%s' % name.replace('-', '_'))
    return module.Command


def run(argv=None, stdout=None, stderr=None):
    """
    Run one subcommand.

    Returns:
        (int) 0 on success, 1 on a numerical failure (diagnostic JSON on
        stdout), 2 on a usage error (usage text on stderr).
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] in ('-h', '--help', 'help'):
        stdout.write(usage() + '\n')
        return 0 if argv else 2
    if argv[0] == '--version':
        stdout.write('%s\n' % __version__)
        return 0
    subcommand = argv[0]
    try:
        command = load_command_class(subcommand)(stdout=stdout, stderr=stderr)
        code = command.run_from_argv(PROG, subcommand, argv[1:])
    except CommandError as e:
        stderr.write("%s\n" % e.message)
        stderr.write("%s\n" % e.context.get('usage', usage()))
        return 2
    except MetricCurrentsError as e:
        logger.debug("Numerical failure in %s", subcommand, exc_info=True)
        stdout.write(json.dumps(e.as_dict(), sort_keys=True) + '\n')
        return 1
    except ValueError as e:
        stderr.write("%s: %s\n" % (subcommand, e))
        return 2
    except SystemExit as e:
        # argparse exits after printing --help.
        return e.code if isinstance(e.code, int) else 0
    return code or 0


def main():
    sys.exit(run())
