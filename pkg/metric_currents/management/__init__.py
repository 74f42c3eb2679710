import os
import pkgutil

COMMANDS_DIR = os.path.join(os.path.dirname(__file__), 'commands')


def find_commands():
    """
    Names of the subcommand modules; `verify_all` is invoked as `verify-all`.
    """
    return sorted(name.replace('_', '-') for _, name, is_pkg in pkgutil.iter_modules([COMMANDS_DIR])
                  if not is_pkg and not name.startswith('_'))
