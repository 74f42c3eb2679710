"""
Numerical settings and per-run configuration.

Module level constants are the library defaults. A `RunConfig` carries the
seed, tolerance overrides, output directory and subcommand parameters of a
single command line run.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

logger = logging.getLogger(__name__)

# Gram determinant threshold, relative to (max edge length)^(2k).
DEGENERACY_TOLERANCE = 1e-20
# Vertices closer than this are identified.
SNAP_TOLERANCE = 1e-9
# Relative tolerance for levels hitting vertex images.
LEVEL_TOLERANCE = 1e-12
# Duality gap at which the John ellipsoid barrier method stops.
JOHN_TOLERANCE = 1e-11
JOHN_MAX_ITERATIONS = 2000
MASS_STAR_RESTARTS = 16
# Largest number of k-subsets of facet rows enumerated exactly for mass*.
MASS_STAR_MAX_SUBSETS = 10 ** 6
MONTE_CARLO_SAMPLES = 200000
LP_MAX_CELLS = 10 ** 4
LP_MAX_ITERATIONS = 10 ** 5
# Consecutive degenerate pivots before the simplex method switches to Bland's rule.
LP_DEGENERATE_STREAK = 50
LP_TOLERANCE = 1e-9
MAX_REGION_HALFSPACES = 32
MESH_TOLERANCE = 1e-9

GMT_THREADS = max(1, int(os.environ.get('GMT_THREADS', '1') or 1))

# Command line tolerance names and the settings they override.
TOLERANCES = {
    'degeneracy': 'DEGENERACY_TOLERANCE',
    'snap': 'SNAP_TOLERANCE',
    'level': 'LEVEL_TOLERANCE',
    'john': 'JOHN_TOLERANCE',
    'lp': 'LP_TOLERANCE',
    'mesh': 'MESH_TOLERANCE',
}


def parallel_map(func, items, threads=None):
    """
    Map `func` over `items`, using up to `threads` worker threads.

    Args:
        func (callable): Pure function of one argument.
        items (iterable): Inputs.
        threads (int, optional): Thread cap. Defaults to `GMT_THREADS`.

    Returns:
        (list) Results in input order.
    """
    items = list(items)
    threads = GMT_THREADS if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


class RunConfig(object):
    """
    Configuration of a single run.
    """
    def __init__(self, seed=0, tolerances=None, output_dir='.', params=None):
        """
        Args:
            seed (int): Seed of the only random generator of the run.
            tolerances (dict, optional): Overrides keyed by names of `TOLERANCES`.
            output_dir (str): Directory receiving artifacts.
            params (dict, optional): Subcommand parameters.
        """
        self.seed = int(seed)
        self.tolerances = dict(tolerances or {})
        for name, value in self.tolerances.items():
            if name not in TOLERANCES:
                raise ValueError("Unknown tolerance %r" % name)
            if not float(value) > 0.0:
                raise ValueError("Tolerance %s must be positive, got %r" % (name, value))
        self.output_dir = output_dir
        self.params = dict(params or {})
        self._rng = None

    def tolerance(self, name):
        if name not in TOLERANCES:
            raise ValueError("Unknown tolerance %r" % name)
        return float(self.tolerances.get(name, globals()[TOLERANCES[name]]))

    @contextmanager
    def override(self):
        """
        Install the tolerance overrides as module settings for the duration of
        the block, restoring the previous values on exit.
        """
        settings = globals()
        saved = {}
        try:
            for name, value in self.tolerances.items():
                setting = TOLERANCES[name]
                saved[setting] = settings[setting]
                settings[setting] = float(value)
                logger.debug('Overriding %s with %r', setting, value)
            yield self
        finally:
            settings.update(saved)

    def rng(self):
        """
        Returns:
            (numpy.random.Generator) The run generator, created on first use.
        """
        if self._rng is None:
            self._rng = np.random.default_rng(self.seed)
        return self._rng

    def output_path(self, name):
        if not os.path.isdir(self.output_dir):
            os.makedirs(self.output_dir)
        return os.path.join(self.output_dir, name)

    @staticmethod
    def parse_tolerances(pairs):
        """
        Parse `NAME=VALUE` strings given on the command line.
        """
        tolerances = {}
        for pair in pairs or ():
            name, sep, value = pair.partition('=')
            if not sep:
                raise ValueError("Expected NAME=VALUE, got %r" % pair)
            tolerances[name.strip()] = float(value)
        return tolerances
