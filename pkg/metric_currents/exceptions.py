"""
Errors raised by `metric_currents`.

Every error carries enough context to be reported as diagnostic JSON by the
command line interface, see `MetricCurrentsError.as_dict`.
"""


class MetricCurrentsError(Exception):
    """
    Base class for all numerical and structural failures of the library.
    """
    def __init__(self, message, **context):
        super(MetricCurrentsError, self).__init__(message)
        self.message = message
        self.context = context

    def as_dict(self):
        data = {'error': self.__class__.__name__, 'message': self.message}
        for key, value in self.context.items():
            data[key] = _plain(value)
        return data


def _plain(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return repr(value)


class DegenerateSimplexError(MetricCurrentsError):
    pass


class UnboundedPolytope(MetricCurrentsError):
    pass


class UnboundedBall(MetricCurrentsError):
    pass


class Unsupported(MetricCurrentsError):
    pass


class ConvergenceError(MetricCurrentsError):
    """
    Iterative solver stopped at its iteration cap.

    Attributes:
        best: Best iterate found so far.
        gap: Estimate of the remaining optimality gap.
    """
    def __init__(self, message, best=None, gap=None, **context):
        super(ConvergenceError, self).__init__(message, gap=gap, **context)
        self.best = best
        self.gap = gap


class RefinementRequired(MetricCurrentsError):
    pass


class RefinementError(MetricCurrentsError):
    """
    Inputs do not admit a common refinement; `pair` names the offending cells.
    """
    def __init__(self, message, pair=None, **context):
        super(RefinementError, self).__init__(message, pair=pair, **context)
        self.pair = pair


class DegenerateLevel(MetricCurrentsError):
    pass


class NotLipschitz(MetricCurrentsError):
    """
    Data violates a Lipschitz bound; `pair` holds the indices of the violating points.
    """
    def __init__(self, message, pair=None, **context):
        super(NotLipschitz, self).__init__(message, pair=pair, **context)
        self.pair = pair


class BoundaryConditionError(MetricCurrentsError):
    def __init__(self, message, pair=None, **context):
        super(BoundaryConditionError, self).__init__(message, pair=pair, **context)
        self.pair = pair


class DecompositionError(MetricCurrentsError):
    pass


class GraphError(MetricCurrentsError):
    """
    Raised by `CurrentGraph.build_graph` when an edge references a missing node.
    """
    def __init__(self, message, node=None):
        super(GraphError, self).__init__(message, node=node)
        self.node = node


class SizeLimitExceeded(MetricCurrentsError):
    pass


class CommandError(MetricCurrentsError):
    """
    Invalid command line input; reported with the usage text and exit code 2.
    """
    pass
