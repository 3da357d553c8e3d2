# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""Custom exceptions raised by the :mod:`higgs_flow_lab` modules."""


class HiggsLabError(Exception):

    """Base class for exceptions raised by :mod:`higgs_flow_lab`."""


class ConfigurationError(HiggsLabError):

    """Raised by :mod:`higgs_flow_lab.config` when an experiment configuration is invalid."""


class SolverError(HiggsLabError):

    """Base class for numerical failures (the command line interface exits with status 3)."""


class ConvergenceError(SolverError):

    """
    Raised when an iterative solver doesn't converge.

    The :attr:`history` attribute holds the residual history (a list of
    floats, possibly truncated to its last entries).
    """

    def __init__(self, message, history=None):
        """
        Initialize a :class:`ConvergenceError` object.

        :param message: The error message (a string).
        :param history: The residual history (a list of floats).
        """
        super(ConvergenceError, self).__init__(message)
        self.history = list(history or [])


class IncompatibleSourceError(SolverError):

    """Raised by :mod:`higgs_flow_lab.poisson` when a source doesn't have mean zero where it must."""


class FlowAbortedError(SolverError):

    """
    Raised by :mod:`higgs_flow_lab.flow` when the time step drops below its minimum.

    The :attr:`diagnostics` attribute holds a dictionary with the state at the
    moment the flow was aborted.
    """

    def __init__(self, message, diagnostics=None):
        """
        Initialize a :class:`FlowAbortedError` object.

        :param message: The error message (a string).
        :param diagnostics: A dictionary with diagnostic values.
        """
        super(FlowAbortedError, self).__init__(message)
        self.diagnostics = dict(diagnostics or {})


class EmptyDomainError(SolverError):

    """Raised by :func:`~higgs_flow_lab.geometry.exhaustion_domain()` when no interior nodes remain."""


class NotPositiveDefiniteError(SolverError):

    """
    Raised when a metric field isn't positive definite.

    The :attr:`node` attribute holds the grid index of the first offending node.
    """

    def __init__(self, message, node=None):
        """
        Initialize a :class:`NotPositiveDefiniteError` object.

        :param message: The error message (a string).
        :param node: The offending grid index (a tuple of integers).
        """
        super(NotPositiveDefiniteError, self).__init__(message)
        self.node = node


class NotHermitianError(SolverError):

    """Raised when a field that should be Hermitian isn't (beyond tolerance)."""


class InvalidCandidateError(HiggsLabError):

    """Raised by :mod:`higgs_flow_lab.analysis` when a candidate isn't an orthogonal projector of constant rank."""


class BoundaryConditionError(HiggsLabError):

    """Raised when a metric violates the Dirichlet data of an exhaustion domain."""


class RankMismatchError(HiggsLabError):

    """Raised when two fields of different bundle rank are combined."""


class NonFiniteCurvatureError(SolverError):

    """Raised when a curvature field contains NaN or infinite values."""
