"""Exception hierarchy shared across the package.

Data problems (malformed files, duplicate samples, impossible splits) and
numerical problems (singular systems, undefined metrics) are kept on separate
branches so callers can map them to distinct process exit codes.
"""

from __future__ import annotations


class GGMarginError(Exception):
    """Base class for everything raised deliberately by this package."""


class DataError(GGMarginError):
    """Invalid or inconsistent input data."""


class DuplicateSampleError(DataError):
    """Two samples share identical feature vectors.

    Diametral-sphere adjacency is undefined for coincident points, so graph
    construction refuses them outright.
    """


class EmptyClassError(DataError):
    """An operation needs at least one sample of every class."""


class SplitError(DataError):
    """A requested cross-validation split cannot be honoured."""


class NumericalError(GGMarginError):
    """Numerical failure: singular system, non-finite values, and the like."""


class UndefinedMetricError(NumericalError):
    """A metric is undefined for the given inputs (e.g. one-class AUC)."""


class EmptySupportError(GGMarginError):
    """The graph has no edge joining samples of different classes."""


class UsageError(GGMarginError):
    """Bad command-line arguments or unreadable configuration."""
