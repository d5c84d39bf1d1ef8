"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`HybridSomError`; the CLI prints ``<ClassName>: <message>`` and exits 1.
"""


class HybridSomError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HybridSomError, ValueError):
    pass


# ingest
class MalformedRow(HybridSomError, ValueError):
    pass


class BadTimestamp(HybridSomError, ValueError):
    pass


class NegativeConsumption(HybridSomError, ValueError):
    pass


class NonFiniteValue(HybridSomError, ValueError):
    pass


class NoRequestedMonths(HybridSomError, ValueError):
    pass


class InvalidArchetypeCount(HybridSomError, ValueError):
    pass


class BadMonthSpec(HybridSomError, ValueError):
    pass


# preprocess
class EmptyMatrix(HybridSomError, ValueError):
    pass


# som
class EmptyData(HybridSomError, ValueError):
    pass


class InvalidConfig(HybridSomError, ValueError):
    pass


class AllNodesEmpty(HybridSomError, RuntimeError):
    pass


# pca
class TooFewRows(HybridSomError, ValueError):
    pass


class BadComponentCount(HybridSomError, ValueError):
    pass


# kmeans
class TooFewPoints(HybridSomError, ValueError):
    pass


class LabelOutOfRange(HybridSomError, ValueError):
    pass


# evaluate
class InsufficientClusters(HybridSomError, ValueError):
    pass


class DegenerateClustering(HybridSomError, ValueError):
    pass


class BadRange(HybridSomError, ValueError):
    pass


class NoFeasibleK(HybridSomError, ValueError):
    """Every k in the sweep range was skipped."""


class LengthMismatch(HybridSomError, ValueError):
    pass


# pipeline
class NoUsableSeries(HybridSomError, ValueError):
    pass


class TooFewCenters(HybridSomError, ValueError):
    pass


class IoFailure(HybridSomError, OSError):
    pass


class VersionMismatch(HybridSomError, ValueError):
    pass


class CorruptFile(HybridSomError, ValueError):
    pass
