"""Exception hierarchy shared by all flatcluster modules."""


class FlatClusterError(Exception):
    """Base class for all flatcluster errors."""


class InvalidInputError(FlatClusterError):
    """Malformed arguments: bad shapes, non-finite values, out-of-range sizes."""


class DegenerateFlatError(FlatClusterError):
    """A flat's direction vectors are linearly dependent, or an implicit
    system does not describe a flat."""


class ConfigurationError(FlatClusterError):
    """A generation config is unsatisfiable, e.g. sigma so large relative to
    the ball radius that the intersection event underflows."""


class DataFormatError(FlatClusterError):
    """A dataset or result file exists but its content cannot be decoded:
    bad JSON, missing fields, wrong vector lengths, unknown format version."""
