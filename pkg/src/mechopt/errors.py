"""Exception hierarchy shared across the package."""


class MechoptError(Exception):
    """Base class for all expected failures raised by this package."""


class DegenerateGeometryError(MechoptError):
    """Geometry admits no unique solution (e.g. coincident circles)."""


class AssemblyError(MechoptError):
    """The linkage loop cannot be closed at the requested posture."""


class SingularityError(MechoptError):
    """Transmission singularity: the motor has no authority at this posture."""


class DesignBoundsError(MechoptError):
    """A design parameter lies outside the configured search box."""


class OptimizationError(MechoptError):
    """An optimizer cannot proceed (infeasible start, empty feasible set, ...)."""


class ConfigError(MechoptError):
    """A problem configuration file failed to parse or validate."""
