"""Exception types raised across the package."""


class UavschedError(Exception):
    """Base class for all package-specific errors."""


class InvalidInstance(UavschedError):
    """A replacement instance violates a structural invariant."""


class EmptyInstance(UavschedError):
    """Nothing to schedule: no flows and no retiring UAVs."""


class EndpointRetired(UavschedError):
    """A flow starts or ends at a retiring UAV (unsupported handover topology)."""


class InvalidSchedule(UavschedError):
    """A schedule is not a permutation of the instance's flow identifiers."""


class NonPositiveDistance(UavschedError):
    """Radio computations need a strictly positive distance."""


class Unreachable(UavschedError):
    """No path exists between the requested endpoints."""


class SamplingExhausted(UavschedError):
    """Scenario sampling gave up (network too sparse for the request)."""


class InstanceTooLarge(UavschedError):
    """Instance exceeds the size cap of an exhaustive solver."""


class DimensionMismatch(UavschedError):
    """Objects built for different instance sizes were combined."""


class InvalidOrder(UavschedError):
    """A relation matrix is not a strict total order."""


class IoFailure(UavschedError):
    """Writing or reading an artifact file failed."""


class TooFewSamples(UavschedError):
    """Sample statistics need at least two observations."""


class ConfigInvalid(UavschedError):
    """An experiment configuration is malformed."""
