"""Exception hierarchy for the gossip flooding package.

Bad inputs raise ``ValueError`` subclasses and failures discovered while
running raise ``RuntimeError`` subclasses. Everything derives from
``GossipFloodingError`` so the command-line front door can report any of them
with a single ``except`` clause.
"""
from typing import Any, Optional


class GossipFloodingError(Exception):
    """Base class for every error raised by this package."""


class InvalidSizeError(GossipFloodingError, ValueError):
    """A site count, leaf count or index is outside its allowed range."""


class EmptyGraphError(GossipFloodingError, ValueError):
    """A graph ended up with no edges."""


class EdgeListParseError(GossipFloodingError, ValueError):
    """An edge-list document could not be parsed.

    Attributes:
        line_number: 1-based line of the offending input
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DisconnectedGraphError(GossipFloodingError, ValueError):
    """The process was asked to run on a graph that is not connected."""


class ScenarioError(GossipFloodingError, ValueError):
    """An initial scenario does not fit the graph it was applied to."""


class StopSpecError(GossipFloodingError, ValueError):
    """A stop request names targets or sites that do not exist."""


class QuantityMismatchError(GossipFloodingError, ValueError):
    """Two estimates of different quantities were combined."""


class ConfigError(GossipFloodingError, ValueError):
    """A configuration file or option is invalid."""


class StepCapExceededError(GossipFloodingError, RuntimeError):
    """A run hit its step cap before every requested time was observed.

    Attributes:
        record: The partial run record at the moment the cap was hit
        seed: Seed of the failing replication
    """

    def __init__(self, message: str, record: Any = None, seed: Optional[int] = None):
        super().__init__(message)
        self.record = record
        self.seed = seed


class OracleCapExceededError(GossipFloodingError, RuntimeError):
    """The exact oracle refused an instance that is too large.

    Attributes:
        states_reached: Number of configurations enumerated before giving up,
                        or None when the instance was rejected up front
    """

    def __init__(self, message: str, states_reached: Optional[int] = None):
        super().__init__(message)
        self.states_reached = states_reached


class UnreachableTargetError(GossipFloodingError, RuntimeError):
    """The oracle found a configuration from which the target can never hold."""
