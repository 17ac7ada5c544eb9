"""Exception types shared across the toolkit."""


class SvdynError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SvdynError, ValueError):
    """An argument lies outside an operation's domain."""


class AdjacencyError(DomainError):
    """A point violates the orbit adjacency relation."""


class PreconditionError(SvdynError):
    """A named precondition of an operation does not hold."""

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        msg = predicate if not detail else f"{predicate}: {detail}"
        super().__init__(msg)


class ConstructionError(SvdynError):
    """Inputs cannot be assembled into a valid object."""


class ResourceGuardError(SvdynError):
    """An exact engine refused an input exceeding its size guard."""


class ConsistencyError(SvdynError):
    """A bound certified by construction failed to re-validate."""
