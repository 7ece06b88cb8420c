"""Exception hierarchy."""


class CircBayesError(Exception):
    """Base class for all package errors."""


class DomainError(CircBayesError, ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedDirectionError(DomainError):
    """Mean direction requested for a zero resultant vector."""


class ConfigurationError(CircBayesError, ValueError):
    """Inconsistent or invalid configuration."""


class InfeasibleDesignError(ConfigurationError):
    """The requested sampler cannot be run for this design."""


class EnvelopeError(CircBayesError, RuntimeError):
    """The rejection envelope for kappa could not be constructed."""

    def __init__(self, eta, beta, reason=""):
        self.eta = eta
        self.beta = beta
        msg = f"cannot build kappa envelope (eta={eta!r}, beta_t={beta!r})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DatasetError(CircBayesError, ValueError):
    """Malformed input dataset."""


class ReplicationError(CircBayesError, RuntimeError):
    """A simulation replication failed."""

    def __init__(self, seed, index, method, cause):
        self.seed = seed
        self.index = index
        self.method = method
        super().__init__(
            f"replication failed (seed={seed}, index={index}, method={method}): {cause}"
        )
