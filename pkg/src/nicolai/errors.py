"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class NicolaiError(Exception):
    """Base class for all library errors."""


class DomainError(NicolaiError, ValueError):
    """An argument lies outside the domain of an operation (e.g. m < 1)."""


class SiteRangeError(NicolaiError, IndexError):
    """A site index or degree is out of range."""


class ConfigError(NicolaiError, ValueError):
    """Invalid configuration, e.g. a composite modulus."""


class ResourceError(NicolaiError):
    """A requested computation exceeds the configured size cap."""


class ModelError(NicolaiError):
    """A supercharge violates a structural requirement (Q^2 != 0)."""


class ArithmeticDisagreement(NicolaiError, ArithmeticError):
    """Independent exact computations disagreed and could not be reconciled."""


class ConstructionError(NicolaiError):
    """Retract data could not be built for the given monomial."""


class DivergenceError(NicolaiError):
    """The perturbation series did not terminate."""
