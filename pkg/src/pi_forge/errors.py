"""Exception hierarchy shared by all modules."""


class PiForgeError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PiForgeError, ValueError):
    """Malformed table, dataset, graph or argument."""


class InvalidAssignmentError(InvalidInputError):
    """An assignment leaves a variable unbound or binds an out-of-range value."""


class InvalidQueryError(InvalidInputError):
    """A query over variable sets is ill-posed (empty, overlapping, x == y)."""


class ZeroEvidenceError(PiForgeError):
    """Conditioning on evidence of probability zero."""


class InvalidSpecError(InvalidInputError):
    """Parameters of the full PI constructor are out of range."""


class NotFoundError(PiForgeError, KeyError):
    """Unknown fixture, learner or registry entry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NonRealizableError(InvalidInputError):
    """An exact-frequency dataset cannot be built for the requested size."""


class InvalidCellError(InvalidInputError):
    """A K2 count cell violates the independence relation."""


class InvalidArgumentError(InvalidInputError):
    """A numeric argument lies outside the admissible region."""
