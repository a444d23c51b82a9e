"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for bad arguments or violated preconditions, 3 for ingredient problems.
"""


class DesignForgeError(Exception):
    exit_code = 2


class DesignError(DesignForgeError, ValueError):
    """A design is structurally malformed (not a partition, bad point ids, ...)."""


class PreconditionViolated(DesignForgeError, ValueError):
    pass


class NotPrimePower(PreconditionViolated):
    pass


class KTooLarge(PreconditionViolated):
    pass


class InvalidInput(PreconditionViolated):
    pass


class Infeasible(PreconditionViolated):
    pass


class InvalidFamily(DesignForgeError, ValueError):
    pass


class NotFound(DesignForgeError, LookupError):
    pass


class SizeLimitExceeded(DesignForgeError, ValueError):
    pass


class NotDisjoint(DesignForgeError, ValueError):
    pass


class NotTransversal(DesignForgeError, ValueError):
    pass


class TooManyTargets(DesignForgeError, ValueError):
    pass


class IngredientError(DesignForgeError):
    exit_code = 3


class IngredientMissing(IngredientError, LookupError):
    pass


class IngredientInvalid(IngredientError, ValueError):
    pass


class SupplierFailure(IngredientError, LookupError):
    pass


class AlphaUnavailable(IngredientError, ValueError):
    pass


class ParseError(DesignForgeError, ValueError):
    pass


class SchemaError(DesignForgeError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
