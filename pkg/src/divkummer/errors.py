"""Exception hierarchy.

Input problems (exit status 2 on the command line) derive from ``InputError``;
mathematical refusals (exit status 1) derive from ``Refusal``.
"""


class DivKummerError(Exception):
    exit_code = 1

    @property
    def kind(self) -> str:
        return type(self).__name__


class InputError(DivKummerError):
    exit_code = 2


class SchemaError(InputError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantViolation(InputError):
    pass


class BadDiscriminant(InvariantViolation):
    pass


class RingMismatch(InvariantViolation):
    pass


class IllDefinedMap(InvariantViolation):
    pass


class BadAction(InvariantViolation):
    pass


class NonInjectivePointing(InvariantViolation):
    pass


class IncompatibleMap(InvariantViolation):
    """A map of pointed modules that does not respect the pointings."""


class PreconditionError(InvariantViolation):
    pass


class Refusal(DivKummerError):
    exit_code = 1


class NotPure(Refusal):
    pass


class NotNormal(Refusal):
    pass


class LevelTooSmall(Refusal):
    def __init__(self, message: str, min_level: int):
        super().__init__(f"{message} (minimal sufficient level: {min_level})")
        self.min_level = min_level


class InfiniteSearch(Refusal):
    pass


class EnumerationLimit(Refusal):
    pass


class HypothesisFailure(Refusal):
    def __init__(self, message: str, condition: int):
        super().__init__(message)
        self.condition = condition
