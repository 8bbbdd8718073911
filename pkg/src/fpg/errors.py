"""Exception types shared across the toolkit."""


class FpgError(Exception):
    """Base class for toolkit errors."""


class WordSyntaxError(FpgError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class CosetLimitExceeded(FpgError):
    """Enumeration defined more cosets than allowed.

    The group may be infinite, or the limit too low.
    """


class IncompleteTableError(FpgError):
    pass


class NotInSubgroupError(FpgError, ValueError):
    pass


class LatticeContainmentError(FpgError, ValueError):
    pass


class BudgetExceeded(FpgError):
    pass


class InconsistentPresentation(FpgError):
    """Internal pc-presentation state is inconsistent. Always a bug."""


class UncertifiedMorphism(FpgError, ValueError):
    pass


class CatalogError(FpgError, ValueError):
    pass


class StageError(FpgError):
    """An error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
