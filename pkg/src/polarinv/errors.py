"""Exception hierarchy shared across the pipeline."""


class PolarInvError(Exception):
    """Base class for all library errors."""


class InvalidInput(PolarInvError):
    """Input rejected before any computation (CLI exit code 2)."""


class PolySyntaxError(InvalidInput):
    def __init__(self, message, pos, text=""):
        self.pos = pos
        self.text = text
        pointer = ""
        if text:
            pointer = "\n  " + text + "\n  " + " " * pos + "^"
        super().__init__(f"{message} at position {pos}{pointer}")


class UnboundParameter(InvalidInput):
    def __init__(self, name):
        self.name = name
        super().__init__(f"parameter {name!r} has no binding (use --param {name}=VALUE)")


class NonIntegerExponent(PolySyntaxError):
    pass


class NotVanishingAtOrigin(InvalidInput):
    pass


class NotMiniRegular(InvalidInput):
    pass


class MultipleRoot(InvalidInput):
    pass


class PrecisionError(PolarInvError):
    """A decision could not be made at the current working precision."""


class AmbiguousZeroTest(PrecisionError):
    pass


class AmbiguousComparison(PrecisionError):
    pass


class PrecisionExhausted(PolarInvError):
    """Raised when escalation reaches the precision cap (CLI exit code 3)."""


class TruncationCapExceeded(PolarInvError):
    """Series expansion would exceed the configured term or window cap (exit 4)."""


class IndistinguishableArcs(PolarInvError):
    pass


class GridTooCoarse(PolarInvError):
    pass


class PreconditionNotMet(PolarInvError):
    pass


class ExplosionGuard(PolarInvError):
    pass
