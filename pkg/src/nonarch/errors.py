"""Exception types shared across the package."""


class NonarchError(Exception):
    pass


class TagMismatch(NonarchError, TypeError):
    """Arithmetic attempted between different coefficient fields."""


class DivisionByZero(NonarchError, ZeroDivisionError):
    pass


class ParseError(NonarchError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CarrierViolation(NonarchError, ValueError):
    """An element does not belong to the carrier set of its group."""


class ValidationFailed(NonarchError):
    def __init__(self, report):
        self.report = report
        names = ", ".join(sorted(report.violated_laws()))
        super().__init__(f"{report.family}: violated laws: {names}")


class NotAMember(NonarchError, ValueError):
    pass


class ChainNotNested(NonarchError, ValueError):
    pass


class EmptyChain(NonarchError, ValueError):
    pass


class InputInSubgroup(NonarchError, ValueError):
    pass


class TargetOutsideImage(NonarchError, ValueError):
    pass


class CharacteristicTwo(NonarchError, ValueError):
    pass
