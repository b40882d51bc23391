"""Exception types shared across the package."""


class CohminError(Exception):
    """Base class for all library errors."""


class UnknownLabel(CohminError):
    def __init__(self, label):
        super().__init__(f"unknown label: {label!r}")
        self.label = label


class UnknownState(CohminError):
    def __init__(self, state):
        super().__init__(f"unknown state: {state!r}")
        self.state = state


class MissingInitial(CohminError):
    def __init__(self, state):
        super().__init__(f"initial state {state!r} is not in the state set")
        self.state = state


class SameState(CohminError):
    def __init__(self, state):
        super().__init__(f"cannot quotient a state with itself: {state!r}")
        self.state = state


class SignatureMismatch(CohminError):
    pass


class LabelClash(CohminError):
    pass


class ResourceLimit(CohminError):
    pass


class ParseError(CohminError):
    def __init__(self, line, column, message):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class UnboundReference(CohminError):
    def __init__(self, name):
        super().__init__(f"unbound reference: {name!r}")
        self.name = name


class TypeMismatch(CohminError):
    pass


class Overflow(CohminError):
    pass


class DomainExceeded(CohminError):
    pass


class NotAProtocol(CohminError):
    pass
