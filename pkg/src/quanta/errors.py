"""Exception hierarchy shared by the parser, engine and shell."""


class QuantaError(Exception):
    """Base class for every error the engine reports."""


class LexError(QuantaError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%d:%d: %s" % (line, col, message))
        self.line = line
        self.col = col


class ParseError(QuantaError):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.expected = tuple(sorted(set(expected)))
        text = "%d:%d: %s" % (line, col, message)
        if self.expected:
            text += " (expected one of: %s)" % ", ".join(self.expected)
        super().__init__(text)
        self.line = line
        self.col = col


class NormalizeError(QuantaError):
    pass


class ContradictionError(NormalizeError):
    pass


class DivergenceError(NormalizeError):
    def __init__(self, message: str, last_rules=()):
        super().__init__(message)
        self.last_rules = list(last_rules)


class QuantaTypeError(NormalizeError):
    pass


class EnumerationError(NormalizeError):
    pass


class UnrealizableCommandError(NormalizeError):
    pass


class EffectError(NormalizeError):
    pass


class ImmutabilityError(NormalizeError):
    pass


class AlreadyBoundError(NormalizeError):
    pass


class UnknownClassError(NormalizeError):
    pass


class SequenceError(NormalizeError):
    """Index or subrange out of bounds, or reading an uninitialized sequence."""


class ModelParseError(NormalizeError):
    def __init__(self, message: str, offset: int):
        super().__init__("offset %d: %s" % (offset, message))
        self.offset = offset


class MissingFieldError(NormalizeError):
    pass


class TemplateError(QuantaError):
    pass


class UnknownHandleError(QuantaError):
    pass


class TraceDisabledError(QuantaError):
    pass


class DivisionByZeroError(NormalizeError):
    pass
