class MLNError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MLNError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"{line}:{column}: "
        if source:
            where = f"{source}:{where}" if where else f"{source}: "
        super().__init__(where + message)
        self.message = message


class TypeCheckError(ParseError):
    """Ill-typed atom or term, arity mismatch, or undeclared symbol."""


class AnalysisError(MLNError):
    """The program is syntactically fine but outside the supported fragment."""


class QuantifierRestrictionError(AnalysisError):
    pass


class NotDeterminateError(AnalysisError):
    pass


class SizeError(MLNError):
    pass
