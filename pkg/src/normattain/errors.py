"""Exception types raised across the package."""


class OperatorError(Exception):
    """Base class for all errors raised by normattain."""


class InvariantViolation(OperatorError, ValueError):
    """A value was constructed with parameters outside its valid range."""


class UnboundedSupport(OperatorError):
    """The image of a vector is not finitely representable."""


class NotHermitian(OperatorError):
    pass


class NoConvergence(OperatorError):
    pass


class NotPositive(OperatorError):
    pass


class NotSelfAdjoint(OperatorError):
    pass


class WitnessInvalid(OperatorError):
    pass


class Inconclusive(OperatorError):
    """A decision needed a decided status but got Unknown."""


class GapNotStrict(OperatorError):
    pass


class RankMismatch(OperatorError):
    pass


class NotLOTDShape(OperatorError):
    """Operator is not a diagonal with coefficients decreasing to a positive limit."""


class NotANError(OperatorError):
    """Deflation was requested for an operator classified as not AN."""


class ParseError(OperatorError):
    """Malformed operator spec document.

    ``path`` is the dotted field path of the offending node, ``line`` the
    1-based line number when the failure is a JSON syntax error.
    """

    def __init__(self, message, path="", line=None):
        where = path or "<document>"
        if line is not None:
            where = f"{where} (line {line})"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
        self.detail = message


class UnknownKind(ParseError):
    pass
