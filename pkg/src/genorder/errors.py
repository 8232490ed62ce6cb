"""Exception hierarchy shared by every module of the package."""


class GenOrderError(Exception):
    """Base class for all errors raised by genorder."""


class ParseError(GenOrderError, ValueError):
    """Expression text could not be parsed.

    ``position`` is a byte offset into the UTF-8 encoded input and
    ``token`` the offending token (empty at end of input).
    """

    def __init__(self, message, position, token=""):
        super().__init__(f"{message} at offset {position}" + (f" ({token!r})" if token else ""))
        self.message = message
        self.position = position
        self.token = token


class DomainError(GenOrderError, ArithmeticError):
    """A function was evaluated outside its domain (log of a negative, 1/0, ...)."""


class DepthExceeded(GenOrderError):
    """Adaptive quadrature hit its subdivision limit before meeting tolerance."""


class DivergenceError(GenOrderError):
    """An integral that must be finite turned out to diverge."""


class TooFewPoints(GenOrderError, ValueError):
    pass


class NonPositive(DomainError):
    """The function under study is not strictly positive on the grid."""


class NormalizerDegenerate(GenOrderError):
    pass


class TailVanished(GenOrderError):
    pass


class BNotSuitable(GenOrderError):
    """The auxiliary function b does not satisfy b(x)/x -> 0."""


class Inconclusive(GenOrderError):
    """The numerical evidence neither confirms nor refutes the claim."""


class HypothesisFailed(Inconclusive):
    """A hypothesis of a transfer result could not be confirmed."""


class NotFound(GenOrderError):
    pass


class AlphaMinusOne(GenOrderError, ValueError):
    """The Karamata transform is not defined for alpha = -1."""


class NotBracketed(GenOrderError):
    pass


class NotIncreasing(GenOrderError):
    pass


class DerivativeVanishes(DomainError):
    pass


class SlowDivergence(Inconclusive):
    """The order of an integral could not be settled within the grid."""
