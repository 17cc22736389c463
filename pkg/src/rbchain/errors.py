"""Exception hierarchy shared by every rbchain module."""


class RBChainError(Exception):
    """Base class for all rbchain errors."""


class InvalidModulus(RBChainError, ValueError):
    pass


class UndefinedGcd(RBChainError, ValueError):
    pass


class NotInvertible(RBChainError, ValueError):
    """Raised when an inverse is requested for a non-unit. Pad the exponent first."""


class PaddingExhausted(RBChainError):
    pass


class InvalidSuffix(RBChainError, ValueError):
    pass


class OversizeInput(RBChainError, ValueError):
    pass


class MustBranch(RBChainError):
    """The parent already has a child on its primary edge; use ``branch``."""


class MustAppend(RBChainError):
    """The block has no children yet; a plain ``append`` suffices."""


class LeafRedaction(RBChainError):
    """Leaves carry no outgoing link, rewrite them instead of redacting."""


class BlockNotFound(RBChainError, LookupError):
    pass


class NotCoprime(RBChainError, ValueError):
    pass


class ParseError(RBChainError, ValueError):
    pass


class IntegrityError(RBChainError):
    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class KeyMismatch(RBChainError):
    pass
