"""Exception hierarchy shared across the package."""


class EntityScopeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EntityScopeError):
    """Bad user-supplied data: malformed files, invalid parameters, bad ranges."""


class ParseError(InputError):
    """A record could not be decoded. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(InputError):
    """A record decoded but violates an invariant (negative amount, no outputs, ...)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateTxError(InputError):
    """Two records share a tx id."""

    def __init__(self, line_no: int, tx_id: str):
        super().__init__(f"line {line_no}: duplicate tx id {tx_id}")
        self.line_no = line_no
        self.tx_id = tx_id


class UnknownKeyError(InputError):
    """A measure key or variant outside the selectable series."""


class NotFoundError(EntityScopeError):
    """A referenced object (session, node, entity, corpus) does not exist."""


class ConflictError(EntityScopeError):
    """The operation clashes with current state (node already split, job running, stale result)."""
