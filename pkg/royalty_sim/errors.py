"""Exception hierarchy shared by every royalty_sim module."""
from typing import Optional


class RoyaltySimError(Exception):
    """Base class for all errors raised by royalty_sim."""


class SpecDomainError(RoyaltySimError, ValueError):
    """An argument lies outside the domain of a fee or price function."""


class SpecRangeError(RoyaltySimError, ValueError):
    """An argument lies outside a table's covered range or a function's image."""


class ConfigurationError(RoyaltySimError):
    """Analysis or oracle inputs violate a precondition."""


class MechanismError(RoyaltySimError):
    """A move was rejected by the mechanism's rules."""


class NotOwnerError(MechanismError):
    pass


class SelfTransferError(MechanismError):
    pass


class TurnExpiredError(MechanismError):
    pass


class FirstMovePendingError(MechanismError):
    pass


class AlreadyDisclosedError(MechanismError):
    pass


class InsufficientFundsError(MechanismError):
    pass


class NotEntitledError(MechanismError):
    pass


class NoListingError(MechanismError):
    pass


class PriceMismatchError(MechanismError):
    pass


class UnknownAddressError(MechanismError):
    pass


class EventOrderError(MechanismError):
    pass


class InvalidAmountError(MechanismError, ValueError):
    """A negative, non-finite or unrepresentable currency amount."""


class ScenarioError(RoyaltySimError):
    """A scenario file could not be loaded."""


class ScenarioParseError(ScenarioError):
    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ScenarioInvariantError(ScenarioError):
    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        super().__init__(f"{constraint}: {detail}" if detail else constraint)


class ReplayMismatchError(RoyaltySimError):
    def __init__(self, seq: int, detail: str):
        self.seq = seq
        super().__init__(f"replay diverged at seq {seq}: {detail}")
