"""Exception hierarchy shared by every macsim subpackage."""

from typing import Optional


class MacsimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(MacsimError):
    """A scenario, config or CLI argument could not be accepted."""


class ChannelError(MacsimError):
    """An engine invariant was violated during a round."""

    def __init__(self, round_index: int, message: str):
        super().__init__(f"round {round_index}: {message}")
        self.round = round_index


class EnergyCapViolation(ChannelError):
    pass


class DuplicateDelivery(ChannelError):
    pass


class PhantomTransmit(ChannelError):
    pass


class InvalidAdoption(ChannelError):
    pass


class ControlBitBudgetExceeded(ChannelError):
    pass


class AlgorithmError(MacsimError):
    """A routing algorithm detected a broken internal invariant."""

    def __init__(self, round_index: Optional[int], message: str):
        prefix = f"round {round_index}: " if round_index is not None else ""
        super().__init__(prefix + message)
        self.round = round_index


class InconsistentLists(AlgorithmError):
    pass


class ScheduleOverrun(AlgorithmError):
    pass


class QueueUnderflow(AlgorithmError):
    pass


class StageOverflow(AlgorithmError):
    pass


class ListDivergence(AlgorithmError):
    pass


class NoEligibleThread(AlgorithmError):
    pass


class AdversaryError(MacsimError):
    """An adversary strategy cannot run under the given parameters."""


class RateTooLow(AdversaryError):
    pass


class Inapplicable(AdversaryError):
    pass


class LayoutError(MacsimError):
    """A combinatorial layout cannot be built."""


class Degenerate(LayoutError):
    pass
