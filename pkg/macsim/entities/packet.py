from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple


@dataclass(eq=False)
class Packet:
    """A routed unit: destination, injection metadata and hop history."""

    id: int
    destination: int
    injection_round: int
    injection_station: int
    hops: List[int] = field(default_factory=list)
    delivery_round: Optional[int] = None
    # Round at which the packet joined the queue it currently sits in
    arrival_round: int = 0

    def __post_init__(self):
        if not self.hops:
            self.hops = [self.injection_station]
        if not self.arrival_round:
            self.arrival_round = self.injection_round

    @property
    def holder(self) -> int:
        """Station currently holding the packet."""
        return self.hops[-1]

    @property
    def delivered(self) -> bool:
        return self.delivery_round is not None

    @property
    def delay(self) -> Optional[int]:
        if self.delivery_round is None:
            return None
        return self.delivery_round - self.injection_round

    def __repr__(self) -> str:
        return (
            f"Packet(id={self.id}, {self.injection_station}->{self.destination}, "
            f"injected={self.injection_round}, hops={self.hops})"
        )


@dataclass(frozen=True)
class Message:
    """What a transmitter puts on the channel in one round."""

    sender: int
    packet: Optional[Packet] = None
    control_bits: str = ""

    def __post_init__(self):
        if any(bit not in "01" for bit in self.control_bits):
            raise ValueError(f"control bits must be a 0/1 string, got {self.control_bits!r}")

    @property
    def bit_count(self) -> int:
        return len(self.control_bits)


class Mode(Enum):
    OFF = "off"
    LISTEN = "listen"
    TRANSMIT = "transmit"


@dataclass(frozen=True)
class StationAction:
    """A station's decision for one round, optionally arming its timer."""

    mode: Mode
    message: Optional[Message] = None
    timer: Optional[int] = None

    def __post_init__(self):
        if self.mode is Mode.TRANSMIT and self.message is None:
            raise ValueError("a transmitting station needs a message")
        if self.mode is not Mode.TRANSMIT and self.message is not None:
            raise ValueError("only a transmitting station carries a message")
        if self.timer is not None:
            if self.mode is Mode.OFF:
                raise ValueError("timers are armed only while switched on")
            if self.timer < 1:
                raise ValueError(f"timer must be positive, got {self.timer}")

    @classmethod
    def off(cls) -> "StationAction":
        return cls(Mode.OFF)

    @classmethod
    def listen(cls, timer: Optional[int] = None) -> "StationAction":
        return cls(Mode.LISTEN, timer=timer)

    @classmethod
    def transmit(cls, message: Message, timer: Optional[int] = None) -> "StationAction":
        return cls(Mode.TRANSMIT, message=message, timer=timer)

    @property
    def is_on(self) -> bool:
        return self.mode is not Mode.OFF


class Feedback(Enum):
    SILENT = "silent"
    COLLISION = "collision"
    HEARD = "heard"


@dataclass(frozen=True)
class RoundOutcome:
    """Channel feedback for one round as seen by every switched-on station."""

    round: int
    on_stations: FrozenSet[int]
    transmitters: FrozenSet[int]
    feedback: Feedback
    message: Optional[Message] = None
    delivered: Optional[Packet] = None
    adopted_by: Optional[Tuple[int, Packet]] = None
    # Self-addressed packets delivered on injection this round
    instant_deliveries: Tuple[Packet, ...] = ()

    @property
    def heard(self) -> bool:
        return self.feedback is Feedback.HEARD

    @property
    def sender(self) -> Optional[int]:
        return self.message.sender if self.message is not None else None

    @property
    def control_bits(self) -> int:
        return self.message.bit_count if self.message is not None else 0
