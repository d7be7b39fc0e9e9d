# macsim - channel entities
from macsim.entities.packet import (
    Feedback,
    Message,
    Mode,
    Packet,
    RoundOutcome,
    StationAction,
)
from macsim.entities.station import Station

__all__ = [
    "Feedback",
    "Message",
    "Mode",
    "Packet",
    "RoundOutcome",
    "Station",
    "StationAction",
]
