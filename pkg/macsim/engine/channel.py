import logging
from collections import defaultdict
from typing import DefaultDict, Dict, FrozenSet, List, Optional, Sequence, Set

from macsim.algorithms.base import RoutingAlgorithm
from macsim.entities.packet import Feedback, Mode, Packet, RoundOutcome, StationAction
from macsim.entities.station import Station
from macsim.errors import (
    ChannelError,
    ControlBitBudgetExceeded,
    DuplicateDelivery,
    EnergyCapViolation,
    InvalidAdoption,
    PhantomTransmit,
)

logger = logging.getLogger(__name__)


class Channel:
    """Round-synchronous multiple-access channel with an energy cap.

    Each call to step_round runs one round: injections, actions of the
    stations whose timers expired, feedback, delivery or adoption, and the
    re-arming of timers.
    """

    def __init__(
        self,
        n: int,
        energy_cap: int,
        algorithm: RoutingAlgorithm,
        bit_limit: Optional[int] = None,
    ):
        self.n = n
        self.energy_cap = energy_cap
        self.algorithm = algorithm
        self.bit_limit = bit_limit
        self.round = 0
        self.stations = [Station(name) for name in range(n)]
        self.total_queued = 0
        self._seen_ids: Set[int] = set()
        self._delivered_ids: Set[int] = set()
        self._wakeups: DefaultDict[int, Set[int]] = defaultdict(set)

        algorithm.bind(self.stations)
        for name in range(n):
            self._arm(name, algorithm.first_wake(name), 0)

    def station(self, name: int) -> Station:
        return self.stations[name]

    def queue_sizes(self) -> List[int]:
        return [len(station) for station in self.stations]

    def _arm(self, name: int, wake_round: Optional[int], now: int):
        """Schedule the next round in which the station is consulted."""
        if wake_round is None:
            return
        if wake_round <= now:
            raise ChannelError(now, f"station {name} asked to wake at past round {wake_round}")
        self._wakeups[wake_round].add(name)

    def step_round(self, injections: Sequence[Packet] = ()) -> RoundOutcome:
        """Run one round and return its outcome."""
        r = self.round + 1
        self.round = r
        self.algorithm.begin_round(r)

        # Injections land regardless of on/off mode
        instant: List[Packet] = []
        for packet in injections:
            if packet.id in self._seen_ids:
                raise ChannelError(r, f"packet id {packet.id} injected twice")
            self._seen_ids.add(packet.id)
            if packet.destination == packet.injection_station:
                packet.delivery_round = r
                self._delivered_ids.add(packet.id)
                instant.append(packet)
                continue
            station = self.stations[packet.injection_station]
            station.enqueue(packet, r)
            self.total_queued += 1
            self.algorithm.on_arrival(station.name, packet, r)

        awake = frozenset(self._wakeups.pop(r, ()))
        actions = self.algorithm.actions(r, awake)
        for name, action in actions.items():
            if name not in awake and action.is_on:
                raise PhantomTransmit(r, f"station {name} acted while its timer was running")

        on = frozenset(name for name, action in actions.items() if action.is_on)
        if len(on) > self.energy_cap:
            raise EnergyCapViolation(
                r, f"{len(on)} stations on ({sorted(on)}) with energy cap {self.energy_cap}"
            )
        transmitters = frozenset(name for name in on if actions[name].mode is Mode.TRANSMIT)

        message = None
        delivered = None
        adopted = None
        if not transmitters:
            feedback = Feedback.SILENT
        elif len(transmitters) > 1:
            feedback = Feedback.COLLISION
        else:
            feedback = Feedback.HEARD
            sender = next(iter(transmitters))
            message = actions[sender].message
            if message.sender != sender:
                raise ChannelError(r, f"station {sender} sent a message signed by {message.sender}")
            if self.bit_limit is not None and message.bit_count > self.bit_limit:
                raise ControlBitBudgetExceeded(
                    r, f"{message.bit_count} control bits exceed the limit {self.bit_limit}"
                )
            if message.packet is not None:
                delivered, adopted = self._route(r, on, sender, message.packet)

        outcome = RoundOutcome(
            round=r,
            on_stations=on,
            transmitters=transmitters,
            feedback=feedback,
            message=message,
            delivered=delivered,
            adopted_by=adopted,
            instant_deliveries=tuple(instant),
        )

        for name in sorted(on):
            self.stations[name].on_rounds += 1
            self.algorithm.observe(name, outcome)
        self.algorithm.end_round(outcome)

        for name in sorted(awake):
            action = actions.get(name, StationAction.off())
            if action.timer is not None:
                self._arm(name, r + action.timer + 1, r)
            else:
                self._arm(name, self.algorithm.next_wake(name, r), r)
        return outcome

    def _route(self, r: int, on: FrozenSet[int], sender: int, packet: Packet):
        """Deliver a heard packet or hand it to the adopting station."""
        source = self.stations[sender]
        if packet not in source:
            raise ChannelError(r, f"station {sender} transmitted packet {packet.id} it does not hold")
        if packet.destination in on:
            if packet.id in self._delivered_ids:
                raise DuplicateDelivery(r, f"packet {packet.id} delivered twice")
            source.remove(packet)
            packet.delivery_round = r
            self._delivered_ids.add(packet.id)
            self.total_queued -= 1
            return packet, None

        adopter = self.algorithm.adopter(r, on, sender, packet)
        if adopter is None:
            return None, None
        if adopter not in on or adopter == sender:
            raise InvalidAdoption(r, f"station {adopter} cannot adopt packet {packet.id} from {sender}")
        source.remove(packet)
        packet.hops.append(adopter)
        self.stations[adopter].enqueue(packet, r)
        logger.debug("round %d: station %d adopted packet %d", r, adopter, packet.id)
        return None, (adopter, packet)

    def pending_wakeups(self) -> Dict[int, FrozenSet[int]]:
        return {round_index: frozenset(names) for round_index, names in self._wakeups.items()}
