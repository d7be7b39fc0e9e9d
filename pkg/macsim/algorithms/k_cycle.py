import logging
from typing import Dict, FrozenSet, Optional, Tuple

from macsim.algorithms.base import PeriodicSchedule
from macsim.algorithms.tokens import TokenRing
from macsim.entities.packet import Feedback, Message, Packet, RoundOutcome, StationAction
from macsim.world.layouts import build_group_layout

logger = logging.getLogger(__name__)


class KCycle(PeriodicSchedule):
    """Groups of k stations on a cycle, each active for delta rounds at a time.

    Within the active group the token ring runs over the real members. A
    heard packet whose destination is outside the group is adopted by the
    group's outgoing connector and continues in the next group.
    """

    name = "k-cycle"
    plain_packet = True
    direct_routing = False

    def __init__(self, n: int, energy_cap: int):
        super().__init__(n, energy_cap)
        self.layout = build_group_layout(n, energy_cap)
        self.min_energy_cap = self.layout.effective_k
        self._install_period(
            frozenset(self.layout.members(self.layout.active_group(r)))
            for r in range(1, self.layout.period + 1)
        )
        self.rings: Dict[Tuple[int, int], TokenRing] = {
            (group, station): TokenRing(self.layout.members(group))
            for group in range(self.layout.length)
            for station in self.layout.members(group)
        }
        self.notes.update(
            {
                "effective_k": self.layout.effective_k,
                "groups": self.layout.length,
                "delta": self.layout.delta,
            }
        )

    def next_active_round(self, group: int, round_index: int) -> int:
        """First round after round_index in which the group is active."""
        candidate = round_index + 1
        if self.layout.active_group(candidate) == group:
            return candidate
        segment = (candidate - 1) // self.layout.delta
        segment += (group - segment) % self.layout.length
        return segment * self.layout.delta + 1

    def _eligible(self, station: int, group: int, ring: TokenRing):
        def predicate(packet: Packet) -> bool:
            return packet.arrival_round < ring.phase_start and self.layout.route_group(station, packet.destination) == group
        return predicate

    def act(self, name: int, round_index: int) -> StationAction:
        group = self.layout.active_group(round_index)
        ring = self.rings[(group, name)]
        if ring.holder == name:
            packet = self.queue(name).first(self._eligible(name, group, ring))
            if packet is not None:
                return StationAction.transmit(Message(name, packet))
        return StationAction.listen()

    def adopter(
        self, round_index: int, on_stations: FrozenSet[int], sender: int, packet: Packet
    ) -> Optional[int]:
        connector = self.layout.connector(self.layout.active_group(round_index))
        if connector == sender or connector not in on_stations:
            return None
        return connector

    def observe(self, name: int, outcome: RoundOutcome):
        if outcome.feedback is not Feedback.SILENT:
            return
        group = self.layout.active_group(outcome.round)
        ring = self.rings[(group, name)]
        if ring.advance(self.next_active_round(group, outcome.round)):
            if name == ring.members[0]:
                logger.debug("round %d: group %d starts token phase %d", outcome.round, group, ring.phases)

    def describe(self):
        notes = dict(self.notes)
        notes["layout"] = self.layout.to_dict()
        return notes
