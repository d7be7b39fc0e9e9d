from typing import Dict, Tuple

from macsim.algorithms.base import PeriodicSchedule
from macsim.algorithms.tokens import TokenRing
from macsim.entities.packet import Feedback, Message, RoundOutcome, StationAction
from macsim.world.layouts import build_pair_layout


class KClique(PeriodicSchedule):
    """Pairs of station sets take single rounds in turn; direct routing only.

    The token holder of the active pair sends an old packet only when its
    destination is one of the pair's stations.
    """

    name = "k-clique"
    plain_packet = True

    def __init__(self, n: int, energy_cap: int):
        super().__init__(n, energy_cap)
        self.layout = build_pair_layout(n, energy_cap)
        self.min_energy_cap = self.layout.effective_k
        self._install_period(frozenset(self.layout.members(pair)) for pair in range(len(self.layout.pairs)))
        self.rings: Dict[Tuple[int, int], TokenRing] = {
            (pair, station): TokenRing(self.layout.members(pair))
            for pair in range(len(self.layout.pairs))
            for station in self.layout.members(pair)
        }
        self.notes.update({"effective_k": self.layout.effective_k, "pairs": len(self.layout.pairs)})

    def act(self, name: int, round_index: int) -> StationAction:
        pair = self.layout.active_pair(round_index)
        ring = self.rings[(pair, name)]
        if ring.holder == name:
            members = ring.members
            packet = self.queue(name).first(
                lambda p: p.arrival_round < ring.phase_start and p.destination in members
            )
            if packet is not None:
                return StationAction.transmit(Message(name, packet))
        return StationAction.listen()

    def observe(self, name: int, outcome: RoundOutcome):
        if outcome.feedback is Feedback.SILENT:
            pair = self.layout.active_pair(outcome.round)
            # The pair is active again exactly one period later
            self.rings[(pair, name)].advance(outcome.round + self.period)

    def describe(self):
        notes = dict(self.notes)
        notes["layout"] = self.layout.to_dict()
        return notes
