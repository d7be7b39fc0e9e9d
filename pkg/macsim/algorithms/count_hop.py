import math
from fractions import Fraction
from typing import List, Optional, Tuple

from macsim.algorithms.base import RoutingAlgorithm
from macsim.entities.bits import decode_uints, encode_uint, encode_uints
from macsim.entities.packet import Message, RoundOutcome, StationAction
from macsim.errors import AlgorithmError, ScheduleOverrun

COORDINATOR = 0


class _PhaseView:
    """What one station knows about the current phase."""

    def __init__(self, n: int, phase_start: int):
        self.phase_start = phase_start
        self.next_phase: Optional[int] = phase_start
        # Old-packet counts per destination, fixed at the phase start
        self.counts: List[int] = [0] * n
        self.total: Optional[int] = None
        self.recv: Tuple[int, int] = (0, 0)
        self.send_start: List[int] = [0] * n


class CountHop(RoutingAlgorithm):
    """Coordinator-scheduled direct routing with two stations on per round.

    After an idle first phase of n rounds, every phase has three blocks:
    workers report their old-packet counts per destination to the
    coordinator, the coordinator tells each worker where its transmit
    intervals and receive window lie, and then the packets for each
    destination v are sent back to back while v listens. Packets injected
    during a phase wait for the next one.
    """

    name = "count-hop"

    def __init__(self, n: int, energy_cap: int, horizon: int, beta: Fraction):
        super().__init__(n, energy_cap)
        self.width = max(1, (horizon + math.ceil(beta)).bit_length())
        self.workers = list(range(1, n))
        self.collect_slots = [(v, i) for v in range(n) for i in self.workers if i != v]
        self.collect_length = len(self.collect_slots)
        self.announce_length = len(self.workers)
        self.overhead = self.collect_length + self.announce_length
        self.views: List[_PhaseView] = []
        self.reported: List[List[int]] = []
        self.plan: Optional[dict] = None
        self.phases = 0
        self.notes.update({"coordinator": COORDINATOR, "count_width": self.width, "phase_overhead": self.overhead})

    def bind(self, stations):
        super().bind(stations)
        self.views = [_PhaseView(self.n, self.n + 1) for _ in range(self.n)]

    def first_wake(self, name: int) -> Optional[int]:
        return self.n + 1

    def begin_round(self, round_index: int):
        for name, view in enumerate(self.views):
            if view.next_phase == round_index:
                self._start_phase(name, round_index)

    def _start_phase(self, name: int, round_index: int):
        view = _PhaseView(self.n, round_index)
        view.next_phase = None
        for packet in self.queue(name).old_packets(round_index):
            view.counts[packet.destination] += 1
        self.views[name] = view
        if name == COORDINATOR:
            self.reported = [[0] * self.n for _ in range(self.n)]
            self.plan = None
            self.phases += 1

    def _slot(self, view: _PhaseView, round_index: int) -> Tuple[str, int]:
        offset = round_index - view.phase_start
        if offset < self.collect_length:
            return "collect", offset
        offset -= self.collect_length
        if offset < self.announce_length:
            return "announce", offset
        return "transmit", offset - self.announce_length

    def _make_plan(self) -> dict:
        """Lay out the transmit block from the reported counts (coordinator only)."""
        counts = [list(row) for row in self.reported]
        counts[COORDINATOR] = list(self.views[COORDINATOR].counts)
        send_start = [[0] * self.n for _ in range(self.n)]
        recv = []
        offset = 0
        for v in range(self.n):
            stage_start = offset
            senders = [i for i in self.workers if i != v]
            if v != COORDINATOR:
                senders.append(COORDINATOR)
            for i in senders:
                if counts[i][v]:
                    send_start[i][v] = offset
                    offset += counts[i][v]
            recv.append((stage_start, offset - stage_start))
        return {"total": offset, "send_start": send_start, "recv": recv}

    def _ensure_plan(self):
        if self.plan is None:
            self.plan = self._make_plan()
            view = self.views[COORDINATOR]
            view.total = self.plan["total"]
            view.recv = self.plan["recv"][COORDINATOR]
            view.send_start = self.plan["send_start"][COORDINATOR]
            view.next_phase = view.phase_start + self.overhead + view.total

    def _sending_to(self, name: int, view: _PhaseView, offset: int) -> Optional[int]:
        """Destination whose interval covers the transmit-block offset, if any."""
        for v, count in enumerate(view.counts):
            if count and view.send_start[v] <= offset < view.send_start[v] + count:
                return v
        return None

    def _is_on(self, name: int, round_index: int) -> bool:
        view = self.views[name]
        kind, index = self._slot(view, round_index)
        if kind == "collect":
            return name == COORDINATOR or self.collect_slots[index][1] == name
        if kind == "announce":
            return name == COORDINATOR or self.workers[index] == name
        if view.total is None or index >= view.total:
            return False
        start, length = view.recv
        return start <= index < start + length or self._sending_to(name, view, index) is not None

    def act(self, name: int, round_index: int) -> StationAction:
        view = self.views[name]
        if round_index < view.phase_start:
            return StationAction.off()
        kind, index = self._slot(view, round_index)

        if kind == "collect":
            v, sender = self.collect_slots[index]
            if name == sender:
                return StationAction.transmit(Message(name, None, encode_uint(view.counts[v], self.width)))
            return StationAction.listen() if name == COORDINATOR else StationAction.off()

        if kind == "announce":
            worker = self.workers[index]
            if name == COORDINATOR:
                self._ensure_plan()
                start, length = self.plan["recv"][worker]
                fields = [self.plan["total"], start, length] + self.plan["send_start"][worker]
                return StationAction.transmit(Message(name, None, encode_uints(fields, self.width)))
            return StationAction.listen() if name == worker else StationAction.off()

        if view.total is None or index >= view.total:
            return StationAction.off()
        destination = self._sending_to(name, view, index)
        if destination is not None:
            packet = self.queue(name).first(
                lambda p: p.destination == destination and p.arrival_round < view.phase_start
            )
            if packet is None:
                raise ScheduleOverrun(round_index, f"station {name} has no old packet for {destination} in its interval")
            return StationAction.transmit(Message(name, packet))
        start, length = view.recv
        if start <= index < start + length:
            return StationAction.listen()
        return StationAction.off()

    def observe(self, name: int, outcome: RoundOutcome):
        view = self.views[name]
        kind, index = self._slot(view, outcome.round)
        if kind == "collect" and name == COORDINATOR:
            v, sender = self.collect_slots[index]
            if not outcome.heard:
                raise AlgorithmError(outcome.round, f"coordinator missed the count of station {sender}")
            self.reported[sender][v] = decode_uints(outcome.message.control_bits, self.width)[0]
        elif kind == "announce" and name == self.workers[index]:
            if not outcome.heard:
                raise AlgorithmError(outcome.round, f"station {name} missed its announcement")
            fields = decode_uints(outcome.message.control_bits, self.width)
            view.total = fields[0]
            view.recv = (fields[1], fields[2])
            view.send_start = fields[3:]
            view.next_phase = view.phase_start + self.overhead + view.total

    def next_wake(self, name: int, round_index: int) -> Optional[int]:
        view = self.views[name]
        end = view.next_phase if view.next_phase is not None else view.phase_start + self.overhead
        return self._scan(round_index, lambda t: self._is_on(name, t), end - round_index - 1, view.next_phase)

    def describe(self):
        notes = dict(self.notes)
        notes["phases"] = self.phases
        return notes
