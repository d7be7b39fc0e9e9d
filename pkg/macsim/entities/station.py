from typing import Callable, Iterator, List, Optional

from macsim.entities.packet import Packet


class Station:
    """A station's packet queue, kept in arrival order.

    The engine owns the queue contents; algorithms read their own station's
    queue and never another's.
    """

    def __init__(self, name: int):
        self.name = name
        self.queue: List[Packet] = []
        self.on_rounds = 0

    def __len__(self) -> int:
        return len(self.queue)

    def __iter__(self) -> Iterator[Packet]:
        return iter(self.queue)

    def __contains__(self, packet: Packet) -> bool:
        return any(queued is packet for queued in self.queue)

    def enqueue(self, packet: Packet, round_index: int):
        """Append a packet that arrived in the given round."""
        packet.arrival_round = round_index
        self.queue.append(packet)

    def remove(self, packet: Packet):
        """Drop a packet that left this station."""
        for position, queued in enumerate(self.queue):
            if queued is packet:
                del self.queue[position]
                return
        raise KeyError(f"packet {packet.id} is not queued at station {self.name}")

    def first(self, predicate: Callable[[Packet], bool]) -> Optional[Packet]:
        """Oldest queued packet satisfying the predicate, if any."""
        for packet in self.queue:
            if predicate(packet):
                return packet
        return None

    def count(self, predicate: Callable[[Packet], bool]) -> int:
        return sum(1 for packet in self.queue if predicate(packet))

    def old_packets(self, before_round: int) -> List[Packet]:
        """Packets that arrived strictly before the given round."""
        return [packet for packet in self.queue if packet.arrival_round < before_round]

    def __repr__(self) -> str:
        return f"Station({self.name}, queued={len(self.queue)})"
