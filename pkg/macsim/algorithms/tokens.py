"""Token subroutines shared by the oblivious algorithms.

Each station keeps its own copy of the token state and updates it only from
what it hears. Members of a group are all on in the group's rounds, so the
copies move in lockstep.
"""

from typing import List, Sequence

from macsim.errors import ListDivergence


class TokenRing:
    """One station's copy of a round-robin token with old/new phases.

    A packet is old when it arrived before `phase_start`. The holder sends
    its old packets one per round; a silent round passes the token on, and a
    full turn of the ring starts a new phase.
    """

    def __init__(self, members: Sequence[int]):
        self.members = tuple(members)
        self.position = 0
        self.phase_start = 1
        self.phases = 0

    @property
    def holder(self) -> int:
        return self.members[self.position]

    def advance(self, next_phase_start: int) -> bool:
        """Pass the token; return True when it wrapped around."""
        self.position += 1
        if self.position < len(self.members):
            return False
        self.position = 0
        self.phase_start = next_phase_start
        self.phases += 1
        return True


class MoveBigToFront:
    """One station's copy of the move-big-to-front list of a thread.

    The station at `position` holds the token and keeps it while it has
    packets. A transmission flagged big moves its sender to the front of
    the list, and the token follows it there.
    """

    def __init__(self, members: Sequence[int]):
        self.order: List[int] = list(members)
        self.position = 0

    @property
    def holder(self) -> int:
        return self.order[self.position]

    def on_silence(self):
        self.position = (self.position + 1) % len(self.order)

    def on_big(self, sender: int):
        self.order.remove(sender)
        self.order.insert(0, sender)
        self.position = 0


def check_lists_agree(copies: Sequence[MoveBigToFront], round_index: int, thread: int):
    first = copies[0]
    for copy in copies[1:]:
        if copy.order != first.order or copy.position != first.position:
            raise ListDivergence(
                round_index,
                f"thread {thread}: list copies disagree ({first.order}@{first.position} vs {copy.order}@{copy.position})",
            )
