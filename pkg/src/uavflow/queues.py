"""Three-level priority queues with per-slot reclassification.

Priority is deadline slack: <= 0.5 s is high (1), <= 1 s medium (2),
otherwise low (3).  Expired packets stay in the high-priority queue and
may still arrive late unless `purge_expired` is set, in which case they
are moved to a separate expired counter outside the loss ratio.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entities import Packet

PRIORITY_HIGH_SLACK = 0.5
PRIORITY_MED_SLACK = 1.0


def classify_priority(deadline: float, now: float) -> int:
    slack = deadline - now
    if slack <= PRIORITY_HIGH_SLACK:
        return 1
    if slack <= PRIORITY_MED_SLACK:
        return 2
    return 3


@dataclass
class PriorityQueues:
    q_max: int
    queues: tuple = field(default_factory=lambda: ([], [], []))
    expired: list = field(default_factory=list)

    def __len__(self) -> int:
        return sum(len(q) for q in self.queues)

    @property
    def q_free(self) -> int:
        return self.q_max - len(self)

    def lengths(self) -> tuple[int, int, int]:
        return tuple(len(q) for q in self.queues)

    def select(self) -> tuple[int | None, int]:
        """Highest-priority non-empty sub-queue: (priority index, length)."""
        for i, q in enumerate(self.queues):
            if q:
                return i + 1, len(q)
        return None, 0

    def selected_packets(self) -> list[Packet]:
        for q in self.queues:
            if q:
                return q
        return []

    def enqueue(self, packets: list[Packet], now: float) -> tuple[int, int]:
        """Admit packets up to the free capacity; returns (accepted, overflow)."""
        free = self.q_free
        accepted = packets[:free]
        for pkt in accepted:
            pkt.priority = classify_priority(pkt.deadline, now)
            self.queues[pkt.priority - 1].append(pkt)
        return len(accepted), len(packets) - len(accepted)

    def reclassify(self, now: float, purge_expired: bool = False) -> None:
        """Re-bin every queued packet against the slack thresholds.

        Scanning q1, q2, q3 in order keeps FIFO order within each
        destination queue.
        """
        old = [self.queues[0][:], self.queues[1][:], self.queues[2][:]]
        for q in self.queues:
            q.clear()
        for q in old:
            for pkt in q:
                if purge_expired and pkt.deadline < now:
                    self.expired.append(pkt)
                    continue
                pkt.priority = classify_priority(pkt.deadline, now)
                self.queues[pkt.priority - 1].append(pkt)

    def pop_selected(self, count: int) -> list[Packet]:
        """Remove up to `count` packets from the head of the selected queue."""
        q = self.selected_packets()
        taken = q[:count]
        del q[:count]
        return taken
