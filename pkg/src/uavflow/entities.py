"""Traffic flows and packets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MB_BITS = 8_000_000


@dataclass
class TrafficFlow:
    flow_id: int
    source: int               # node id of the generating UAV
    gen_slot: int
    size_bits: int
    deadline: float           # absolute seconds
    packet_count: int = field(init=False)

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValueError("flow size must be positive")
        self.packet_count = 0  # set by segment_flow


@dataclass(slots=True)
class Packet:
    pkt_id: int
    flow_id: int
    deadline: float           # inherited from the parent flow, absolute seconds
    gen_slot: int
    hop_trace: list
    arrival_slot: int | None = None
    priority: int = 3


def segment_flow(flow: TrafficFlow, packet_bits: int, next_pkt_id: int) -> list[Packet]:
    """Segment a flow into ceil(size/packet_bits) packets.

    The last packet is implicitly padded to the full payload, hence the
    ceiling.  All packets inherit the flow deadline and start their hop
    trace at the source node.
    """
    count = math.ceil(flow.size_bits / packet_bits)
    flow.packet_count = count
    return [
        Packet(
            pkt_id=next_pkt_id + i,
            flow_id=flow.flow_id,
            deadline=flow.deadline,
            gen_slot=flow.gen_slot,
            hop_trace=[flow.source],
        )
        for i in range(count)
    ]
