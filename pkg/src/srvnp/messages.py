"""Protocol message vocabulary: RReq, RRep, RRpr, Err and Data."""
from __future__ import annotations

from dataclasses import dataclass, field

# nominal on-air sizes in bytes (headers; data adds its payload)
RREQ_SIZE = 24
RREP_SIZE = 20
ERR_SIZE = 12
DATA_HEADER_SIZE = 16


@dataclass
class RReq:
    id: int
    origin: int
    origin_seq: int
    dest: int
    hop_count: int
    ttl: int
    path_min_power: float
    dest_seq_known: int = 0  # freshness bar for intermediate replies
    repair: bool = False  # repair-scoped floods are answered with RRpr


@dataclass
class RRep:
    origin: int  # the RReq originator the reply travels back to
    dest: int
    dest_seq: int
    hop_count: int
    lifetime_us: int
    path_min_power: float


@dataclass
class RRpr(RRep):
    """Repair-phase reply; overhearing its transmissions seeds virtual nodes."""


@dataclass
class Err:
    unreachable: tuple[tuple[int, int], ...]  # (dest, dest_seq) pairs


@dataclass
class Data:
    flow: int
    seq: int
    origin: int
    dest: int
    payload_bytes: int
    gen_us: int  # generation timestamp, carried for end-to-end delay
    alternate_candidate: bool = False


def frame_size(msg) -> int:
    if isinstance(msg, Data):
        return DATA_HEADER_SIZE + msg.payload_bytes
    if isinstance(msg, RReq):
        return RREQ_SIZE
    if isinstance(msg, RRep):
        return RREP_SIZE
    return ERR_SIZE
