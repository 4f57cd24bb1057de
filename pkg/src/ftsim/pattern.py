"""Application model: per-process communication programs and MPI standard-mode
semantics (blocking/non-blocking, with or without system buffering)."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .energy import FrequencyLevel, SystemProfile, WaitMode, UnknownFrequency


class Direction(enum.Enum):
    SEND = "send"
    RECV = "recv"


class OpMode(enum.Enum):
    BLOCKING = "blocking"
    NONBLOCKING = "nonblocking"


class UnmatchedOp(ValueError):
    """A send without a matching receive on the peer (or vice versa)."""


@dataclass(frozen=True)
class CommOp:
    """One communication operation in a process's program.

    ``post_time_offset`` is compute time preceding the op at the maximum
    frequency; for non-blocking ops ``wait_offset`` locates the matching
    wait call (equal to the post offset for blocking ops).
    """

    index: int
    proc: int
    peer: int
    direction: Direction
    mode: OpMode
    post_time_offset: float
    wait_offset: float

    @property
    def block_point(self) -> float:
        """Compute offset at which this op can suspend the process."""
        return self.wait_offset if self.mode is OpMode.NONBLOCKING else self.post_time_offset


@dataclass
class CommPattern:
    processes: list[list[CommOp]]
    interval: float = 0.0
    buffered: bool = False
    wait_mode: WaitMode = WaitMode.ACTIVE
    message_size: int = 0
    repetition: float = 0.0  # one pattern repetition, seconds; 0 = whole program

    @property
    def nodes(self) -> int:
        return len(self.processes)

    def ops_with(self, proc: int, peer: int) -> list[CommOp]:
        return [op for op in self.processes[proc] if op.peer == peer]

    def matching_op(self, op: CommOp) -> CommOp:
        """Peer op paired with ``op`` by FIFO order on the directed channel."""
        mine = [o for o in self.processes[op.proc] if o.peer == op.peer and o.direction == op.direction]
        k = mine.index(op)
        want = Direction.RECV if op.direction is Direction.SEND else Direction.SEND
        theirs = [o for o in self.processes[op.peer] if o.peer == op.proc and o.direction == want]
        if k >= len(theirs):
            raise UnmatchedOp(
                f"op {op.index} of process {op.proc} ({op.direction.value} peer {op.peer}) has no match"
            )
        return theirs[k]

    def validate(self) -> None:
        for proc, ops in enumerate(self.processes):
            last = -1.0
            for op in ops:
                if op.proc != proc:
                    raise ValueError(f"op {op.index} owner mismatch")
                if op.post_time_offset <= last:
                    raise ValueError(
                        f"process {proc}: post offsets not strictly increasing at op {op.index}"
                    )
                last = op.post_time_offset
                if op.mode is OpMode.NONBLOCKING and op.wait_offset < op.post_time_offset:
                    raise ValueError(f"process {proc}: wait before post at op {op.index}")
                if not (0 <= op.peer < self.nodes) or op.peer == proc:
                    raise ValueError(f"process {proc}: bad peer {op.peer}")
        for ops in self.processes:
            for op in ops:
                self.matching_op(op)


def completion_time(
    op: CommOp, pattern: CommPattern, sender_ready: float, receiver_ready: float
) -> tuple[float, float]:
    """When each side of a message exchange may proceed.

    Blocking buffered sends return as soon as the message is copied out;
    unbuffered ones synchronize both sides. Non-blocking posts return
    immediately, so the times here are those of the matching waits: the
    sender's wait returns at the local copy when buffering is available,
    otherwise both waits return once the data reaches the receiver.
    Transmission latency is zero.
    """
    pattern.matching_op(op)
    synced = max(sender_ready, receiver_ready)
    if pattern.buffered:
        return sender_ready, synced
    return synced, synced


def next_comm(pattern: CommPattern, child: int, parent: int, after: float) -> float:
    """Earliest time strictly after ``after`` at which ``child`` reaches an
    operation matching ``parent``, at the maximum frequency. Infinity when
    none remain."""
    for op in pattern.processes[child]:
        if op.peer == parent and op.block_point > after:
            return op.block_point
    return float("inf")


def wait_power(mode: WaitMode, f: FrequencyLevel, profile: SystemProfile) -> float:
    """Power drawn while waiting for a message: polling power at f for active
    waits, near-base power for idle waits."""
    if f.ghz not in {lvl.ghz for lvl in profile.freqs}:
        raise UnknownFrequency(f"{f.ghz} GHz not in profile")
    if mode is WaitMode.ACTIVE:
        return profile.level(f.ghz).active_wait_power
    return profile.p_idle_wait


class CommGraph:
    """Who communicates with whom, derived from a pattern."""

    def __init__(self, pattern: CommPattern):
        self._peers: dict[int, list[int]] = {}
        for proc, ops in enumerate(pattern.processes):
            seen = sorted({op.peer for op in ops})
            self._peers[proc] = seen

    def neighbors(self, proc: int) -> list[int]:
        return self._peers.get(proc, [])


class ProcStatus(enum.Enum):
    COMPUTING = "COMPUTING"
    BLOCKED_WAIT = "BLOCKED_WAIT"
    CHECKPOINTING = "CHECKPOINTING"
    SLEEPING = "SLEEPING"
    RESTARTING = "RESTARTING"
    REEXECUTING = "REEXECUTING"
    DONE = "DONE"


@dataclass
class ProcessState:
    """Mutable per-process simulation state (one representative process per node)."""

    node: int
    status: ProcStatus = ProcStatus.COMPUTING
    pc: int = 0
    freq: FrequencyLevel | None = None
    last_ckpt_time: float = 0.0
    position: float = 0.0  # compute seconds completed
    resume_wall: float = 0.0  # wall time when the current compute stretch began
    beta: float = 1.0
    history: list[int] = field(default_factory=list)
