"""Failure-time analysis of which surviving processes will block, and when.

Starting from the failed process, the analysis expands level by level: the
children of the current level (the processes that communicate with it) are
assigned the time of their first communication that can no longer succeed,
searching at most ``depth`` communications per pair. Within a level, a
sibling that communicates with an already-blocked sibling earlier than its
current estimate has its block time lowered until the level converges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pattern import CommGraph, CommOp, CommPattern, Direction


@dataclass(frozen=True)
class BlockEstimate:
    process: int
    block_time: float
    level: int
    cause: int


@dataclass(frozen=True)
class DepthConfig:
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


def pattern_depth(pattern: CommPattern) -> int:
    """Depth sufficient to find every cascade block: the maximum number of
    communications between any process pair within one pattern repetition."""
    if not any(pattern.processes):
        raise ValueError("empty pattern")
    limit = pattern.repetition if pattern.repetition > 0 else float("inf")
    counts: dict[tuple[int, int], int] = {}
    for ops in pattern.processes:
        for op in ops:
            # one message per send; counting both sides would double it
            if op.direction is not Direction.SEND or op.post_time_offset >= limit:
                continue
            pair = (min(op.proc, op.peer), max(op.proc, op.peer))
            counts[pair] = counts.get(pair, 0) + 1
    return max(counts.values(), default=1)


def _candidate_ops(
    pattern: CommPattern,
    child: int,
    parent: int,
    fail_time: float,
    schedule: "_Schedule",
) -> list[tuple[float, float]]:
    """Child ops with the parent that may still block after the failure.

    Returns (child_block_point, parent_post) pairs in time order. Ops whose
    message was already fully transferred before the failure cannot block
    and are dropped outright. Buffered send-side waits never block.
    """
    out = []
    for op in pattern.processes[child]:
        if op.peer != parent:
            continue
        if pattern.buffered and op.direction is Direction.SEND:
            continue
        block_point = schedule.block_point(op)
        if block_point <= fail_time:
            continue
        peer_op = pattern.matching_op(op)
        transfer = max(schedule.post(op), schedule.post(peer_op))
        if transfer <= fail_time:
            continue
        out.append((block_point, schedule.post(peer_op)))
    out.sort()
    return out


class _Schedule:
    """Projected failure-free post times; defaults to the pattern offsets."""

    def __init__(self, posts: dict[tuple[int, int], tuple[float, float]] | None = None):
        # keyed by (proc, op index) -> (post wall time, block-point wall time)
        self._posts = posts or {}

    def post(self, op: CommOp) -> float:
        if (op.proc, op.index) in self._posts:
            return self._posts[(op.proc, op.index)][0]
        return op.post_time_offset

    def block_point(self, op: CommOp) -> float:
        if (op.proc, op.index) in self._posts:
            return self._posts[(op.proc, op.index)][1]
        return op.block_point


def estimate_block_times(
    pattern: CommPattern,
    failed: int,
    fail_time: float,
    depth: DepthConfig,
    schedule: dict[tuple[int, int], tuple[float, float]] | None = None,
) -> list[BlockEstimate]:
    """Level-by-level expansion with per-level convergence.

    ``schedule`` optionally supplies projected failure-free post times per
    (process, op index); without it the pattern offsets are used directly.
    """
    sched = _Schedule(schedule)
    graph = CommGraph(pattern)
    analyzed: set[int] = {failed}
    level_procs: list[tuple[int, float]] = [(failed, fail_time)]
    estimates: dict[int, BlockEstimate] = {}
    level = 0

    while True:
        level += 1
        current: dict[int, BlockEstimate] = {}
        for parent, parent_block in level_procs:
            for child in graph.neighbors(parent):
                if child in analyzed:
                    continue
                found = _first_block(pattern, child, parent, fail_time, parent_block, depth.depth, sched)
                if found is None:
                    continue
                if child not in current or found < current[child].block_time:
                    current[child] = BlockEstimate(child, found, level, parent)

        if not current:
            break

        _converge_level(pattern, fail_time, current, sched)
        estimates.update(current)
        analyzed.update(current)
        level_procs = [(e.process, e.block_time) for e in current.values()]

    return sorted(estimates.values(), key=lambda e: e.process)


def _first_block(
    pattern: CommPattern,
    child: int,
    parent: int,
    fail_time: float,
    parent_block: float,
    depth: int,
    sched: _Schedule,
) -> float | None:
    """First communication of ``child`` with ``parent`` that blocks, looking
    at most ``depth`` communications ahead; None when none is found.

    A communication still succeeds while the parent has not reached its own
    block, i.e. while the parent-side op posts before the parent's block
    time; each such communication consumes one unit of depth.
    """
    examined = 0
    for block_point, parent_post in _candidate_ops(pattern, child, parent, fail_time, sched):
        examined += 1
        if parent_post >= parent_block:
            return block_point
        if examined >= depth:
            return None
    return None


def _converge_level(
    pattern: CommPattern,
    fail_time: float,
    current: dict[int, BlockEstimate],
    sched: _Schedule,
) -> None:
    """Lower a sibling's block time when another same-level process
    communicates with it after blocking but before the sibling's estimate."""
    changed = True
    while changed:
        changed = False
        for pid in sorted(current):
            est = current[pid]
            for other_id in sorted(current):
                if other_id == pid:
                    continue
                other = current[other_id]
                for t, _ in _candidate_ops(pattern, pid, other_id, fail_time, sched):
                    if other.block_time < t < est.block_time:
                        current[pid] = BlockEstimate(pid, t, est.level, other_id)
                        est = current[pid]
                        changed = True
                        break
