"""Random star-pattern scenario generator for property tests.

Every generated scenario keeps the failed node's posts on a shared exchange
grid (its op offsets absorb its one pre-failure checkpoint pause), so the
analysis, the reference run and the strategy run all see the same timeline.
"""

import random
from dataclasses import replace

from ftsim.cascade import DepthConfig
from ftsim.energy import WaitMode
from ftsim.fault import CheckpointPolicy, FailureSpec
from ftsim.pattern import CommOp, CommPattern, Direction, OpMode
from ftsim.scenario import Scenario

from test_energy import random_profile


def _op(index, proc, peer, direction, mode, post, wait=None):
    return CommOp(
        index=index,
        proc=proc,
        peer=peer,
        direction=direction,
        mode=mode,
        post_time_offset=post,
        wait_offset=post if wait is None else wait,
    )


def random_scenario(seed: int) -> Scenario:
    rng = random.Random(seed)
    nodes = rng.randint(3, 5)
    interval = rng.choice([120.0, 300.0, 390.0, 600.0])
    n_ex = rng.randint(4, 7)
    nonblocking = rng.random() < 0.35
    duration = round(rng.uniform(10.0, interval * 0.3), 1)

    j_fail = rng.randint(2, n_ex - 2)
    prev_wall = interval * j_fail
    block_wall = interval * (j_fail + 1)
    ckpt_end = round(rng.uniform(prev_wall + duration + 5.0, block_wall - 10.0), 1)
    fail_time = round(rng.uniform(ckpt_end + 0.5, block_wall - 1.0), 1)
    restart = round(rng.uniform(20.0, 400.0), 1)

    walls = [interval * (k + 1) for k in range(n_ex)]
    horizon = walls[-1] + restart + (fail_time - ckpt_end) + interval * 2 + 3000.0

    processes: list[list[CommOp]] = [[] for _ in range(nodes)]
    mode = OpMode.NONBLOCKING if nonblocking else OpMode.BLOCKING
    early = min(60.0, interval / 3.0)
    test_lag = round(rng.uniform(1.0, interval / 4.0), 1)

    for i in range(1, nodes):
        stagger = 0.2 * (i - 1)
        for k, wall in enumerate(walls):
            w = wall + stagger
            p0_offset = w - duration if w > ckpt_end else w
            if nonblocking:
                processes[0].append(
                    _op(0, 0, i, Direction.SEND, mode, p0_offset, p0_offset + 2.0)
                )
                processes[i].append(
                    _op(0, i, 0, Direction.RECV, mode, w - early, w + test_lag)
                )
            else:
                processes[0].append(_op(0, 0, i, Direction.SEND, mode, p0_offset))
                processes[i].append(_op(0, i, 0, Direction.RECV, mode, w))

    for proc in range(nodes):
        processes[proc].sort(key=lambda o: o.post_time_offset)
        processes[proc] = [
            CommOp(i, proc, o.peer, o.direction, o.mode, o.post_time_offset, o.wait_offset)
            for i, o in enumerate(processes[proc])
        ]

    pattern = CommPattern(
        processes=processes,
        interval=interval,
        buffered=rng.random() < 0.3,
        wait_mode=rng.choice([WaitMode.ACTIVE, WaitMode.IDLE]),
        message_size=1024,
        repetition=interval,
    )

    profile = replace(random_profile(rng), t_ckpt=duration)
    offsets = {0: ckpt_end - duration}
    for i in range(1, nodes):
        offsets[i] = horizon + 500.0
    ckpt = CheckpointPolicy(
        interval=max(interval * 40.0, duration * 10.0),
        duration=duration,
        anticipation_enabled=False,
        phase_offsets=offsets,
    )
    scenario = Scenario(
        name=f"random-{seed}",
        nodes=nodes,
        profile=profile,
        pattern=pattern,
        ckpt=ckpt,
        failure=FailureSpec(node=0, time=fail_time, restart_duration=restart),
        depth=DepthConfig(rng.choice([1, 2, 5])),
        horizon=horizon,
        strategies_enabled=True,
    )
    scenario.validate()
    return scenario
