"""Pure-Python event loop, bit-compatible with the compiled core.

Both backends consume uniform doubles one at a time from the same
BitGenerator and apply identical IEEE double arithmetic, so a given stream
produces identical trajectories whichever backend runs it.  The draw protocol
per event is:

    u -> waiting time  dt = -log1p(-u)/rate
    u -> leader index  i = floor(u*N)
    u -> follower slot j = floor(u*(N-1)), shifted past i
    u... -> line noise X (family inverse/Box-Muller forms, rejected until
            |X| <= pi/eps)

Snapshots record the pre-event state (left limit) at each requested time.
Keep this file in lock-step with _core.pyx.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi
GAUSSIAN, LAPLACE, UNIFORM = 0, 1, 2
REJECT_CAP = 1_000_000


def wrap_angle(x: float) -> float:
    """Map to [-pi, pi)."""
    return x - TWO_PI * math.floor((x + math.pi) / TWO_PI)


def sample_noise_line(rng, family: int, param: float, bound: float,
                      cap: int = REJECT_CAP) -> float:
    """One draw of X ~ g conditioned on |X| <= bound (line variable, unscaled)."""
    rejects = 0
    while True:
        if family == GAUSSIAN:
            ua = rng.random()
            ub = rng.random()
            if ua > 0.0:
                x = param * (math.sqrt(-2.0 * math.log(ua)) * math.cos(TWO_PI * ub))
                if abs(x) <= bound:
                    return x
        elif family == LAPLACE:
            ua = rng.random()
            if ua > 0.0:
                if ua < 0.5:
                    x = param * math.log(2.0 * ua)
                else:
                    x = -param * math.log(2.0 - 2.0 * ua)
                if abs(x) <= bound:
                    return x
        else:
            ua = rng.random()
            x = param * (2.0 * ua - 1.0)
            if abs(x) <= bound:
                return x
        rejects += 1
        if rejects >= cap:
            raise RuntimeError(
                "noise rejection cap exceeded (1e6); epsilon too large for kernel support")


def draw_pair(rng, n: int) -> tuple[int, int]:
    """Uniform ordered (leader, follower) pair of distinct indices."""
    u = rng.random()
    i = int(u * n)
    if i >= n:
        i = n - 1
    u = rng.random()
    j = int(u * (n - 1))
    if j >= n - 1:
        j = n - 2
    if j >= i:
        j += 1
    return i, j


def run_event_loop(gen, angles, out, snap_times, rate, eps, family, param,
                   t_end, reject_cap=REJECT_CAP):
    """Advance the jump process to t_end, recording snapshots into ``out``.

    ``angles`` (length N) is updated in place; ``out`` has shape
    (len(snap_times), N).  Returns the number of events applied.
    """
    n = len(angles)
    n_snaps = len(snap_times)
    bound = math.pi / eps
    clock = 0.0
    si = 0
    events = 0
    rnd = gen.random
    while clock < t_end:
        u = rnd()
        dt = -math.log1p(-u) / rate
        t_next = clock + dt
        while si < n_snaps and snap_times[si] <= t_next:
            out[si, :] = angles
            si += 1
        if t_next >= t_end:
            clock = t_next
            break
        i, j = draw_pair(gen, n)
        x = sample_noise_line(gen, family, param, bound, reject_cap)
        angles[j] = wrap_angle(angles[i] + eps * x)
        clock = t_next
        events += 1
    while si < n_snaps:
        out[si, :] = angles
        si += 1
    return events
