"""Cycle detection for eventually-periodic iterations.

Brent's algorithm: O(tail + period) steps, O(1) states kept.  States must
be hashable-free plain values supporting ==; the step function is pure.
"""


def find_cycle(step, start, cap: int | None = None):
    """Return (tail, period) of start, step(start), step(step(start)), ...

    If cap is given and the walk would exceed cap steps, returns
    (None, None).
    """
    power = lam = 1
    tortoise = start
    hare = step(start)
    steps = 1
    while tortoise != hare:
        if cap is not None and steps >= cap:
            return None, None
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
        steps += 1

    # period known; locate the tail by walking two cursors lam apart
    hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    tortoise = start
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1
    return mu, lam


def cycle_minimum(step, on_cycle_state, period: int):
    """Smallest state (by natural ordering) among one full cycle walk."""
    best = on_cycle_state
    cur = on_cycle_state
    for _ in range(period - 1):
        cur = step(cur)
        if cur < best:
            best = cur
    return best
