"""Compiled inner loops for the layer-level simulator.

State is the layer ``y`` (distance to the optimum) and the selector slot
``s`` (0 = OI, 1 = partner).  ``better[h]`` is True iff layer ``h`` is fitter
than layer ``h + 1``.  The selector is parametrised by ``leave_oi`` (OI to
partner) and ``stay`` (partner to partner), which covers both the Markov
selector (``stay = 1 - q``) and i.i.d. mixing (``stay = leave_oi``).

Kernels return early when the switch buffer is full so the caller can grow
it and resume; all loop state is passed in and handed back.
"""
import numba
import numpy as np

OI, AM, OW = 0, 1, 2

HIT, BUDGET, SWITCH_FULL = 0, 1, 2

_BIG = 2**62


@numba.njit(cache=True, nogil=True)
def _accepts(op, fitter):
    if op == AM:
        return True
    if op == OI:
        return fitter
    return not fitter


@numba.njit(cache=True, nogil=True)
def _sample(trace, meta, t, y):
    # meta = [length, stride]; decimate in place when full
    if t % meta[1] != 0:
        return
    if meta[0] == trace.shape[0]:
        half = (meta[0] + 1) // 2
        for i in range(half):
            trace[i] = trace[2 * i]
        meta[0] = half
        meta[1] *= 2
        if t % meta[1] != 0:
            return
    trace[meta[0]] = y
    meta[0] += 1


@numba.njit(cache=True, nogil=True)
def run_iterate(rng, better, partner, leave_oi, stay, state, budget, usage,
                switch_t, switch_y, trace, meta):
    """One mutation, one acceptance test and one selector step per iteration.

    ``state = [y, s, t, n_switch]`` is updated in place.
    """
    n = better.shape[0]
    y, s, t, k = state[0], state[1], state[2], state[3]
    record = switch_t.shape[0] > 0
    sampled = trace.shape[0] > 0
    status = BUDGET
    while True:
        if y == 0:
            status = HIT
            break
        if t >= budget:
            status = BUDGET
            break
        if record and k == switch_t.shape[0]:
            status = SWITCH_FULL
            break
        if sampled:
            _sample(trace, meta, t, y)
        op = OI if s == 0 else partner
        usage[s] += 1
        # positions 0..y-1 stand for the zero bits
        if rng.integers(0, n) < y:
            if _accepts(op, better[y - 1]):
                y -= 1
        else:
            if _accepts(op, not better[y]):
                y += 1
        u = rng.random()
        t += 1
        if s == 0:
            switched = u < leave_oi
        else:
            switched = not (u < stay)
        if switched:
            s = 1 - s
            if record:
                switch_t[k] = t
                switch_y[k] = y
            k += 1
    state[0], state[1], state[2], state[3] = y, s, t, k
    return status


@numba.njit(cache=True, nogil=True)
def run_events(rng, better, partner, leave_oi, stay, state, budget, usage,
               switch_t, switch_y, trace, meta):
    """Event-driven equivalent of :func:`run_iterate`.

    Within a phase the number of iterations up to the next accepted move is
    geometric, and so is the phase length; the loop jumps from event to
    event.  ``state = [y, s, t, n_switch, remaining_phase]``.
    """
    n = better.shape[0]
    y, s, t, k, r = state[0], state[1], state[2], state[3], state[4]
    record = switch_t.shape[0] > 0
    sampled = trace.shape[0] > 0
    status = BUDGET
    while True:
        if y == 0:
            status = HIT
            break
        if t >= budget:
            status = BUDGET
            break
        if record and k == switch_t.shape[0]:
            status = SWITCH_FULL
            break
        if r == 0:
            rate = leave_oi if s == 0 else 1.0 - stay
            r = rng.geometric(rate) if rate < 1.0 else 1
            if r <= 0:
                r = _BIG
        op = OI if s == 0 else partner
        down = y / n if _accepts(op, better[y - 1]) else 0.0
        up = (n - y) / n if (y < n and _accepts(op, not better[y])) else 0.0
        a = down + up
        if a >= 1.0:
            w = 1
        elif a > 0.0:
            w = rng.geometric(a)
            if w <= 0:
                w = _BIG
        else:
            w = _BIG
        step = min(w, r, budget - t)
        if sampled:
            start = ((t + meta[1] - 1) // meta[1]) * meta[1]
            while start < t + step:
                _sample(trace, meta, start, y)
                start = ((start + 1 + meta[1] - 1) // meta[1]) * meta[1]
        usage[s] += step
        t += step
        r -= step
        if step == w:
            if up == 0.0 or (down > 0.0 and rng.random() * a < down):
                y -= 1
            else:
                y += 1
        if r == 0:
            s = 1 - s
            if record:
                switch_t[k] = t
                switch_y[k] = y
            k += 1
    state[0], state[1], state[2], state[3], state[4] = y, s, t, k, r
    return status


@numba.njit(cache=True, nogil=True)
def phase_ends(rng, better, ops, rates, start, trials, grace_oi):
    """Layers after a fixed sequence of phases, one row per trial.

    Column ``j`` holds the layer at the end of phase ``j``.  ``hits[i]`` flags
    trials that visit layer 0 during the phases, or within ``grace_oi``
    further OI iterations after the last phase.
    """
    n = better.shape[0]
    out = np.empty((trials, ops.shape[0]), dtype=np.int64)
    hits = np.zeros(trials, dtype=np.bool_)
    for i in range(trials):
        y = start
        hit = y == 0
        for j in range(ops.shape[0]):
            op = ops[j]
            while True:
                if rng.integers(0, n) < y:
                    if _accepts(op, better[y - 1]):
                        y -= 1
                else:
                    if _accepts(op, not better[y]):
                        y += 1
                if y == 0:
                    hit = True
                if rng.random() < rates[j]:
                    break
            out[i, j] = y
        for _ in range(grace_oi):
            if hit:
                break
            if rng.integers(0, n) < y:
                if _accepts(OI, better[y - 1]):
                    y -= 1
            else:
                if _accepts(OI, not better[y]):
                    y += 1
            if y == 0:
                hit = True
        hits[i] = hit
    return out, hits


@numba.njit(cache=True, nogil=True)
def selector_run(rng, leave_oi, stay, s, steps, lengths, kinds):
    """Run the selector alone for ``steps`` iterations.

    Completed phase lengths and their slot (0 = OI) are written to
    ``lengths``/``kinds``; returns the number of completed phases and the
    number of iterations spent in the partner slot.
    """
    k = 0
    current = 0
    partner_steps = 0
    for _ in range(steps):
        partner_steps += s
        current += 1
        u = rng.random()
        if s == 0:
            switched = u < leave_oi
        else:
            switched = not (u < stay)
        if switched:
            if k < lengths.shape[0]:
                lengths[k] = current
                kinds[k] = s
            k += 1
            current = 0
            s = 1 - s
    return k, partner_steps
