"""Independent reference computations used to freeze expected values.

Everything here uses exact rational arithmetic or brute-force summation and
shares no code with the package.
"""
from fractions import Fraction
from itertools import product


def layer_values(family, n, param=None):
    """Fitness per layer y (distance to all-ones), written from the definitions."""
    out = []
    for y in range(n + 1):
        ones = n - y
        if family == "onemax":
            out.append(ones)
        elif family == "jump":
            m = param
            out.append(m + ones if ones <= n - m or ones == n else n - ones)
        elif family == "cliff":
            d = param
            out.append(Fraction(ones) if ones <= n - d else Fraction(2 * ones - 2 * d + 1, 2))
        else:
            raise ValueError(family)
    return out


def _accepts(op, f_cur, f_new):
    return {"OI": f_new > f_cur, "OW": f_new < f_cur, "AM": True}[op]


def transitions(values, op, y):
    """{new_layer: probability} after one iteration of op from layer y."""
    n = len(values) - 1
    out = {}
    stay = Fraction(0)
    for target, prob in ((y - 1, Fraction(y, n)), (y + 1, Fraction(n - y, n))):
        if prob == 0:
            continue
        if _accepts(op, values[y], values[target]):
            out[target] = out.get(target, 0) + prob
        else:
            stay += prob
    if stay:
        out[y] = out.get(y, 0) + stay
    return out


def solve(a, b):
    """Gauss-Jordan elimination over Fractions."""
    size = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(size):
        piv = next(r for r in range(col, size) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(size):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[i][size] for i in range(size)]


def hitting_times(values, partner, switch):
    """Expected runtime from every (layer >= 1, slot) state.

    ``switch[s][s2]`` are Fractions; slot 0 is OI, slot 1 the partner.
    Returns a dict keyed by (y, s).
    """
    n = len(values) - 1
    states = [(y, s) for y in range(1, n + 1) for s in (0, 1)]
    index = {st: i for i, st in enumerate(states)}
    a = [[Fraction(0)] * len(states) for _ in states]
    b = [Fraction(1)] * len(states)
    for (y, s), i in index.items():
        a[i][i] += 1
        op = "OI" if s == 0 else partner
        for y2, pm in transitions(values, op, y).items():
            if y2 == 0:
                continue
            for s2 in (0, 1):
                a[i][index[(y2, s2)]] -= pm * switch[s][s2]
    t = solve(a, b)
    return {st: t[index[st]] for st in states}


def uniform_start_time(values, partner, switch, initial_partner=Fraction(0)):
    n = len(values) - 1
    times = hitting_times(values, partner, switch)
    from math import comb

    total = Fraction(0)
    for y in range(1, n + 1):
        w = Fraction(comb(n, y), 2**n)
        total += w * ((1 - initial_partner) * times[(y, 0)] + initial_partner * times[(y, 1)])
    return total


def phase_end_law(values, op, rate, start, terms=4000):
    """Law of the end layer of one phase by summing the length distribution."""
    n = len(values) - 1
    law = [0.0] * (n + 1)
    law[start] = 1.0
    move = [{k: float(v) for k, v in transitions(values, op, y).items()} for y in range(n + 1)]
    out = [0.0] * (n + 1)
    keep = 1.0
    for _ in range(terms):
        new = [0.0] * (n + 1)
        for y, mass in enumerate(law):
            if mass:
                for y2, pm in move[y].items():
                    new[y2] += mass * pm
        law = new
        for y in range(n + 1):
            out[y] += keep * rate * law[y]
        keep *= 1 - rate
        if keep < 1e-18:
            break
    return out


def all_strings(n):
    return [list(bits) for bits in product((0, 1), repeat=n)]
