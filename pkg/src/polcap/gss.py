"""Golden-section maximization on a closed interval."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, xtol=1e-12):
    """Return the argmax of a unimodal f on [lo, hi] to within xtol.

    The interval endpoints are kept as candidates so boundary maxima are
    returned exactly.
    """
    a, b = float(lo), float(hi)
    if not b > a:
        return a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    mid = 0.5 * (a + b)
    candidates = [(f(mid), mid), (f(lo), float(lo)), (f(hi), float(hi))]
    return max(candidates, key=lambda pair: pair[0])[1]
