"""Pure numpy/Python kernels.

Same signatures and the same random-draw schedule as the compiled ``_core``
module, so the two backends produce identical samples. The DP kernel agrees
with the compiled one to rounding (summation order differs).
"""

import math

import numpy as np

from ._rng import GOLDEN, MASK, mix64, mix64_array, to_unit

NAME = "python"

_GOLDEN = np.uint64(GOLDEN)


def range_batch(pu, n, keys):
    """Final range ``R_n`` of one walk per key."""
    keys = np.asarray(keys, dtype=np.uint64)
    x = np.zeros(keys.shape, dtype=np.int64)
    r = np.zeros(keys.shape, dtype=np.int64)
    state = keys.copy()
    for _ in range(n):
        with np.errstate(over="ignore"):
            state += _GOLDEN
        u = to_unit(mix64_array(state))
        p = np.where(x == 0, 1.0, np.where(x < r, 0.5, pu))
        x += np.where(u < p, 1, -1)
        np.maximum(r, x, out=r)
    return r


def range_records(pu, n, key):
    """Times at which the running maximum increased, for one walk."""
    key &= MASK
    x = r = 0
    out = []
    for t in range(1, n + 1):
        u = to_unit(mix64(key + t * GOLDEN))
        if x == 0:
            x = 1
        elif x < r:
            x += 1 if u < 0.5 else -1
        else:
            x += 1 if u < pu else -1
        if x > r:
            r = x
            out.append(t)
    return np.asarray(out, dtype=np.int64)


def first_passage_direct(pu, k, keys, max_steps):
    """``S_k`` by running the step kernel; -1 where ``max_steps`` was hit."""
    keys = np.asarray(keys, dtype=np.uint64)
    out = np.full(keys.shape, -1, dtype=np.int64)
    if k <= 0:
        out[:] = 0
        return out
    x = np.zeros(keys.shape, dtype=np.int64)
    r = np.zeros(keys.shape, dtype=np.int64)
    state = keys.copy()
    live = np.arange(keys.size)
    t = 0
    while live.size and t < max_steps:
        t += 1
        with np.errstate(over="ignore"):
            state += _GOLDEN
        u = to_unit(mix64_array(state[live]))
        xl, rl = x[live], r[live]
        p = np.where(xl == 0, 1.0, np.where(xl < rl, 0.5, pu))
        xl = xl + np.where(u < p, 1, -1)
        rl = np.maximum(rl, xl)
        x[live], r[live] = xl, rl
        done = rl >= k
        out[live[done]] = t
        live = live[~done]
    return out


def first_passage_decomp(pu, log_fail, k, keys, max_steps):
    """``S_k = 1 + sum T_i`` with geometric retries and reflected excursions.

    ``log_fail`` is ``log(c / (1 + c))``; the number of failed crossings of
    the frontier edge is drawn by inversion from a single uniform.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    out = np.empty(keys.shape, dtype=np.int64)
    for j, key in enumerate(keys.tolist()):
        out[j] = _decomp_one(log_fail, k, key, max_steps)
    return out


def _decomp_one(log_fail, k, key, max_steps):
    counter = 0

    def draw():
        nonlocal counter
        counter += 1
        return to_unit(mix64(key + counter * GOLDEN))

    s = 1
    for i in range(1, k):
        s += 1
        u = draw()
        fails = int(math.floor(math.log1p(-u) / log_fail)) if log_fail < 0.0 else 0
        for _ in range(fails):
            s += 1
            pos = i - 1
            while pos != i:
                if pos == 0:
                    pos = 1
                else:
                    pos += 1 if draw() < 0.5 else -1
                s += 1
                if s > max_steps:
                    return -1
        if s > max_steps:
            return -1
    return s


def dp_advance(P, Q, n, rlo, rhi, pu, eps, steps, pow_out, rise_out, pruned_out):
    """Advance the dense ``P[r, x]`` law ``steps`` times.

    ``P`` holds the law at time ``n`` on rows ``rlo..rhi``; ``Q`` is scratch of
    the same shape. Per step ``j``, ``pow_out[j, l]`` receives
    ``sum_r m_r r**l`` and ``rise_out[j, l]`` receives
    ``sum_r m_r r (r+1) ... (r+l)`` over the retained mass, and
    ``pruned_out[j]`` the mass of boundary rows (lowest or highest range)
    dropped because their total fell below ``eps``.

    Returns ``(rlo, rhi, swapped)``; when ``swapped`` the current law is in
    ``Q``.
    """
    L = pow_out.shape[1] - 1
    cap = P.shape[0] - 1
    src, dst = P, Q
    for j in range(steps):
        nlo, nhi = max(rlo, 1), rhi + 1
        if nhi > cap:
            raise ValueError("dp_advance: capacity exceeded")
        width = nhi + 1
        dst[nlo:nhi + 1, :width] = 0.0
        rows = np.arange(rlo, rhi + 1)
        cols = np.arange(width)
        old = src[rlo:rhi + 1, :width].copy()
        valid = cols[None, :] <= rows[:, None]
        old[~valid] = 0.0
        wup = np.where(cols[None, :] == 0, 1.0, 0.5) * (cols[None, :] < rows[:, None])
        wdn = np.where(cols[None, :] == rows[:, None], 1.0 - pu, 0.5) * (cols[None, :] >= 1)
        wdn = wdn * valid
        up = old * wup
        dn = old * wdn
        same = np.zeros_like(old)
        same[:, 1:] += up[:, :-1]
        same[:, :-1] += dn[:, 1:]
        lo_same = max(rlo, nlo)
        dst[lo_same:rhi + 1, :width] += same[lo_same - rlo:]
        diag = old[rows - rlo, rows]
        front = np.where(rows == 0, 1.0, pu) * diag
        dst[rows + 1, rows + 1] += front

        mass = dst[nlo:nhi + 1, :width].sum(axis=1)
        lo, hi = 0, mass.size - 1
        pruned = 0.0
        while lo < hi and mass[lo] < eps:
            pruned += mass[lo]
            lo += 1
        while hi > lo and mass[hi] < eps:
            pruned += mass[hi]
            hi -= 1
        pruned_out[j] = pruned
        mass = mass[lo:hi + 1]
        nlo, nhi = nlo + lo, nlo + hi
        rlo, rhi = nlo, nhi
        r = np.arange(nlo, nhi + 1, dtype=np.float64)
        pw = np.ones_like(r)
        rf = r.copy()
        for l in range(L + 1):
            pow_out[j, l] = float(np.dot(mass, pw))
            rise_out[j, l] = float(np.dot(mass, rf))
            pw = pw * r
            rf = rf * (r + l + 1)
        n += 1
        src, dst = dst, src
    return rlo, rhi, src is Q
