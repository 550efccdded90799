"""Brute-force references that share no code with the package.

Everything here enumerates paths (grouped only by identical weight) in
exact rational arithmetic.
"""

from fractions import Fraction
import math

HALF = Fraction(1, 2)


def orrw_paths(c, n_max):
    """Yield ``(n, R_n, probability)`` for every ORRW path prefix of length ``<= n_max``.

    Plain recursion over the path tree; one yield per path prefix.
    """
    c = Fraction(c)
    up_front = 1 / (1 + c)
    down_front = c / (1 + c)

    def rec(n, x, r, prob):
        yield n, r, prob
        if n == n_max:
            return
        if x == 0:
            yield from rec(n + 1, 1, max(r, 1), prob)
        elif x < r:
            yield from rec(n + 1, x + 1, r, prob * HALF)
            yield from rec(n + 1, x - 1, r, prob * HALF)
        else:
            yield from rec(n + 1, x + 1, x + 1, prob * up_front)
            yield from rec(n + 1, x - 1, r, prob * down_front)

    yield from rec(0, 0, 0, Fraction(1))


def orrw_range_moments(c, n_max, ell=1):
    """``E[R_n**ell]`` for ``n = 0..n_max`` by full path enumeration."""
    out = [Fraction(0)] * (n_max + 1)
    for n, r, prob in orrw_paths(c, n_max):
        out[n] += prob * r ** ell
    return out


def reflected_hitting_pmf(a, x, b, n_max):
    """``P_x(T_b = n)`` for the walk reflected at ``-a``, ``n <= n_max``.

    Paths are counted by (position, number of fair-coin steps); reflections
    at ``-a`` are deterministic. Returns ``(pmf, P(T_b > n_max))``.
    """
    pmf = [Fraction(0)] * (n_max + 1)
    if x == b:
        pmf[0] = Fraction(1)
        return pmf, Fraction(0)
    counts = {(x, 0): 1}
    for n in range(1, n_max + 1):
        new = {}
        for (pos, coins), m in counts.items():
            if pos == -a:
                nxt = [(pos + 1, coins)]
            else:
                nxt = [(pos + 1, coins + 1), (pos - 1, coins + 1)]
            for key in nxt:
                new[key] = new.get(key, 0) + m
        for key in [k for k in new if k[0] == b]:
            pmf[n] += Fraction(new.pop(key), 2 ** key[1])
        counts = new
    alive = sum(Fraction(m, 2 ** coins) for (_, coins), m in counts.items())
    return pmf, alive


def orrw_passage_pmf(c, start_x, start_r, target_r, n_max):
    """``P(first time the range reaches target_r = n)`` from ``(x, r)``, exact."""
    c = Fraction(c)
    pu = 1 / (1 + c)
    pmf = [Fraction(0)] * (n_max + 1)
    states = {(start_x, start_r): Fraction(1)}
    for n in range(1, n_max + 1):
        new = {}
        for (x, r), m in states.items():
            if x == 0:
                moves = [((1, max(r, 1)), m)]
            elif x < r:
                moves = [((x + 1, r), m * HALF), ((x - 1, r), m * HALF)]
            else:
                moves = [((x + 1, x + 1), m * pu), ((x - 1, r), m * (1 - pu))]
            for key, v in moves:
                new[key] = new.get(key, 0) + v
        for key in [k for k in new if k[1] >= target_r]:
            pmf[n] += new.pop(key)
        states = new
    return pmf, sum(states.values())


def pgf_bracket(pmf, residual, s):
    """Interval that must contain ``E[s^T]`` given the exact head of the law."""
    head = math.fsum(float(p) * s ** n for n, p in enumerate(pmf))
    return head, head + float(residual) * s ** len(pmf)


def catalan_reference():
    """Catalan's constant to 30 digits (mpmath)."""
    import mpmath

    mpmath.mp.dps = 30
    return float(mpmath.catalan)
