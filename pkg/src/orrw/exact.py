"""Exact law of ``(X_n, R_n)`` by forward dynamic programming.

Two arithmetic modes:

* rational: integer numerators over the common denominator
  ``(2 (p + q))**n`` for ``c = p / q``; no pruning, results are Fractions;
* floating: a dense ``P[r, x]`` array advanced by the compiled (or numpy)
  kernel, with states below ``eps_prune`` zeroed and their mass tracked.

Pruning only ever removes mass, so a floating moment is a lower bound and
the true value lies in ``[value, value + error_bound]``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import _backend
from .walk import ReinforcementParams, transition_prob_up, WalkState

DEFAULT_EPS_PRUNE = 1e-14
RATIONAL_N_MAX = 512


@dataclass
class StateDistribution:
    """Probability mass over ``(x, r)`` at time ``n``."""

    n: int = 0
    mass: dict = field(default_factory=lambda: {(0, 0): 1})
    pruned_mass: float = 0.0

    def total(self):
        return sum(self.mass.values()) + self.pruned_mass

    def range_marginal(self):
        out = {}
        for (_, r), m in self.mass.items():
            out[r] = out.get(r, 0) + m
        return dict(sorted(out.items()))


def evolve(dist: StateDistribution, params: ReinforcementParams,
           eps_prune: float = 0.0) -> StateDistribution:
    """Push ``dist`` one step through the kernel.

    Works with Fraction or float masses. States whose new mass is below
    ``eps_prune`` are dropped and counted in ``pruned_mass``.
    """
    new = {}
    for (x, r), m in dist.mass.items():
        p = transition_prob_up(WalkState(dist.n, x, r), params)
        if p:
            key = (x + 1, max(r, x + 1))
            new[key] = new.get(key, 0) + m * p
        if p != 1:
            key = (x - 1, r)
            new[key] = new.get(key, 0) + m * (1 - p)
    pruned = dist.pruned_mass
    if eps_prune > 0:
        for key in [k for k, m in new.items() if m < eps_prune]:
            pruned += new.pop(key)
    return StateDistribution(dist.n + 1, new, pruned)


def rising(r, ell):
    """``r (r + 1) ... (r + ell)``."""
    out = r
    for j in range(1, ell + 1):
        out *= r + j
    return out


@dataclass
class MomentTable:
    """``E[R_m**l]`` and ``E[R_m (R_m+1) ... (R_m+l)]`` for ``m <= n_max``.

    Arrays are indexed ``[m, l]``; column ``l = 0`` of ``power`` is the
    retained mass. ``pruned[m]`` is the cumulative mass discarded by time
    ``m`` (always 0 in rational mode).
    """

    c: object
    n_max: int
    ell_max: int
    power: np.ndarray
    rising: np.ndarray
    pruned: np.ndarray
    exact: bool
    eps_prune: float

    def value(self, n, ell):
        return self.power[n, ell]

    def error_bound(self, n, ell):
        """Worst case: all mass pruned by time ``n`` sits at ``R_n = n``."""
        return float(self.pruned[n]) * float(n) ** ell

    def rising_value(self, n, ell):
        return self.rising[n, ell]

    def rising_error_bound(self, n, ell):
        return float(self.pruned[n]) * float(rising(n, ell))

    def rows(self, ells=None):
        """``(n, ell, value, error_bound)`` for ``n >= 1``."""
        ells = range(1, self.ell_max + 1) if ells is None else ells
        for n in range(1, self.n_max + 1):
            for ell in ells:
                yield n, ell, self.power[n, ell], self.error_bound(n, ell)


def _resolve_mode(params, n_max, mode):
    if mode == "auto":
        return "rational" if params.is_rational and n_max <= RATIONAL_N_MAX else "float"
    if mode not in ("rational", "float"):
        raise ValueError(f"mode must be 'auto', 'rational' or 'float', got {mode!r}")
    if mode == "rational" and not params.is_rational:
        raise ValueError("rational mode needs c given as an int or Fraction")
    return mode


def range_moments(params: ReinforcementParams, n_max: int, ell_max: int,
                  eps_prune: float = DEFAULT_EPS_PRUNE, mode: str = "auto",
                  backend=None) -> MomentTable:
    if n_max < 1 or ell_max < 1:
        raise ValueError("need n_max >= 1 and ell_max >= 1")
    mode = _resolve_mode(params, n_max, mode)
    if mode == "rational":
        return _rational_moments(params, n_max, ell_max)
    return _dense_moments(params, n_max, ell_max, eps_prune, backend)


def rising_factorial_moment(params, n, ell, eps_prune=DEFAULT_EPS_PRUNE, mode="auto"):
    """``E[R_n (R_n + 1) ... (R_n + ell)]``."""
    if n < 1 or ell < 0:
        raise ValueError("need n >= 1 and ell >= 0")
    return range_moments(params, n, max(ell, 1), eps_prune, mode).rising[n, ell]


def _rational_moments(params, n_max, ell_max):
    c = Fraction(params.c)
    p, q = c.numerator, c.denominator
    # weights over the common per-step denominator 2 (p + q)
    w_half, w_forced = p + q, 2 * (p + q)
    w_front_up, w_front_down = 2 * q, 2 * p
    denom = 2 * (p + q)

    power = np.empty((n_max + 1, ell_max + 1), dtype=object)
    rise = np.empty((n_max + 1, ell_max + 1), dtype=object)
    power[0, :] = [Fraction(1)] + [Fraction(0)] * ell_max
    rise[0, :] = Fraction(0)

    mass = {(0, 0): 1}
    for n in range(1, n_max + 1):
        new = {}
        for (x, r), m in mass.items():
            if x == 0:
                moves = (((1, max(r, 1)), m * w_forced),)
            elif x < r:
                moves = (((x + 1, r), m * w_half), ((x - 1, r), m * w_half))
            else:
                moves = (((x + 1, x + 1), m * w_front_up), ((x - 1, r), m * w_front_down))
            for key, v in moves:
                new[key] = new.get(key, 0) + v
        mass = new
        rows = {}
        for (_, r), m in mass.items():
            rows[r] = rows.get(r, 0) + m
        d = denom ** n
        for ell in range(ell_max + 1):
            power[n, ell] = Fraction(sum(m * r ** ell for r, m in rows.items()), d)
            rise[n, ell] = Fraction(sum(m * rising(r, ell) for r, m in rows.items()), d)
    return MomentTable(params.c, n_max, ell_max, power, rise,
                       np.zeros(n_max + 1), True, 0.0)


class DenseLaw:
    """Floating-point law of ``(X_n, R_n)`` on a growable dense array."""

    def __init__(self, params: ReinforcementParams, eps_prune=DEFAULT_EPS_PRUNE,
                 backend=None, capacity=64):
        self.params = params
        self.eps = float(eps_prune)
        self.kern = _backend.get(backend)
        self.n = 0
        self.rlo = self.rhi = 0
        self.pruned = 0.0
        self.P = np.zeros((capacity + 1, capacity + 1))
        self.Q = np.zeros_like(self.P)
        self.P[0, 0] = 1.0

    @property
    def capacity(self):
        return self.P.shape[0] - 1

    def _grow(self):
        cap = 2 * self.capacity
        P = np.zeros((cap + 1, cap + 1))
        lo, hi = self.rlo, self.rhi
        P[lo:hi + 1, :hi + 1] = self.P[lo:hi + 1, :hi + 1]
        self.P, self.Q = P, np.zeros_like(P)

    def advance(self, steps, ell_max):
        """Run ``steps`` steps; return per-step power, rising and pruned arrays."""
        power = np.empty((steps, ell_max + 1))
        rise = np.empty((steps, ell_max + 1))
        pruned = np.empty(steps)
        done = 0
        while done < steps:
            room = self.capacity - self.rhi
            if room <= 0:
                self._grow()
                continue
            chunk = min(steps - done, room)
            self.rlo, self.rhi, swapped = self.kern.dp_advance(
                self.P, self.Q, self.n, self.rlo, self.rhi,
                self.params.p_front_float, self.eps, chunk,
                power[done:done + chunk], rise[done:done + chunk], pruned[done:done + chunk])
            if swapped:
                self.P, self.Q = self.Q, self.P
            self.n += chunk
            done += chunk
        self.pruned += float(math.fsum(pruned))
        return power, rise, pruned

    def to_distribution(self) -> StateDistribution:
        mass = {}
        for r in range(self.rlo, self.rhi + 1):
            for x in range(self.n % 2, r + 1, 2):
                v = self.P[r, x]
                if v > 0.0:
                    mass[(x, r)] = float(v)
        return StateDistribution(self.n, mass, self.pruned)


def _dense_moments(params, n_max, ell_max, eps_prune, backend):
    law = DenseLaw(params, eps_prune, backend)
    power = np.zeros((n_max + 1, ell_max + 1))
    rise = np.zeros((n_max + 1, ell_max + 1))
    power[0, 0] = 1.0
    pw, rs, pr = law.advance(n_max, ell_max)
    power[1:], rise[1:] = pw, rs
    pruned = np.zeros(n_max + 1)
    pruned[1:] = np.cumsum(pr)
    return MomentTable(params.c, n_max, ell_max, power, rise, pruned, False, float(eps_prune))


@dataclass
class FirstPassagePmf:
    """``pmf[n] = P(S_k = n)`` for ``n <= n_max``; ``residual = P(S_k > n_max)``."""

    k: int
    pmf: list
    residual: object

    def pgf_partial(self, s):
        """``sum_{n <= n_max} pmf[n] s**n``; the truncation error is at most ``residual * s**(n_max+1)``."""
        return math.fsum(float(p) * s ** n for n, p in enumerate(self.pmf) if p)

    def tail_bound(self, s):
        return float(self.residual) * s ** (len(self.pmf))


def first_passage_pmf(params: ReinforcementParams, k: int, n_max: int) -> FirstPassagePmf:
    """Law of the first time the range reaches ``k``.

    Exact (Fractions) when ``c`` is rational, floating otherwise.
    """
    if k < 1:
        raise ValueError("target range k must be >= 1")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    one = Fraction(1) if params.is_rational else 1.0
    pmf = [one * 0] * (n_max + 1)
    dist = StateDistribution(0, {(0, 0): one}, 0)
    alive = one
    for n in range(1, n_max + 1):
        dist = evolve(dist, params)
        hit = 0
        for key in [key for key in dist.mass if key[1] >= k]:
            hit += dist.mass.pop(key)
        pmf[n] = one * hit
        alive -= hit
    return FirstPassagePmf(k, pmf, alive)


def path_enumeration_moments(params: ReinforcementParams, n_max: int, ell_max: int = 1):
    """Brute-force ``E[R_n**l]`` over every path of length ``<= n_max``.

    Each path's probability is tracked as exponents of the three per-step
    factors (1/2, 1/(1+c), c/(1+c)); exact when ``c`` is rational.
    Returns a list ``out[n][l]``.
    """
    c = Fraction(params.c) if params.is_rational else float(params.c)
    front_up = 1 / (1 + c)
    front_down = c / (1 + c)
    acc = [dict() for _ in range(n_max + 1)]
    # (depth, x, r, halves, ups, downs)
    stack = [(0, 0, 0, 0, 0, 0)]
    while stack:
        n, x, r, h, a, b = stack.pop()
        key = (r, h, a, b)
        acc[n][key] = acc[n].get(key, 0) + 1
        if n == n_max:
            continue
        if x == 0:
            stack.append((n + 1, 1, max(r, 1), h, a, b))
        elif x < r:
            stack.append((n + 1, x + 1, r, h + 1, a, b))
            stack.append((n + 1, x - 1, r, h + 1, a, b))
        else:
            stack.append((n + 1, x + 1, x + 1, h, a + 1, b))
            stack.append((n + 1, x - 1, r, h, a, b + 1))
    half = Fraction(1, 2) if params.is_rational else 0.5
    out = []
    for n in range(n_max + 1):
        row = [0] * (ell_max + 1)
        for (r, h, a, b), count in acc[n].items():
            prob = count * half ** h * front_up ** a * front_down ** b
            for ell in range(ell_max + 1):
                row[ell] += prob * r ** ell
        out.append(row)
    return out
