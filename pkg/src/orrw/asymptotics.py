"""Limit constants for the range moments and numerical asymptotic checks.

``J_l(c) = int_0^inf x^(l-1) sech(x)^c dx`` (the same integral as
``2^c int x^(l-1) (e^x / (e^(2x) + 1))^c dx``), ``K_l = (l+1) J_{l+1} / 2^((l+1)/2)``
and ``E[(R_n / sqrt n)^l] -> J_l(c) / (2^((l-2)/2) Gamma(l/2))``.
"""

from dataclasses import dataclass
from fractions import Fraction
import heapq
import math

import numpy as np

from . import genfun
from .walk import ReinforcementParams

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class LimitConstants:
    c: float
    ell: int
    J: float
    K: float
    M: float
    quad_error: float


@dataclass(frozen=True)
class Quadrature:
    value: float
    error: float
    cutoff: float
    panels: int


def _check_c(c):
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")


def log_sech(x):
    """``log(sech x)`` for ``x >= 0`` without overflow."""
    return -x - math.log1p(math.exp(-2.0 * x)) + math.log(2.0)


def tail_bound(c, ell, X):
    """Bound on ``int_X^inf x^(ell-1) sech(x)^c dx`` using ``sech x <= 2 e^-x``.

    ``2^c c^-ell Gamma(ell, c X)`` with the finite-sum form of the upper
    incomplete gamma function at integer order.
    """
    y = c * X
    partial = math.fsum(y ** k / math.factorial(k) for k in range(ell))
    return 2.0 ** c * math.factorial(ell - 1) * math.exp(-y) * partial / c ** ell


def _panel(fn, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * math.fsum(w * fn(mid + half * t) for t, w in zip(_GL_NODES, _GL_WEIGHTS))


def adaptive_quad(fn, a, b, abs_tol, max_panels=20000):
    """Globally adaptive interval halving with a 20-point Gauss-Legendre rule.

    The error of a panel is estimated by ``|whole - (left + right)|``;
    the panel with the largest estimate is split until the sum of the
    estimates is below ``abs_tol``.
    """
    whole = _panel(fn, a, b)
    heap = []

    def push(lo, hi, est):
        mid = 0.5 * (lo + hi)
        left, right = _panel(fn, lo, mid), _panel(fn, mid, hi)
        err = abs(est - (left + right))
        heapq.heappush(heap, (-err, lo, hi, left + right, left, right))
        return err

    total_err = push(a, b, whole)
    while total_err > abs_tol and len(heap) < max_panels:
        neg_err, lo, hi, _, left, right = heapq.heappop(heap)
        total_err += neg_err
        mid = 0.5 * (lo + hi)
        total_err += push(lo, mid, left)
        total_err += push(mid, hi, right)
    value = math.fsum(item[3] for item in heap)
    return value, max(math.fsum(-item[0] for item in heap), 0.0), len(heap)


def sech_moment(c, ell, abs_tol=1e-13):
    """``int_0^inf x^(ell-1) sech(x)^c dx`` with a certified cutoff."""
    _check_c(c)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    X = 1.0
    while tail_bound(c, ell, X) > abs_tol / 2:
        X *= 1.25

    def integrand(x):
        if x == 0.0:
            return 1.0 if ell == 1 else 0.0
        return math.exp((ell - 1) * math.log(x) + c * log_sech(x))

    value, err, panels = adaptive_quad(integrand, 0.0, X, abs_tol / 2)
    return Quadrature(value, err + tail_bound(c, ell, X), X, panels)


def j_ell(c, ell, abs_tol=1e-13):
    return sech_moment(c, ell, abs_tol).value


def k_ell(c, ell, abs_tol=1e-13):
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return (ell + 1) * j_ell(c, ell + 1, abs_tol) / 2.0 ** ((ell + 1) / 2)


def half_integer_gamma(twice_arg: int) -> float:
    """``Gamma(twice_arg / 2)`` from ``Gamma(1/2) = sqrt(pi)``, ``Gamma(1) = 1`` and ``Gamma(x+1) = x Gamma(x)``."""
    if twice_arg < 1:
        raise ValueError("twice_arg must be >= 1")
    m = twice_arg
    coef = Fraction(1)
    while m > 2:
        m -= 2
        coef *= Fraction(m, 2)
    base = math.sqrt(math.pi) if m == 1 else 1.0
    return float(coef) * base


def moment_limit_coefficient(ell):
    """``1 / (2^((ell-2)/2) Gamma(ell/2))``."""
    return 1.0 / (2.0 ** ((ell - 2) / 2) * half_integer_gamma(ell))


def moment_limit(c, ell, abs_tol=1e-13):
    """``lim E[(R_n / sqrt n)^ell]``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return moment_limit_coefficient(ell) * j_ell(c, ell, abs_tol)


def limit_constants(c, ell, abs_tol=1e-13) -> LimitConstants:
    """``J_ell``, ``K_{ell-1}`` and the moment limit, sharing one quadrature."""
    q = sech_moment(c, ell, abs_tol)
    K = ell * q.value / 2.0 ** (ell / 2)
    return LimitConstants(float(c), ell, q.value, K, moment_limit_coefficient(ell) * q.value, q.error)


def catalan(abs_tol=1e-15):
    """Catalan's constant by the Euler transform of ``sum (-1)^n / (2n+1)^2``.

    The forward differences are exact rationals. ``1 / (2n+1)^2`` is a
    Hausdorff moment sequence, so the transformed terms
    ``|Delta^k a_0| / 2^(k+1)`` at least halve each step and the remainder
    after the last term kept is at most that term.
    """
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    a = []
    total = Fraction(0)
    k = 0
    while True:
        a.append(Fraction(1, (2 * k + 1) ** 2))
        diff = sum(((-1) ** j) * math.comb(k, j) * a[j] for j in range(k + 1))
        term = diff / 2 ** (k + 1)
        total += term
        if term <= abs_tol / 2:
            return float(total)
        k += 1


def catalan_partial(n_terms):
    """Plain partial sum of ``n_terms`` terms and the next term (error bound)."""
    s = Fraction(0)
    for n in range(n_terms):
        s += Fraction((-1) ** n, (2 * n + 1) ** 2)
    return float(s), 1.0 / (2 * n_terms + 1) ** 2


@dataclass
class TauberianReport:
    N: np.ndarray
    rho: np.ndarray
    rho_prime: np.ndarray | None


def tauberian_check(a, A, alpha) -> TauberianReport:
    """Ratios of partial sums and of terms to their Tauberian predictions.

    ``a[0]`` is ``a_1``. ``rho[N-1] = sum_{k<=N} a_k / (A N^alpha / Gamma(alpha+1))``
    and, when ``alpha > 1``, ``rho_prime[N-1] = a_N / (A alpha / Gamma(alpha+1) N^(alpha-1))``.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("sequence must be nonnegative")
    if A <= 0:
        raise ValueError("A must be positive")
    N = np.arange(1, a.size + 1, dtype=float)
    g1 = math.gamma(alpha + 1.0)
    rho = np.cumsum(a) / (A * N ** alpha / g1)
    rho_prime = None
    if alpha > 1:
        if np.any(np.diff(a) < 0):
            raise ValueError("term ratio needs a nondecreasing sequence")
        rho_prime = a / (A * alpha / g1 * N ** (alpha - 1.0))
    return TauberianReport(N.astype(int), rho, rho_prime)


@dataclass(frozen=True)
class BlowupRow:
    s: float
    H: float
    tail_bound: float
    K: float
    ratio: float


def blowup_check(ell, c, s_grid, rel_tol=1e-12):
    """``H_ell(s) (1-s)^((ell+3)/2) / K_ell`` along ``s_grid``."""
    s_grid = [float(s) for s in s_grid]
    if any(b <= a for a, b in zip(s_grid, s_grid[1:])):
        raise ValueError("s_grid must be increasing")
    params = ReinforcementParams(c)
    K = k_ell(c, ell)
    rows = []
    for s in s_grid:
        tol = min(rel_tol, (1.0 - s) * 1e-3)
        hv = genfun.h_ell(ell, s, params, rel_tol=tol)
        scale = (1.0 - s) ** ((ell + 3) / 2)
        rows.append(BlowupRow(s, hv.value, hv.tail_bound, K, hv.value * scale / K))
    return rows
