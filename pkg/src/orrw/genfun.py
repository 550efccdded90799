"""Closed-form generating functions of the ORRW hitting and record times.

Notation: ``r_s = (1 + sqrt(1 - s^2)) / s`` is the larger root of
``r = (s/2) r^2 + s/2`` and ``d_s = log r_s``. Powers of ``r_s`` are never
formed directly; ratios are rescaled so only ``exp(-k d_s)`` with ``k >= 0``
appears, which keeps ``x`` in the thousands finite.
"""

from dataclasses import dataclass
import math

from .walk import ReinforcementParams

DEFAULT_ELL_CAP = 6
_EPS = 2.0 ** -52


class CertificateError(ArithmeticError):
    """A certified truncation could not meet its tolerance."""


@dataclass(frozen=True)
class EvalPoint:
    s: float

    def __post_init__(self):
        s = float(self.s)
        if not 0.0 < s < 1.0:
            raise ValueError(f"s must lie in the open interval (0, 1), got {self.s!r}")
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class SeriesValue:
    """``value`` with the true sum inside ``value +/- tail_bound``."""

    value: float
    tail_bound: float
    terms_used: int


def _s(s) -> float:
    return s.s if isinstance(s, EvalPoint) else EvalPoint(s).s


def _sqrt_one_minus_sq(s):
    return math.sqrt((1.0 - s) * (1.0 + s))


def root_r(s) -> float:
    s = _s(s)
    return (1.0 + _sqrt_one_minus_sq(s)) / s


def d(s) -> float:
    """``log r_s``, accurate as ``s`` approaches 1."""
    s = _s(s)
    return math.log1p(_sqrt_one_minus_sq(s)) - math.log1p(-(1.0 - s)) if s > 0.5 else math.log(root_r(s))


def f(t: float) -> float:
    """``d`` as a function of ``t = 1 - s``; behaves like ``sqrt(2 t)`` for small ``t``."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    return math.log1p(math.sqrt(t * (2.0 - t))) - math.log1p(-t)


def phi(x: float) -> float:
    """``(e^x - 1) / (e^x + 1)``, i.e. ``tanh(x / 2)``."""
    if x < 0:
        raise ValueError("phi is used on x >= 0 only")
    if x < 1e-4:
        return math.tanh(0.5 * x)
    if x > 700.0:
        return 1.0
    return 1.0 - 2.0 / (math.exp(x) + 1.0)


def g(x: int, s) -> float:
    """``E[s^tau]`` for the reflected walk started at ``x - 1`` hitting ``x``.

    Ratio ``(r^(x-1) + r^(1-x)) / (r^x + r^-x)`` divided through by ``r^x``.
    """
    _check_site(x)
    s = _s(s)
    ds = d(s)
    e = math.exp(-2.0 * x * ds)
    return (math.exp(-ds) + math.exp((1.0 - 2.0 * x) * ds)) / (1.0 + e)


def g_tanh(x: int, s) -> float:
    """Same quantity as :func:`g` via ``s^-1 (1 - phi(2 x d_s) sqrt(1 - s^2))``."""
    _check_site(x)
    s = _s(s)
    return (1.0 - phi(2.0 * x * d(s)) * _sqrt_one_minus_sq(s)) / s


def G(x: int, s, params: ReinforcementParams) -> float:
    """``E[s^T_x]``, the pgf of the time spent at record ``x`` before ``x + 1``."""
    s = _s(s)
    c = float(params.c)
    return s / (1.0 + c - c * s * g(x, s))


def G_tanh(x: int, s, params: ReinforcementParams) -> float:
    s = _s(s)
    c = float(params.c)
    return s / (1.0 + c * phi(2.0 * x * d(s)) * _sqrt_one_minus_sq(s))


def hitting_gf(a: int, x: int, b: int, s) -> float:
    """``E_x[s^T_b]`` for a simple walk reflected at ``-a``."""
    if a < 0:
        raise ValueError("barrier offset a must be >= 0")
    if not -a <= x <= b:
        raise ValueError(f"need -a <= x <= b, got a={a}, x={x}, b={b}")
    ds = d(s)
    num = math.exp((x - b) * ds) + math.exp(-(2 * a + x + b) * ds)
    den = 1.0 + math.exp(-(2 * a + 2 * b) * ds)
    return num / den


def s_k_gf(k: int, s, params: ReinforcementParams) -> float:
    """``E[s^S_k] = s * prod_{i<k} G_i(s)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _s(s)
    logp = math.fsum(math.log(G(i, s, params)) for i in range(1, k))
    return s * math.exp(logp)


def h_ell(ell: int, s, params: ReinforcementParams, rel_tol: float = 1e-12,
          max_terms: int = 50_000_000, ell_cap: int = DEFAULT_ELL_CAP) -> SeriesValue:
    """``sum_n s^n E[R_n (R_n+1) ... (R_n+ell)]`` via the record-time series.

    Terms are ``k (k+1) ... (k+ell-1) * s prod_{i<k} G_i(s)``. Since ``G_i``
    decreases in ``i``, from ``K`` on each term is dominated by a geometric
    sequence with ratio ``(K + ell) / K * G_K(s)``; the series stops once
    that majorant's sum is below ``rel_tol`` times the partial sum.
    """
    if ell < 0 or ell > ell_cap:
        raise ValueError(f"ell must be in [0, {ell_cap}]")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    s = _s(s)
    c = float(params.c)
    ds = d(s)
    w = _sqrt_one_minus_sq(s)
    prefactor = (ell + 1) / (1.0 - s)

    def G_k(k):
        return s / (1.0 + c * phi(2.0 * k * ds) * w)

    total = 0.0
    comp = 0.0
    prod = s  # s * prod_{i<k} G_i
    k = 1
    while k <= max_terms:
        poly = 1.0
        for j in range(ell):
            poly *= k + j
        term = poly * prod
        # Neumaier summation
        t = total + term
        comp += (total - t) + term if abs(total) >= abs(term) else (term - t) + total
        total = t
        Gk = G_k(k)
        prod *= Gk
        k += 1
        rho = (k + ell) / k * Gk
        if rho < 1.0:
            poly_next = 1.0
            for j in range(ell):
                poly_next *= k + j
            tail = poly_next * prod / (1.0 - rho)
            value = total + comp
            if tail <= rel_tol * value:
                rounding = 4.0 * k * _EPS * value
                return SeriesValue(prefactor * value, prefactor * (tail + rounding), k - 1)
    raise CertificateError(
        f"h_ell(ell={ell}, s={s}, c={c}): tail bound not below {rel_tol} after {max_terms} terms")


def _check_site(x):
    if x < 1:
        raise ValueError(f"site x must be a positive integer, got {x!r}")
