"""Hermetic invariant suite behind ``orrw selftest``.

Every check is deterministic (pinned seeds, fixed sizes) and its detail
string depends only on computed values, so two runs with the same seed give
byte-identical reports whatever the thread count.
"""

from fractions import Fraction
import math

import numpy as np

from . import __version__, asymptotics, exact, genfun, montecarlo, walk
from ._rng import ALGORITHM, SeedSpec
from .walk import ReinforcementParams, WalkState

CHECKS = []


def check(fn):
    CHECKS.append(fn)
    return fn


def _fmt(x):
    return format(float(x), ".17g")


@check
def kernel_cases(seed, threads):
    p = ReinforcementParams(3)
    got = [walk.transition_prob_up(WalkState(0, 0, 0), p),
           walk.transition_prob_up(WalkState(5, 1, 3), p),
           walk.transition_prob_up(WalkState(5, 5, 5), p)]
    return got == [1, Fraction(1, 2), Fraction(1, 4)], "p_up = " + ", ".join(map(str, got))


@check
def evolve_conserves_mass(seed, threads):
    p = ReinforcementParams(Fraction(1, 2))
    dist = exact.StateDistribution()
    for _ in range(30):
        dist = exact.evolve(dist, p)
    ok = dist.total() == 1 and all((x - dist.n) % 2 == 0 and 0 <= x <= r <= dist.n
                                   for x, r in dist.mass)
    return ok, f"{len(dist.mass)} states at n=30, total={dist.total()}"


@check
def rational_dp_matches_enumeration(seed, threads):
    worst = []
    for c in (Fraction(1, 2), 1, 2):
        p = ReinforcementParams(c)
        table = exact.range_moments(p, 14, 2, mode="rational")
        brute = exact.path_enumeration_moments(p, 14, 2)
        worst.append(all(table.power[n, l] == brute[n][l] for n in range(15) for l in range(3)))
    return all(worst), "n<=14, c in {1/2,1,2}: exact equality " + str(worst)


@check
def float_dp_matches_rational(seed, threads):
    p = ReinforcementParams(Fraction(1, 2))
    rat = exact.range_moments(p, 80, 2, mode="rational")
    flt = exact.range_moments(ReinforcementParams(0.5), 80, 2, mode="float")
    err = max(abs(float(rat.power[n, l]) - flt.power[n, l]) / max(1.0, float(rat.power[n, l]))
              for n in range(81) for l in range(3))
    return err <= 1e-12, f"max rel diff {_fmt(err)}"


@check
def root_identities(seed, threads):
    worst = 0.0
    for s in np.geomspace(1e-3, 1 - 1e-6, 41):
        s = float(min(s, 0.999999))
        r = genfun.root_r(s)
        worst = max(worst,
                    abs(r - 0.5 * s * (r * r + 1.0)) / r,
                    abs(0.5 * (r + 1.0 / r) - 1.0 / s) * s,
                    abs(math.sqrt((1 - s) * (1 + s)) / s - 0.5 * (r - 1.0 / r)) * s)
    return worst <= 1e-14, f"max rel residual {_fmt(worst)}"


@check
def dual_forms(seed, threads):
    p = ReinforcementParams(1.5)
    worst = 0.0
    for s in (0.1, 0.5, 0.9, 0.99, 0.9999):
        for x in (1, 2, 3, 10, 100, 1000):
            a, b = genfun.g(x, s), genfun.g_tanh(x, s)
            worst = max(worst, abs(a - b) / abs(a))
            a, b = genfun.G(x, s, p), genfun.G_tanh(x, s, p)
            worst = max(worst, abs(a - b) / abs(a))
    return worst <= 1e-12, f"max rel diff {_fmt(worst)}"


@check
def s_k_gf_vs_pmf(seed, threads):
    p = ReinforcementParams(1)
    worst = -math.inf
    for k in range(2, 7):
        pmf = exact.first_passage_pmf(p, k, 64)
        for s in (0.3, 0.5):
            gap = abs(pmf.pgf_partial(s) - genfun.s_k_gf(k, s, p))
            worst = max(worst, gap - (s ** 66 + float(pmf.residual)) - 1e-15)
    return worst <= 0, f"max excess over bound {_fmt(worst)}"


@check
def h0_vs_exact_partial_sums(seed, threads):
    p = ReinforcementParams(1)
    s, N = 0.5, 120
    table = exact.range_moments(ReinforcementParams(1.0), N, 1, eps_prune=0.0, mode="float")
    partial = math.fsum(s ** n * table.power[n, 1] for n in range(1, N + 1))
    tail = math.fsum(s ** n * n for n in range(N + 1, N + 400))
    hv = genfun.h_ell(0, s, p)
    ok = partial - hv.tail_bound - 1e-13 <= hv.value <= partial + tail + hv.tail_bound + 1e-13
    return ok, f"H0(0.5)={_fmt(hv.value)} partial={_fmt(partial)}"


@check
def closed_form_constants(seed, threads):
    j1 = asymptotics.j_ell(1, 1)
    j2 = asymptotics.j_ell(1, 2)
    G = asymptotics.catalan(1e-12)
    e1, e2 = abs(j1 - math.pi / 2), abs(j2 - 2 * G)
    return e1 < 1e-10 and e2 < 1e-10, f"J1(1)={_fmt(j1)} J2(1)={_fmt(j2)} 2G={_fmt(2 * G)}"


@check
def phi_integral_identity(seed, threads):
    worst = 0.0
    for x in (0.5, 1.0, 2.0, 5.0):
        q, _, _ = asymptotics.adaptive_quad(lambda y: genfun.phi(2 * y), 0.0, x, 1e-14)
        closed = math.log(math.exp(2 * x) + 1) - math.log(2) - x
        worst = max(worst, abs(q - closed))
    return worst <= 1e-12, f"max abs diff {_fmt(worst)}"


@check
def mc_vs_exact(seed, threads):
    p = ReinforcementParams(1.0)
    n, reps = 64, 20000
    res = montecarlo.estimate_moment(p, n, 1, reps, SeedSpec(seed), threads)
    ref = exact.range_moments(p, n, 1).value(n, 1) / math.sqrt(n)
    z = (res.mean - ref) / res.stderr
    return abs(z) < 4, f"mean={_fmt(res.mean)} stderr={_fmt(res.stderr)} exact={_fmt(ref)}"


@check
def mc_thread_invariance(seed, threads):
    p = ReinforcementParams(0.7)
    a = montecarlo.simulate_ranges(p, 50, 3001, SeedSpec(seed), threads=1)
    b = montecarlo.simulate_ranges(p, 50, 3001, SeedSpec(seed), threads=3)
    return bool(np.array_equal(a, b)), f"sum R = {int(a.sum())}"


@check
def first_passage_modes(seed, threads):
    p = ReinforcementParams(Fraction(1, 2))
    cmp = montecarlo.compare_first_passage(p, 3, 20000, SeedSpec(seed), threads=threads)
    ps = {m: f.p_value for m, f in cmp.fits.items()}
    return all(v > 1e-3 for v in ps.values()), " ".join(f"{m}:p={_fmt(v)}" for m, v in ps.items())


@check
def tauberian_trivial(seed, threads):
    r1 = asymptotics.tauberian_check(np.ones(50), 1.0, 1.0).rho
    r2 = asymptotics.tauberian_check(np.arange(1, 51), 1.0, 2.0).rho_prime
    ok = np.allclose(r1, 1.0, rtol=0, atol=1e-15) and np.allclose(r2, 1.0, rtol=0, atol=1e-15)
    return bool(ok), "constant and linear sequences"


def run(seed=0, threads=None):
    """Run every check; return ``(all_passed, report_text)``."""
    threads = montecarlo.default_threads() if threads is None else threads
    lines = [f"# orrw {__version__} selftest seed={seed} rng={ALGORITHM}"]
    passed = True
    for fn in CHECKS:
        try:
            ok, detail = fn(seed, threads)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        passed &= bool(ok)
        lines.append(f"{'PASS' if ok else 'FAIL'} {fn.__name__}: {detail}")
    lines.append(f"# {'ALL PASS' if passed else 'FAILURES'} ({len(CHECKS)} checks)")
    return passed, "\n".join(lines) + "\n"
