"""Replicated estimation with reproducible parallelism.

Replicate ``j`` always uses stream ``seed.stream + j``; threads only decide
which contiguous block of streams a worker runs. Per-replicate values are
gathered in stream order and reduced with ``math.fsum`` (correctly rounded),
so results do not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import os

import numpy as np
from scipy import stats

from . import _backend, asymptotics, exact, walk
from ._rng import ALGORITHM, SeedSpec


def default_threads():
    env = os.environ.get("ORRW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    stderr: float
    reps: int
    seed: SeedSpec
    ell: int
    n: int
    c: float
    metadata: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    ell: int
    c: float
    estimate: float
    stderr: float
    limit: float
    ratio: float
    source: str


def _blocks(reps, threads):
    threads = max(1, min(threads, reps))
    edges = np.linspace(0, reps, threads + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _parallel(fn, reps, threads):
    blocks = _blocks(reps, threads)
    if len(blocks) == 1:
        return fn(*blocks[0])
    with ThreadPoolExecutor(len(blocks)) as pool:
        parts = list(pool.map(lambda ab: fn(*ab), blocks))
    return np.concatenate(parts)


def simulate_ranges(params, n, reps, seed=SeedSpec(), threads=None, backend=None):
    """``R_n`` for each of ``reps`` replicates, in stream order."""
    threads = default_threads() if threads is None else threads

    def run(a, b):
        return walk.range_batch(params, n, seed.offset(a), b - a, backend)

    return _parallel(run, reps, threads)


def summarize(values):
    """Mean and standard error with exactly rounded sums."""
    values = np.asarray(values, dtype=float)
    m = values.size
    mean = math.fsum(values) / m
    var = math.fsum((values - mean) ** 2) / (m - 1)
    return mean, math.sqrt(var / m)


def _metadata(threads, backend):
    return {"rng": ALGORITHM, "threads": threads,
            "backend": _backend.get(backend).NAME}


def estimate_moments(params, n, ells, reps, seed=SeedSpec(), threads=None,
                     max_steps=walk.DEFAULT_MAX_STEPS, backend=None):
    """Estimates of ``E[(R_n / sqrt n)^l]`` for every ``l`` in ``ells`` from one batch."""
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_steps:
        raise walk.StepCapExceeded(max_steps, replicate=0)
    threads = default_threads() if threads is None else threads
    scaled = simulate_ranges(params, n, reps, seed, threads, backend) / math.sqrt(n)
    meta = _metadata(threads, backend)
    out = {}
    for ell in ells:
        mean, se = summarize(scaled ** ell)
        out[ell] = EstimatorResult(mean, se, reps, seed, ell, n, float(params.c), meta)
    return out


def estimate_moment(params, n, ell, reps, seed=SeedSpec(), threads=None,
                    max_steps=walk.DEFAULT_MAX_STEPS, backend=None) -> EstimatorResult:
    return estimate_moments(params, n, [ell], reps, seed, threads, max_steps, backend)[ell]


def convergence_study(params, n_grid, ell, mode="exact", reps=10_000, seed=SeedSpec(),
                      eps_prune=exact.DEFAULT_EPS_PRUNE, threads=None, backend=None):
    """Scaled moment vs its limit along ``n_grid``.

    In exact mode ``stderr`` holds the certified DP error bound (scaled);
    the exact value lies in ``[estimate, estimate + stderr]``.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])) or n_grid[0] < 1:
        raise ValueError("n_grid must be a positive increasing sequence")
    c = float(params.c)
    limit = asymptotics.moment_limit(c, ell)
    rows = []
    if mode == "exact":
        table = exact.range_moments(walk.ReinforcementParams(c), n_grid[-1], ell,
                                    eps_prune, mode="float", backend=backend)
        for n in n_grid:
            scale = n ** (ell / 2)
            est = float(table.value(n, ell)) / scale
            err = table.error_bound(n, ell) / scale
            rows.append(ConvergenceRow(n, ell, c, est, err, limit, est / limit, "exact"))
    elif mode == "mc":
        for i, n in enumerate(n_grid):
            res = estimate_moment(params, n, ell, reps, seed.offset(i * reps), threads,
                                  backend=backend)
            rows.append(ConvergenceRow(n, ell, c, res.mean, res.stderr, limit,
                                       res.mean / limit, "mc"))
    else:
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    return rows


@dataclass
class GoodnessOfFit:
    mode: str
    chi2: float
    dof: int
    p_value: float
    support: list
    observed: list
    expected: list


@dataclass
class FirstPassageComparison:
    k: int
    c: float
    reps: int
    n_max: int
    residual: float
    fits: dict


def _pmf_covering(params, k, coverage=0.999, n_start=64):
    n_max = n_start
    while True:
        pmf = exact.first_passage_pmf(params, k, n_max)
        if float(pmf.residual) <= 1.0 - coverage:
            return pmf
        n_max *= 2


def bin_support(probs, reps, min_expected=5.0):
    """Support points whose expected count is at least ``min_expected``; the
    rest is pooled into one trailing bin. Returns (points, probabilities)."""
    points, p = [], []
    for n, q in enumerate(probs):
        if q * reps >= min_expected:
            points.append(n)
            p.append(q)
    return points, p


def chi_square_gof(samples, points, probs, mode=""):
    samples = np.asarray(samples)
    idx = {n: i for i, n in enumerate(points)}
    observed = np.zeros(len(points) + 1)
    lookup = np.full(int(samples.max(initial=0)) + 1, len(points))
    for n, i in idx.items():
        if n < lookup.size:
            lookup[n] = i
    np.add.at(observed, lookup[samples], 1)
    exp_p = np.append(probs, max(0.0, 1.0 - math.fsum(probs)))
    expected = exp_p * samples.size
    keep = expected > 0
    if observed[~keep].sum():
        return GoodnessOfFit(mode, math.inf, int(keep.sum()) - 1, 0.0, list(points),
                             observed.tolist(), expected.tolist())
    stat = float(np.sum((observed[keep] - expected[keep]) ** 2 / expected[keep]))
    dof = int(keep.sum()) - 1
    p = float(stats.chi2.sf(stat, dof)) if dof > 0 else 1.0
    return GoodnessOfFit(mode, stat, dof, p, list(points), observed.tolist(), expected.tolist())


def compare_first_passage(params, k, reps, seed=SeedSpec(),
                          modes=("direct", "decomposition"), min_expected=5.0,
                          threads=None, backend=None) -> FirstPassageComparison:
    """Chi-square fit of sampled ``S_k`` against the exact DP law."""
    threads = default_threads() if threads is None else threads
    pmf = _pmf_covering(walk.ReinforcementParams(float(params.c)), k)
    probs = [float(p) for p in pmf.pmf]
    points, p = bin_support(probs, reps, min_expected)
    fits = {}
    for mode in modes:
        def run(a, b, mode=mode):
            return walk.first_passage_batch(params, k, seed.offset(a), b - a, mode,
                                            backend=backend)
        samples = _parallel(run, reps, threads)
        fits[mode] = chi_square_gof(samples, points, p, mode)
    return FirstPassageComparison(k, float(params.c), reps, len(pmf.pmf) - 1,
                                  float(pmf.residual), fits)


def two_sample_chi2(a, b, min_count=5):
    """Homogeneity test of two integer samples on their pooled support."""
    a, b = np.asarray(a), np.asarray(b)
    top = int(max(a.max(), b.max())) + 1
    ca, cb = np.bincount(a, minlength=top), np.bincount(b, minlength=top)
    tot = ca + cb
    keep = tot >= min_count
    rest = ~keep
    table = np.array([np.append(ca[keep], ca[rest].sum()), np.append(cb[keep], cb[rest].sum())])
    table = table[:, table.sum(axis=0) > 0]
    stat, p, dof, _ = stats.chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(p)
