"""Step-level ORRW simulation and first-passage sampling.

The walk lives on {0, 1, 2, ...}. From 0 it is pushed to 1; strictly inside
the visited set it is a fair coin; at the running maximum ``r > 0`` it steps
up with probability ``1 / (1 + c)``.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
from numbers import Rational, Real

import numpy as np

from . import _backend
from ._rng import SeedSpec, stream_keys

DEFAULT_MAX_STEPS = 10**9


class StepCapExceeded(RuntimeError):
    """A sampler hit ``max_steps`` before the target was reached."""

    def __init__(self, max_steps, replicate=None, k=None):
        self.max_steps = max_steps
        self.replicate = replicate
        self.k = k
        where = "" if replicate is None else f" (replicate {replicate})"
        super().__init__(f"step cap {max_steps} exceeded before range {k} was reached{where}")


@dataclass(frozen=True)
class ReinforcementParams:
    """Reinforcement parameter ``c > 0``.

    Integers and :class:`fractions.Fraction` keep exact arithmetic available
    to the rational DP; floats select floating point.
    """

    c: Real

    def __post_init__(self):
        c = self.c
        if isinstance(c, bool) or not isinstance(c, Real):
            raise TypeError(f"c must be a real number, got {c!r}")
        if not c > 0 or (isinstance(c, float) and not math.isfinite(c)):
            raise ValueError(f"c must be positive and finite, got {c!r}")

    @property
    def is_rational(self) -> bool:
        return isinstance(self.c, Rational)

    @property
    def p_front(self):
        """Probability of stepping up from the running maximum."""
        if self.is_rational:
            return Fraction(1) / (1 + Fraction(self.c))
        return 1.0 / (1.0 + self.c)

    @property
    def p_front_float(self) -> float:
        return float(self.p_front)

    @property
    def log_fail(self) -> float:
        """``log(c / (1 + c))``, the log-probability of a failed crossing."""
        c = float(self.c)
        return math.log(c) - math.log1p(c)


@dataclass(frozen=True)
class WalkState:
    n: int = 0
    x: int = 0
    r: int = 0

    def __post_init__(self):
        if not 0 <= self.x <= self.r <= self.n:
            raise ValueError(f"need 0 <= x <= r <= n, got {self}")
        if (self.x - self.n) % 2:
            raise ValueError(f"position {self.x} has the wrong parity at time {self.n}")


def transition_prob_up(state: WalkState, params: ReinforcementParams):
    if state.x == 0:
        return 1
    if state.x < state.r:
        return Fraction(1, 2) if params.is_rational else 0.5
    return params.p_front


def step(state: WalkState, params: ReinforcementParams, u: float) -> WalkState:
    x = state.x + (1 if u < transition_prob_up(state, params) else -1)
    return WalkState(state.n + 1, x, max(state.r, x))


@dataclass(frozen=True)
class RangeTrace:
    """Final range of one trajectory plus, optionally, its record times.

    ``increments`` is an ``(m, 2)`` array of ``(time, new_range)`` pairs.
    """

    n: int
    r: int
    increments: np.ndarray | None = None

    def sequence(self) -> np.ndarray:
        """Expand the increments to ``R_0, ..., R_n``."""
        if self.increments is None:
            raise ValueError("trajectory was simulated without record=True")
        seq = np.zeros(self.n + 1, dtype=np.int64)
        for t, r in self.increments:
            seq[t:] = r
        return seq


def simulate_range(params, n, seed=SeedSpec(), record=False, backend=None):
    if n < 0:
        raise ValueError("horizon n must be nonnegative")
    kern = _backend.get(backend)
    if record:
        times = kern.range_records(params.p_front_float, n, seed.key())
        inc = np.column_stack([times, np.arange(1, times.size + 1)]).astype(np.int64)
        return RangeTrace(n, int(times.size), inc.reshape(-1, 2))
    r = kern.range_batch(params.p_front_float, n, np.array([seed.key()], dtype=np.uint64))
    return RangeTrace(n, int(r[0]))


def range_batch(params, n, seed, reps, backend=None):
    """Final ranges for streams ``seed.stream .. seed.stream + reps - 1``."""
    keys = stream_keys(seed.seed, seed.stream, reps)
    return _backend.get(backend).range_batch(params.p_front_float, n, keys)


def first_passage_batch(params, k, seed, reps, mode="direct",
                        max_steps=DEFAULT_MAX_STEPS, backend=None):
    """``reps`` independent samples of ``S_k``, one per stream."""
    if k < 1:
        raise ValueError("target range k must be >= 1")
    kern = _backend.get(backend)
    keys = stream_keys(seed.seed, seed.stream, reps)
    pu = params.p_front_float
    if mode == "direct":
        out = kern.first_passage_direct(pu, k, keys, max_steps)
    elif mode == "decomposition":
        out = kern.first_passage_decomp(pu, params.log_fail, k, keys, max_steps)
    else:
        raise ValueError(f"mode must be 'direct' or 'decomposition', got {mode!r}")
    bad = np.flatnonzero(out < 0)
    if bad.size:
        raise StepCapExceeded(max_steps, replicate=int(bad[0]), k=k)
    return out


def sample_first_passage(params, k, seed=SeedSpec(), mode="direct",
                         max_steps=DEFAULT_MAX_STEPS, backend=None) -> int:
    return int(first_passage_batch(params, k, seed, 1, mode, max_steps, backend)[0])
