from fractions import Fraction
import math

import numpy as np
import pytest

import oracles
from orrw import exact
from orrw.walk import ReinforcementParams as RP


def test_small_values():
    t = exact.range_moments(RP(1), 3, 2, mode="rational")
    assert t.exact
    assert t.value(1, 1) == 1
    assert t.value(2, 1) == Fraction(3, 2)
    assert t.value(3, 1) == Fraction(7, 4)
    assert t.power[3, 0] == 1


@pytest.mark.parametrize("c", [Fraction(1, 3), 1, 5])
def test_rational_vs_enumeration(c):
    t = exact.range_moments(RP(c), 14, 2, mode="rational")
    brute1 = oracles.orrw_range_moments(c, 14, 1)
    brute2 = oracles.orrw_range_moments(c, 14, 2)
    assert [t.power[n, 1] for n in range(15)] == brute1
    assert [t.power[n, 2] for n in range(15)] == brute2


def test_rising_columns():
    t = exact.range_moments(RP(2), 12, 2, mode="rational")
    for n in range(1, 13):
        assert t.rising[n, 1] == t.power[n, 2] + t.power[n, 1]
    assert exact.rising(4, 2) == 4 * 5 * 6
    three = exact.range_moments(RP(1), 3, 2, mode="rational")
    assert exact.rising_factorial_moment(RP(1), 3, 1) == three.power[3, 2] + three.power[3, 1]


def test_evolve_mass_and_pruning():
    p = RP(0.5)
    d = exact.StateDistribution()
    for _ in range(40):
        d = exact.evolve(d, p, eps_prune=1e-6)
    # total() counts the pruned mass too
    assert math.isclose(d.total(), 1.0, abs_tol=1e-12)
    assert d.pruned_mass > 0
    assert math.isclose(sum(d.range_marginal().values()), 1.0 - d.pruned_mass, abs_tol=1e-12)


def test_float_dp_certified(backend):
    p = RP(Fraction(3, 2))
    rat = exact.range_moments(p, 200, 2, mode="rational")
    flt = exact.range_moments(RP(1.5), 200, 2, eps_prune=1e-9, mode="float", backend=backend)
    assert flt.pruned[200] > 0
    for n in (50, 200):
        for ell in (1, 2):
            truth = float(rat.power[n, ell])
            # pruning only removes mass, so the float value is a lower bound
            assert flt.value(n, ell) <= truth * (1 + 1e-13)
            assert truth - flt.value(n, ell) <= flt.error_bound(n, ell) + 1e-12 * truth


def test_backends_agree():
    import orrw._backend as be
    names = be.available()
    tabs = [exact.range_moments(RP(0.7), 500, 2, mode="float", backend=b) for b in names]
    for t in tabs[1:]:
        np.testing.assert_allclose(t.power, tabs[0].power, rtol=1e-12)


def test_first_passage_pmf_sums():
    pmf = exact.first_passage_pmf(RP(1), 3, 60)
    assert sum(pmf.pmf) + pmf.residual == 1
    ref, alive = oracles.orrw_passage_pmf(1, 0, 0, 3, 60)
    assert pmf.pmf == ref and pmf.residual == alive


def test_mode_validation():
    with pytest.raises(ValueError):
        exact.range_moments(RP(0.3), 5, 1, mode="rational")
    with pytest.raises(ValueError):
        exact.first_passage_pmf(RP(1), 0, 5)
