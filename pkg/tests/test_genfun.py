from fractions import Fraction
import math

import pytest
from hypothesis import given, strategies as st

from orrw import exact, genfun
from orrw.walk import ReinforcementParams as RP

open_unit = st.floats(min_value=1e-6, max_value=1 - 1e-9)


def test_s2_example():
    assert genfun.s_k_gf(2, 0.6, RP(1)) == pytest.approx(9 / 41, rel=1e-15)
    assert genfun.s_k_gf(1, 0.6, RP(1)) == pytest.approx(0.6, rel=1e-15)


@given(open_unit)
def test_root_satisfies_quadratic(s):
    r = genfun.root_r(s)
    assert r >= 1
    assert r == pytest.approx(s / 2 * r * r + s / 2, rel=1e-12)
    assert genfun.d(s) == pytest.approx(math.log(r), rel=1e-12, abs=1e-15)


@given(open_unit)
def test_g_first_site_is_forced_step(s):
    assert genfun.g(1, s) == pytest.approx(s, rel=1e-13)


def test_d_matches_f():
    for t in (1e-10, 1e-4, 0.3):
        assert genfun.d(1 - t) == pytest.approx(genfun.f(t), rel=1e-6)
    assert genfun.f(1e-12) == pytest.approx(math.sqrt(2e-12), rel=1e-5)


def test_G_decreases_in_site():
    p = RP(2)
    vals = [genfun.G(x, 0.95, p) for x in range(1, 50)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(0 < v < 1 for v in vals)


def test_large_sites_stay_finite():
    assert genfun.g(5000, 0.999) == pytest.approx(genfun.g_tanh(5000, 0.999), rel=1e-12)
    assert math.isfinite(genfun.hitting_gf(3000, 0, 3000, 0.99))


def test_h0_against_exact_partial_sums():
    p = RP(Fraction(1, 2))
    s, N = 0.4, 80
    table = exact.range_moments(p, N, 1, mode="rational")
    partial = math.fsum(s ** n * float(table.power[n, 1]) for n in range(N + 1))
    tail = math.fsum(s ** n * n for n in range(N + 1, N + 200))
    hv = genfun.h_ell(0, s, p)
    # H_0(s) = sum_n s^n E[R_n]; R_n <= n bounds the unseen tail
    assert partial - hv.tail_bound - 1e-14 <= hv.value <= partial + tail + hv.tail_bound + 1e-14


def test_h_ell_certificate_failure():
    with pytest.raises(genfun.CertificateError):
        genfun.h_ell(1, 0.99999, RP(1), max_terms=10)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.5, 2.0])
def test_eval_point_rejects(s):
    with pytest.raises(ValueError):
        genfun.EvalPoint(s)


def test_argument_validation():
    with pytest.raises(ValueError):
        genfun.g(0, 0.5)
    with pytest.raises(ValueError):
        genfun.hitting_gf(0, 3, 2, 0.5)
    with pytest.raises(ValueError):
        genfun.h_ell(7, 0.5, RP(1))
    with pytest.raises(ValueError):
        genfun.phi(-1.0)
