import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraccd.errors import InvalidInterval, NonIntegrableTail, SingularityTooStrong
from fraccd.gamma_ops import FracParams, gamma2
from fraccd.profiles import CounterexampleSpec, make_u_eps
from fraccd.quadrature import (
    OperatorValue,
    QuadratureConfig,
    integrate_adaptive,
    integrate_singular_kernel,
    integrate_wedge,
)

from oracles import brute_force_wedge


def test_power_tail_gives_inverse_eps():
    r = integrate_adaptive(lambda h: h ** -1.1, 1.0, math.inf, tail_exponent=-1.1)
    assert r.value == pytest.approx(10.0, rel=1e-8)
    assert r.uncertainty < 1e-6 * 10


def test_lorentzian_over_real_line():
    r = integrate_adaptive(lambda h: 1.0 / (1.0 + h * h), -math.inf, math.inf, tail_exponent=-2.0)
    assert r.value == pytest.approx(math.pi, rel=1e-8)


def test_constant_on_unit_interval():
    r = integrate_adaptive(lambda h: np.ones_like(h), 0.0, 1.0)
    assert r.value == pytest.approx(1.0, rel=1e-12)
    assert r.tail_bound == 0.0


def test_quadratic_numerator_cancels_kernel():
    r = integrate_singular_kernel(lambda h: h * h, 1.0, upper=1.0)
    assert r.value == pytest.approx(1.0, rel=1e-10)


def test_piecewise_power_numerator():
    r = integrate_singular_kernel(lambda h: np.minimum(h * h, 1.0), 0.5, growth_exponent=0.0,
                                  breakpoints=[1.0])
    assert r.value == pytest.approx(8.0 / 3.0, rel=1e-7)


def test_exponential_wedge_equals_one():
    r = integrate_wedge(lambda h, s: np.exp(-h) * np.ones_like(s), outer_tail_exponent=-40.0)
    assert r.value == pytest.approx(1.0, rel=1e-8)


def test_log_divergent_wedge_is_rejected():
    with pytest.raises(NonIntegrableTail):
        integrate_wedge(lambda h, s: s / h**3, outer_tail_exponent=-1.0)


def test_reversed_interval_is_rejected():
    with pytest.raises(InvalidInterval):
        integrate_adaptive(lambda h: h, 1.0, 0.0)


def test_infinite_range_needs_decaying_tail():
    with pytest.raises(NonIntegrableTail):
        integrate_adaptive(lambda h: 1.0 / h, 1.0, math.inf, tail_exponent=-1.0)


def test_kernel_singularity_too_strong():
    with pytest.raises(SingularityTooStrong):
        integrate_singular_kernel(lambda h: h, 1.5, q=1.0, upper=1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(split_radius=10.0, tail_cutoff=1.0)


def test_operator_value_arithmetic():
    a = OperatorValue(1.0, 0.1, 0.2, 3, True, 0.5)
    b = OperatorValue(2.0, 0.3, 0.4, 4, False, 0.25)
    s = a + b
    assert s.value == 3.0 and s.evaluations == 7 and not s.converged
    assert s.uncertainty == pytest.approx(1.0)
    neg = a.scaled(-2.0)
    assert neg.value == -2.0 and neg.quad_error == pytest.approx(0.2)


@pytest.mark.parametrize("p", [-1.5, -2.0, -3.25])
def test_extrapolated_tail_mass_is_exact_for_powers(p):
    cfg = QuadratureConfig(tail_cutoff=1e4)
    r = integrate_adaptive(lambda h: h**p, 1.0, math.inf, cfg, tail_exponent=p)
    exact = cfg.tail_cutoff ** (p + 1) / abs(p + 1)
    assert r.tail_estimate == pytest.approx(exact, rel=1e-12)


smooth = st.tuples(st.floats(0.2, 3.0), st.floats(-2.0, 2.0), st.floats(0.5, 4.0))


def _bumpish(a, c, w):
    return lambda h: a * np.exp(-((h - c) / w) ** 2)


@settings(max_examples=25, deadline=None)
@given(smooth, smooth, st.floats(-3.0, 3.0))
def test_linearity(p1, p2, alpha):
    f, g = _bumpish(*p1), _bumpish(*p2)
    cfg = QuadratureConfig(rel_tol=1e-10)
    rf = integrate_adaptive(f, -6.0, 6.0, cfg)
    rg = integrate_adaptive(g, -6.0, 6.0, cfg)
    rs = integrate_adaptive(lambda h: alpha * f(h) + g(h), -6.0, 6.0, cfg)
    budget = abs(alpha) * rf.uncertainty + rg.uncertainty + rs.uncertainty
    assert abs(rs.value - (alpha * rf.value + rg.value)) <= budget + 1e-13 * (1 + abs(rs.value))


@settings(max_examples=25, deadline=None)
@given(smooth)
def test_nonnegative_integrand_gives_nonnegative_value(p):
    f = _bumpish(*p)
    r = integrate_adaptive(lambda h: f(h) ** 2 * np.abs(np.sin(3 * h)), 0.0, math.inf,
                           tail_exponent=-10.0)
    assert r.value >= -r.uncertainty


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 1.7), st.floats(0.5, 3.0))
def test_halving_tolerance_stays_within_budget(beta, width):
    g = lambda h: 1.0 - np.exp(-((h / width) ** 2))
    coarse = integrate_singular_kernel(g, beta, QuadratureConfig(rel_tol=1e-6), growth_exponent=0.0)
    fine = integrate_singular_kernel(g, beta, QuadratureConfig(rel_tol=5e-7), growth_exponent=0.0)
    assert abs(fine.value - coarse.value) <= coarse.uncertainty + 1e-12 * abs(coarse.value)


def test_wedge_matches_tensor_grid_for_u_eps():
    # even-form bracket integrand of u_eps, truncated to a box where the grid sum converges
    u = make_u_eps(CounterexampleSpec(beta=1.0, eps=0.1))
    h_max = 3.0

    def F(h, s):
        plus = u(h + s) - u(h) - u(s)
        minus = u(h - s) - u(h) - u(s)
        return (plus**2 + minus**2) * (h * s) ** -2.0

    ref = brute_force_wedge(F, h_max, 1600)
    r = integrate_wedge(F, upper=h_max, breakpoints=[0.25, 0.75])
    assert r.value > 0
    assert r.value == pytest.approx(ref, rel=2e-3)
    full = gamma2(u, 0.0, FracParams(1.0))
    assert full.value > 0 and math.isfinite(full.value)
