import math

import pytest

from fraccd.cd_analysis import (
    CDReport,
    Verdict,
    c0_constant,
    cd_check,
    kappa_ratio_scan,
    lemma_grid_violations,
    local_violation_scan,
    parallel_map,
    select_witness,
    sweep_eps,
    verify_dimension_reduction,
    verify_scaling,
    verify_translation,
)
from fraccd.errors import DomainError, NoViolationAtOrigin, SpecViolation
from fraccd.gamma_ops import CDParams, FracParams
from fraccd.profiles import CounterexampleSpec, bump_profile, gaussian_profile, make_v_N_eps
from fraccd.quadrature import OperatorValue


def _report(g2, g2_unc, L=10.0, n_dim=100.0, L_unc=0.0):
    return CDReport(0.0, OperatorValue(L, L_unc), None, OperatorValue(g2, g2_unc), 0.0, n_dim)


def test_verdict_rules():
    assert _report(0.5, 1e-6).verdict is Verdict.VIOLATED       # 0.5 < 100/100
    assert _report(2.0, 1e-6).verdict is Verdict.SATISFIED
    assert _report(1.0 + 1e-9, 1e-6).verdict is Verdict.INCONCLUSIVE
    assert _report(0.5, 1e-6).N_star == pytest.approx(200.0)
    assert math.isinf(_report(1e-9, 1e-6).N_star)


def test_uncertainty_propagates_laplacian_error():
    r = _report(0.5, 0.0, L=10.0, n_dim=100.0, L_unc=0.1)
    assert r.uncertainty == pytest.approx((2 * 10 * 0.1 + 0.01) / 100)
    d = r.to_dict()
    assert d["verdict"] == "VIOLATED" and d["Gamma"] is None


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv("FRACCD_THREADS", "4")
    assert parallel_map(lambda k: k * k, list(range(20))) == [k * k for k in range(20)]


def test_gaussian_satisfies_cd_zero_infinity():
    rep = cd_check(gaussian_profile(), 0.0, CDParams(0.0, math.inf), FracParams(1.0))
    assert rep.verdict is Verdict.SATISFIED


def test_lifted_check_keeps_effective_dimension():
    v = make_v_N_eps(CounterexampleSpec(1.0, 0.05, cutoff_N=8.0))
    one = cd_check(v, 0.0, CDParams(0.0, 50.0), FracParams(1.0, 1))
    three = cd_check(v, (0.0, 0.0, 0.0), CDParams(0.0, 50.0), FracParams(1.0, 3))
    assert three.N_star == pytest.approx(one.N_star, rel=1e-12)
    with pytest.raises(DomainError):
        cd_check(v, (0.5, 0.0), CDParams(), FracParams(1.0, 2))


def test_sweep_rows_sorted_and_bounded():
    rows = sweep_eps(1.0, [0.05, 0.1], decompose=False)
    assert [r.eps for r in rows] == [0.1, 0.05]
    for r in rows:
        assert r.eps_L >= c0_constant(1.0) - r.unc_L
        assert r.n_star > 0 and math.isnan(r.c_share)
    with pytest.raises(SpecViolation):
        sweep_eps(1.0, [0.6])


def test_c0_constant_at_beta_one():
    assert c0_constant(1.0) == pytest.approx(2 / math.pi, rel=1e-15)


def test_scaling_checks_pass_for_compact_profile():
    v = make_v_N_eps(CounterexampleSpec(1.0, 0.05, cutoff_N=4.0))
    checks = verify_scaling(v, 2.0, FracParams(1.0))
    assert [c.name for c in checks] == ["L", "Gamma", "Gamma2"]
    assert all(c.passed for c in checks)
    with pytest.raises(DomainError):
        verify_scaling(gaussian_profile(), 2.0, FracParams(1.0))


def test_translation_check():
    assert verify_translation(bump_profile(1.0), 0.4, FracParams(0.6)).passed


def test_dimension_reduction_for_bump():
    chk = verify_dimension_reduction(bump_profile(1.0), 1.0)
    assert chk.passed, chk.to_dict()


def test_curvature_term_fades_under_compression():
    v = make_v_N_eps(CounterexampleSpec(1.0, 0.05, cutoff_N=4.0))
    ratios = [r for _, r in kappa_ratio_scan(v, -1.0, [1.0, 4.0, 16.0], FracParams(1.0))]
    assert abs(ratios[0]) > abs(ratios[1]) > abs(ratios[2])
    assert abs(ratios[1] / ratios[0]) == pytest.approx(0.25, rel=1e-5)


def test_lemma_grid_small():
    counts = lemma_grid_violations(50)
    assert set(counts) == {"f_ge1", "g_ge1", "f_lt1", "g_lt1"}
    assert sum(counts.values()) == 0


def test_witness_with_fixed_parameters_is_reported_as_is():
    w = select_witness(1.0, 10.0, N=8.0, eps=0.05)
    assert w.evaluations == 1
    assert w.report.N_star > 0


def test_small_cutoff_cannot_reach_large_dimension():
    with pytest.raises(NoViolationAtOrigin):
        select_witness(1.0, 100.0, N=8.0, max_evals=6)


def test_local_scan_needs_origin_violation():
    v = make_v_N_eps(CounterexampleSpec(1.0, 0.05, cutoff_N=4.0))
    with pytest.raises(NoViolationAtOrigin):
        local_violation_scan(v, 0.01, FracParams(1.0))
    with pytest.raises(DomainError):
        local_violation_scan(gaussian_profile(), 0.01, FracParams(1.0))

