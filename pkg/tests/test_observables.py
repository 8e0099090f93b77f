import math

import pytest

from cbsduality import (PhysParams, QuadratureSpec, Regime, derive,
                        distinguishability_analytic, duality_sum_analytic,
                        full_report, predictability, visibility,
                        visibility_asymptotic)


SPEC = QuadratureSpec(order=48)


def test_visibility_one_without_recoil():
    p = PhysParams(delta=0.3, omega_ho=1e-4, omega_R=0.0, mu=1.0, nbar=0.0)
    vis = visibility(p, SPEC)
    assert vis.value == pytest.approx(1.0, abs=1e-12)


def test_visibility_thermal_law():
    # V ~ sqrt(1 - 2 xi_cl^2) at resonance; remainder is O(xi^4) with a
    # measured coefficient near 4.4 on V^2 (about 2.2 on V)
    xi2, theta = 0.05, 0.01
    omega = math.sqrt(xi2 * theta * 0.25 / 8.0)
    p = PhysParams(delta=0.0, omega_ho=omega, omega_R=omega, theta=theta)
    vis = visibility(p, SPEC)
    assert abs(vis.value**2 - (1 - 2 * xi2)) <= 8 * xi2**2
    assert vis.value == pytest.approx(math.sqrt(0.90), abs=3 * xi2**2)


def test_predictability_symmetric_geometry():
    p = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.01, mu=0.0, nbar=0.0)
    assert predictability(p, SPEC).value == 0.0


def test_predictability_matches_rho_at_leading_order():
    # T = 0, mu = 1, delta = 1/2, chi = 0.0141...: P = |rho| up to a few chi^2
    p = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.01, mu=1.0, nbar=0.0)
    d = derive(p)
    pred = predictability(p, SPEC)
    assert abs(d.rho) == pytest.approx(0.04, abs=2e-7)
    assert pred.value == pytest.approx(abs(d.rho), abs=4 * d.chi**2)


def test_predictability_at_resonance_is_second_order():
    # P(delta=0) is O(chi^2) with a measured coefficient near 12
    chi = 0.04
    p = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=chi * 0.5, mu=1.0, nbar=0.0)
    pred = predictability(p, SPEC)
    assert pred.value <= 15 * chi**2


def test_distinguishability_analytic_values():
    # zero-T arithmetic: sqrt(0.04^2 + 2*0.0008)
    p = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.01, mu=1.0, nbar=0.0)
    d = derive(p)
    assert d.rho == pytest.approx(0.04, abs=1e-7)
    val = distinguishability_analytic(p, Regime.ZERO_T)
    assert val == pytest.approx(math.sqrt(d.rho**2 + 2 * d.zeta_sq), rel=1e-12)
    # finite-T arithmetic: (2/sqrt(pi)) * (1/sqrt(2)) * 0.1 = 0.0797885
    zeta_sq = derive(PhysParams(delta=0.5, omega_ho=1e-4, omega_R=1e-3)).zeta_sq
    from cbsduality import solve_theta_for_xi_sq
    theta = solve_theta_for_xi_sq(0.01, zeta_sq)
    pt = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=1e-3, theta=theta)
    assert distinguishability_analytic(pt, Regime.FINITE_T) == \
        pytest.approx(0.0797884, abs=2e-6)
    # vanishes at resonance
    p0 = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=1e-3, theta=theta)
    assert distinguishability_analytic(p0, Regime.FINITE_T) == 0.0


def test_visibility_asymptotic_values():
    p = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=0.0, nbar=0.0)
    assert visibility_asymptotic(p, Regime.ZERO_T) == 1.0
    p2 = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.01, mu=1.0, nbar=0.0)
    d = derive(p2)
    assert visibility_asymptotic(p2, Regime.ZERO_T) == pytest.approx(
        math.sqrt(1 - d.rho**2 - 2 * d.zeta_sq), rel=1e-12)


def test_duality_sum_analytic():
    from cbsduality import solve_theta_for_xi_sq
    zeta_sq = derive(PhysParams(delta=0.0, omega_ho=1e-4, omega_R=1e-3)).zeta_sq
    theta = solve_theta_for_xi_sq(0.05, zeta_sq)
    p = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=1e-3, theta=theta)
    assert duality_sum_analytic(p) == pytest.approx(1 - 2 * 0.05, rel=1e-6)
    # xi_cl = 0 restores saturation
    p0 = PhysParams(delta=0.7, omega_ho=1e-4, omega_R=1e-3, nbar=0.0)
    assert duality_sum_analytic(p0) == 1.0
    # the bracket never reaches zero: delta^2/|gamma|^2 < 1 < pi/2
    for delta in (0.0, 1.0, 10.0, 1e4):
        pd = PhysParams(delta=delta, omega_ho=1e-4, omega_R=1e-3, theta=theta)
        bracket = (1.0 - duality_sum_analytic(pd)) / (2 * derive(pd).xi_cl_sq)
        assert 1 - 2 / math.pi < bracket <= 1.0 + 1e-12


def test_full_report_trivial_point():
    p = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=0.0, mu=0.0, nbar=0.0)
    rep = full_report(p, SPEC)
    assert rep.V == pytest.approx(1.0, abs=1e-12)
    assert rep.P == 0.0
    assert rep.D_analytic == 0.0
    assert rep.duality_sum == pytest.approx(1.0, abs=1e-12)
    assert rep.converged and rep.flags == ()
    assert rep.D_regime == "zeroT"


def test_full_report_consistency_with_closed_form():
    # delta = 1/2, xi_cl = 0.1: quadrature sum matches the closed form to
    # O(xi^4) plus quadrature error
    from cbsduality import solve_theta_for_xi_sq
    zeta_sq = derive(PhysParams(delta=0.5, omega_ho=1e-4, omega_R=1e-3)).zeta_sq
    theta = solve_theta_for_xi_sq(0.01, zeta_sq)
    p = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=1e-3, theta=theta)
    rep = full_report(p, SPEC)
    assert rep.D_regime == "finiteT"
    assert abs(rep.duality_sum - duality_sum_analytic(p)) <= 1e-3


def test_visibility_monotone_in_temperature():
    from cbsduality import solve_theta_for_xi_sq
    vals = []
    for xi2 in (0.02, 0.08, 0.3):
        zeta_sq = derive(PhysParams(delta=0.0, omega_ho=1e-4,
                                    omega_R=1e-3)).zeta_sq
        theta = solve_theta_for_xi_sq(xi2, zeta_sq)
        p = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=1e-3, theta=theta)
        vals.append(visibility(p, SPEC).value)
    assert vals[0] > vals[1] > vals[2]


def test_parity_in_mu_and_delta():
    def report(delta, mu):
        p = PhysParams(delta=delta, omega_ho=1e-4, omega_R=0.01, mu=mu,
                       nbar=0.0)
        return full_report(p, SPEC)

    r_plus = report(0.5, 1.0)
    r_minus = report(0.5, -1.0)
    assert r_plus.V == pytest.approx(r_minus.V, rel=1e-12)
    assert r_plus.P == pytest.approx(r_minus.P, rel=1e-12)
    # detuning reflection is exact only without recoil: the recoil shift
    # moves the effective resonance one way, so evenness in delta holds to
    # O(chi^3) (chi^3 = 2.8e-6 here; measured asymmetry ~1.4e-6)
    r_dm = report(-0.5, 1.0)
    chi3 = derive(PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.01,
                             mu=1.0)).chi ** 3
    assert r_plus.V == pytest.approx(r_dm.V, abs=2 * chi3)
    assert r_plus.P == pytest.approx(r_dm.P, abs=2 * chi3)
    # and exactly even once recoil is absent
    p_nr = PhysParams(delta=0.5, omega_ho=1e-4, omega_R=0.0, mu=1.0, nbar=0.0)
    p_nr2 = PhysParams(delta=-0.5, omega_ho=1e-4, omega_R=0.0, mu=1.0, nbar=0.0)
    assert full_report(p_nr, SPEC).V == pytest.approx(
        full_report(p_nr2, SPEC).V, rel=1e-12)


def test_regime_flags():
    deep = PhysParams(delta=0.0, omega_ho=0.5, omega_R=0.0, nbar=0.0)
    assert "shallow-trap" in full_report(deep, QuadratureSpec(order=8)).flags
    hot_shallow = PhysParams(delta=0.0, omega_ho=1e-4, omega_R=1e-3, theta=0.5)
    assert "finite-t-regime" in full_report(hot_shallow,
                                            QuadratureSpec(order=8)).flags
