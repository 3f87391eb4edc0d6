import math

import pytest

from mcs_qkd import (
    DEFAULT_GRID,
    DomainError,
    FOCK_SUM,
    InsufficientTruncationError,
    Protocol,
    QUADRATURE,
    make_state,
    max_abs_diff_by_formula,
    mcs_state,
    p0_via_fock,
    p0_via_quadrature,
    p_vacuum_lossy,
    verify_closed_forms,
)


class TestFockSumOracle:
    def test_vacuum(self):
        assert p0_via_fock(make_state(0.0, 0.0), 0.7, 16) == 1.0

    def test_coherent_generating_function(self):
        # Poisson oracle: sum_n e^-a2 a2^n/n! (1-eta)^n = exp(-eta a2)
        assert p0_via_fock(make_state(0.5, 0.0), 0.5) == pytest.approx(
            math.exp(-0.125), abs=1e-12
        )

    def test_matches_closed_form_for_tuned_source(self):
        state = mcs_state(0.4, Protocol.BB84)
        assert p0_via_fock(state, 0.3) == pytest.approx(
            p_vacuum_lossy(state, 0.3), abs=1e-10
        )

    def test_insufficient_truncation_raises(self):
        with pytest.raises(InsufficientTruncationError):
            p0_via_fock(make_state(2.0, 0.8), 0.3, n_max=8)

    def test_cap_hit_with_negligible_tail_still_works(self):
        # the consecutive-smallness rule has not fired by n = 8, but the
        # unresolved mass is far below the 1e-10 gate
        state = make_state(0.3, 0.0)
        assert p0_via_fock(state, 0.5, n_max=8) == pytest.approx(
            math.exp(-0.5 * 0.09), abs=1e-12
        )

    @pytest.mark.parametrize("eta", [-0.01, 1.01])
    def test_rejects_bad_eta(self, eta):
        with pytest.raises(DomainError):
            p0_via_fock(make_state(0.5, 0.1), eta)

    def test_rejects_small_n_max(self):
        with pytest.raises(DomainError):
            p0_via_fock(make_state(0.5, 0.1), 0.5, n_max=4)

    @pytest.mark.parametrize("alpha,nu", [(0.5, 0.0), (1.0, 0.5), (2.0, 1.0)])
    def test_non_increasing_in_eta(self, alpha, nu):
        state = make_state(alpha, nu)
        etas = [i / 20 for i in range(21)]
        values = [p0_via_fock(state, eta) for eta in etas]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("nu", [0.0, 0.4, 1.0])
    def test_non_increasing_in_alpha(self, nu):
        alphas = [i / 10 for i in range(21)]
        values = [p0_via_fock(make_state(a, nu), 0.35) for a in alphas]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


class TestQuadratureOracle:
    def test_vacuum(self):
        assert p0_via_quadrature(make_state(0.0, 0.0), 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_coherent_limit(self):
        assert p0_via_quadrature(make_state(0.8, 0.0), 0.4) == pytest.approx(
            math.exp(-0.256), abs=1e-8
        )

    def test_matches_closed_form_for_tuned_source(self):
        state = mcs_state(0.5, Protocol.BB84)
        assert p0_via_quadrature(state, 0.25, 96) == pytest.approx(
            p_vacuum_lossy(state, 0.25), abs=1e-6
        )

    @pytest.mark.parametrize("eta", [0.0, 1.0, -0.2, 1.2])
    def test_rejects_degenerate_eta(self, eta):
        with pytest.raises(DomainError):
            p0_via_quadrature(make_state(0.5, 0.1), eta)

    def test_rejects_too_few_nodes(self):
        with pytest.raises(DomainError):
            p0_via_quadrature(make_state(0.5, 0.1), 0.5, nodes=16)

    @pytest.mark.parametrize("alpha,nu,eta", [(0.5, 0.3, 0.5), (2.0, 1.0, 0.05), (1.0, 0.8, 0.95)])
    def test_stable_under_node_doubling(self, alpha, nu, eta):
        state = make_state(alpha, nu)
        assert abs(
            p0_via_quadrature(state, eta, 96) - p0_via_quadrature(state, eta, 192)
        ) < 1e-8

    def test_agrees_with_fock_sum_on_grid(self):
        for alpha, nu, eta in DEFAULT_GRID:
            if not 0.0 < eta < 1.0:
                continue
            state = make_state(alpha, nu)
            assert abs(
                p0_via_fock(state, eta) - p0_via_quadrature(state, eta, 96)
            ) < 1e-6


class TestVerifyClosedForms:
    def test_empty_grid(self):
        assert verify_closed_forms([]) == []

    def test_default_grid_within_tolerances(self):
        reports = verify_closed_forms()
        assert reports
        for report in reports:
            assert report.within_tolerance, report

    def test_single_coherent_point_is_tight(self):
        reports = verify_closed_forms([(0.5, 0.0, 0.5)])
        fock = [r for r in reports if r.method == FOCK_SUM and r.formula == "p_vacuum_lossy"]
        assert len(fock) == 1
        assert fock[0].abs_diff < 1e-12

    def test_eta_endpoint_skips_quadrature(self):
        reports = verify_closed_forms([(0.5, 0.3, 0.0), (0.5, 0.3, 1.0)])
        assert all(r.method != QUADRATURE for r in reports)
        assert any(r.method == FOCK_SUM for r in reports)

    def test_abs_diff_is_exact(self):
        for report in verify_closed_forms([(1.0, 0.3, 0.5)]):
            assert report.abs_diff == abs(report.closed_form_value - report.oracle_value)

    def test_corruption_hook_is_detected(self):
        reports = verify_closed_forms([(0.5, 0.3, 0.5)], closed_form_offset=1e-6)
        assert any(not r.within_tolerance for r in reports)

    def test_max_by_formula_summary(self):
        reports = verify_closed_forms([(0.5, 0.3, 0.5)])
        worst = max_abs_diff_by_formula(reports)
        assert ("p_vacuum_lossy", FOCK_SUM) in worst
        assert ("p_vacuum_lossy", QUADRATURE) in worst
        assert all(diff < 1e-9 for diff in worst.values())
