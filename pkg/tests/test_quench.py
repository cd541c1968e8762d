"""Lorentz 型クエンチの Kibble-Zurek 解析のテスト."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.emp import solve_numeric_emp
from src.errors import DomainError, ValidationError
from src.profiles import InitialCondition, closed_form_emp, lorentz_rational_b2
from src.quench import (
    QuenchSetup,
    adiabatic_b2_scaled,
    b2_scaled,
    count_delta_b2_zeros,
    critical_b2,
    delta_b2,
    delta_b2_zeros,
    fermion_observable,
    find_delta_b2_zeros,
    kz_time,
    landau_ratio,
    late_time,
    late_time_physical,
    quench_profile,
    quench_report,
    subregion_entropy_proxy,
)

SQRT3 = QuenchSetup.from_beta(math.sqrt(3.0))


class TestQuenchSetup:
    """QuenchSetup のテスト."""

    def test_beta(self) -> None:
        """β = αε であること."""
        q = QuenchSetup(alpha=2.0, eps=1.5)
        assert q.beta == pytest.approx(3.0)
        assert q.index == pytest.approx(math.sqrt(10.0))

    def test_from_beta(self) -> None:
        """from_beta が ε を保って α を決めること."""
        q = QuenchSetup.from_beta(9.0, eps=3.0)
        assert q.alpha == pytest.approx(3.0)
        assert q.beta == pytest.approx(9.0)

    def test_conversions(self) -> None:
        """s = t/ε の往復変換."""
        q = QuenchSetup(alpha=1.0, eps=2.0)
        assert q.to_time(3.0) == 6.0
        assert q.to_scaled(6.0) == 3.0
        np.testing.assert_allclose(q.to_scaled(q.to_time([0.0, 1.0, 2.5])), [0.0, 1.0, 2.5])

    @pytest.mark.parametrize("alpha, eps", [(0.0, 1.0), (1.0, -1.0), (math.inf, 1.0)])
    def test_validation(self, alpha: float, eps: float) -> None:
        """α, ε が正の有限値でなければ ValidationError となること."""
        with pytest.raises(ValidationError):
            QuenchSetup(alpha=alpha, eps=eps)


class TestB2Scaled:
    """b2_scaled のテスト."""

    def test_initial(self) -> None:
        """s = 0 で 1 となること."""
        assert b2_scaled(QuenchSetup.from_beta(4.0), 0.0) == pytest.approx(1.0)

    def test_negative_s(self) -> None:
        """s < 0 が DomainError となること."""
        with pytest.raises(DomainError):
            b2_scaled(SQRT3, -1.0)

    @pytest.mark.parametrize("beta, eps", [(9.0, 1.0), (math.sqrt(15.0), 0.5), (0.3, 2.0)])
    def test_matches_closed_form(self, beta: float, eps: float) -> None:
        """QuenchedLorentz (a = αε², t₀ = 0) の閉形式と一致すること."""
        q = QuenchSetup.from_beta(beta, eps)
        sol = closed_form_emp(quench_profile(q))
        for s in np.linspace(0.0, 20.0, 41):
            assert b2_scaled(q, s) == pytest.approx(sol.b(s * eps) ** 2, rel=1e-12, abs=1e-12)

    def test_matches_ode(self) -> None:
        """数値解と 1e-8 で一致すること."""
        q = QuenchSetup.from_beta(3.0)
        sol = solve_numeric_emp(quench_profile(q), InitialCondition(0.0), (0.0, 10.0), tol=1e-12)
        for s in np.linspace(0.0, 10.0, 51):
            assert b2_scaled(q, s) == pytest.approx(sol.b(s) ** 2, rel=1e-8)

    def test_rational_form(self) -> None:
        """β = √3 で 1 + s⁴/(1+s²) となること."""
        for s in np.linspace(0.0, 50.0, 101):
            assert b2_scaled(SQRT3, s) == pytest.approx(lorentz_rational_b2(1.0, s), rel=1e-12)

    def test_vectorized(self) -> None:
        """配列入力で要素ごとの値を返すこと."""
        s = np.array([0.0, 1.0, 7.0])
        np.testing.assert_allclose(b2_scaled(SQRT3, s), [b2_scaled(SQRT3, v) for v in s])


class TestDeltaB2:
    """delta_b2 のテスト."""

    def test_zero_at_start(self) -> None:
        """s = 0 で 0 となること."""
        assert delta_b2(SQRT3, 0.0) == 0.0

    def test_definition(self) -> None:
        """Δb² = b²_ad - b² であること."""
        q = QuenchSetup.from_beta(9.0)
        s = np.linspace(0.0, 30.0, 61)
        np.testing.assert_allclose(
            delta_b2(q, s), adiabatic_b2_scaled(s) - b2_scaled(q, s), atol=1e-9
        )

    def test_sqrt3(self) -> None:
        """β = √3 で Δb² = s²/(1+s²) となること."""
        s = np.linspace(0.0, 100.0, 201)
        np.testing.assert_allclose(delta_b2(SQRT3, s), s**2 / (1 + s**2), rtol=0, atol=1e-12)

    def test_limit_one(self) -> None:
        """β = √(4k²-1) (k = 2) で Δb²(s → ∞) → 1 となること."""
        q = QuenchSetup.from_beta(math.sqrt(15.0))
        assert delta_b2(q, 1e6) == pytest.approx(1.0, abs=1e-5)

    @pytest.mark.parametrize("beta", [0.1, 1.0, 3.0, 9.0, 50.0])
    def test_non_negative(self, beta: float) -> None:
        """Δb² ≥ 0 であること."""
        assert np.all(delta_b2(QuenchSetup.from_beta(beta), np.linspace(0.0, 200.0, 2001)) >= 0)


class TestZeros:
    """Δb² の零点のテスト."""

    @pytest.mark.parametrize("beta, expected", [(3.0, 1), (9.0, 4)])
    def test_count(self, beta: float, expected: int) -> None:
        """零点の数が ⌈λ/2⌉ - 1 と一致すること."""
        q = QuenchSetup.from_beta(beta)
        assert len(delta_b2_zeros(q)) == expected
        assert math.ceil(q.index / 2) - 1 == expected
        assert count_delta_b2_zeros(q) == expected

    def test_numeric_zeros_match(self) -> None:
        """数値的な零点が tan(kπ/λ) と一致し、Δb² が消えること."""
        q = QuenchSetup.from_beta(9.0)
        numeric = find_delta_b2_zeros(q)
        np.testing.assert_allclose(numeric, delta_b2_zeros(q), rtol=1e-10)
        for s in numeric:
            assert delta_b2(q, s) == pytest.approx(0.0, abs=1e-12)


class TestKzTime:
    """kz_time と臨界点のテスト."""

    def test_convention(self) -> None:
        """s_c = β, t_c = αε²/2 であること."""
        q = QuenchSetup(alpha=2.0, eps=3.0)
        result = kz_time(q)
        assert result.s_c == pytest.approx(6.0)
        assert result.t_c == pytest.approx(9.0)

    @pytest.mark.parametrize("beta", [0.5, 3.0, 9.0])
    def test_exact_root(self, beta: float) -> None:
        """|ω̇|/ω² = 1 の厳密解が s = β/2 であること."""
        q = QuenchSetup.from_beta(beta, eps=2.0)
        result = kz_time(q)
        assert result.s_exact == pytest.approx(beta / 2, rel=1e-12)
        assert result.t_exact == pytest.approx(beta, rel=1e-12)
        assert landau_ratio(q, result.s_exact) == pytest.approx(1.0)

    def test_landau_ratio_numeric(self) -> None:
        """|ω̇|/ω² が周波数プロファイルの差分と一致すること."""
        q = QuenchSetup(alpha=1.5, eps=2.0)
        profile = quench_profile(q)
        h = 1e-6
        for s in (0.5, 2.0, 7.0):
            t = s * q.eps
            slope = (profile.omega(t + h) - profile.omega(t - h)) / (2 * h)
            assert abs(slope) / profile.omega(t) ** 2 == pytest.approx(
                landau_ratio(q, s), rel=1e-6
            )

    @pytest.mark.parametrize("beta", [1.0, 9.0, math.sqrt(15.0)])
    def test_critical_b2(self, beta: float) -> None:
        """b²(s_c) = β² + cos²(λ·arctan β) であること."""
        q = QuenchSetup.from_beta(beta)
        assert b2_scaled(q, q.beta) == pytest.approx(critical_b2(q), rel=1e-12)

    def test_slow_regime(self) -> None:
        """β ≫ 1 で b²(s_c)/β² → 1 となること."""
        q = QuenchSetup.from_beta(50.0)
        ratio = critical_b2(q) / q.beta**2
        assert 1.0 <= ratio <= 1.0 + 4e-4 + 1e-15


class TestLateTime:
    """late_time のテスト."""

    def test_fast_regime(self) -> None:
        """β = 0.01, s = 100 で厳密値との差が 5e-3 未満であること."""
        q = QuenchSetup.from_beta(0.01)
        assert abs(late_time(q, 100.0) - b2_scaled(q, 100.0)) < 5e-3

    def test_physical_time(self) -> None:
        """物理時間の展開が s 表示と一致し、ε → 0 で 1 + α²t² に近づくこと."""
        q = QuenchSetup(alpha=0.5, eps=0.02)
        t = 4.0
        assert late_time_physical(q.alpha, q.eps, t) == pytest.approx(late_time(q, t / q.eps))
        assert late_time_physical(0.5, 1e-9, t) == pytest.approx(1.0 + 0.25 * t * t, rel=1e-8)


class TestObservables:
    """fermion_observable / subregion_entropy_proxy / quench_report のテスト."""

    def test_observable_is_b2(self) -> None:
        """⟨Ô⟩ の代理値が b² そのものであること."""
        s = np.linspace(0.0, 10.0, 11)
        np.testing.assert_array_equal(fermion_observable(SQRT3, s), b2_scaled(SQRT3, s))

    def test_observable_at_critical(self) -> None:
        """β = 50 で ⟨Ô⟩(s_c)/β² ∈ [0.99, 1.01] となること."""
        q = QuenchSetup.from_beta(50.0)
        assert 0.99 <= fermion_observable(q, q.beta) / q.beta**2 <= 1.01

    def test_observable_grows(self) -> None:
        """β = √3 で s > 1 では単調増加すること."""
        values = fermion_observable(SQRT3, np.linspace(1.0, 100.0, 500))
        assert np.all(np.diff(values) > 0)

    def test_subregion_proxy(self) -> None:
        """b⁻¹(s) を返すこと."""
        assert subregion_entropy_proxy(SQRT3, 0.0) == pytest.approx(1.0)
        assert subregion_entropy_proxy(SQRT3, 2.0) == pytest.approx(1 / math.sqrt(1 + 16 / 5))

    def test_report(self) -> None:
        """レポートの系列が Δb² = b²_ad - b² を満たすこと."""
        q = QuenchSetup.from_beta(9.0)
        report = quench_report(q, np.linspace(0.0, 100.0, 201))
        np.testing.assert_allclose(report.delta, report.b2_ad - report.b2, atol=1e-8)
        assert report.kz.s_c == pytest.approx(9.0)
        assert report.b2_at_critical == pytest.approx(critical_b2(q))
        assert report.late_coefficients == pytest.approx((81.0, -81.0 * math.pi / 2, 82.0))
