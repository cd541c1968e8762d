"""EMP 数値エンジンのテスト."""

from __future__ import annotations

import math
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from src.emp import (
    complex_B,
    emp_from_fundamental,
    fundamental_from_emp,
    integrate_fundamental,
    residual,
    solve_numeric_emp,
    solve_segmented,
    tau_of,
)
from src.errors import DomainError, QuadratureFailureError, StepFailureError, ValidationError
from src.profiles import (
    AbruptDrop,
    AbruptJump,
    ConstantFrequency,
    CustomFrequency,
    FrequencyProfile,
    InitialCondition,
    LorentzBell,
    QuenchedLorentz,
    QuenchedSechBump,
    SechBump,
    WindowedLorentz,
    closed_form_emp,
    sech_peak_tau,
)

TIGHT = 1e-12

# (プロファイル, 初期条件, 比較区間): 特性時間の 10 倍程度
CATALOG: list[tuple[FrequencyProfile, InitialCondition, tuple[float, float]]] = [
    (ConstantFrequency(omega0=1.0), InitialCondition(0.0), (0.0, 10.0)),
    (SechBump(a=1.0, eps=1.0), InitialCondition(0.0), (0.0, 10.0)),
    (SechBump(a=0.0, eps=1.0), InitialCondition(0.0), (0.0, 10.0)),
    (SechBump(a=1.0, eps=1.0), InitialCondition.remote_past(), (-10.0, 10.0)),
    (QuenchedSechBump(a=1.0, eps=1.0), InitialCondition(0.0), (-5.0, 10.0)),
    (LorentzBell(a=math.sqrt(3.0), eps=1.0), InitialCondition(0.0), (0.0, 10.0)),
    (LorentzBell(a=2.0, eps=1.3), InitialCondition(0.7), (0.7, 13.7)),
    (QuenchedLorentz(a=1.0, eps=1.0, t0=0.0), InitialCondition(0.0), (-5.0, 10.0)),
    (
        WindowedLorentz(a=math.sqrt(3.0), eps=1.0, t0=-1.0, t1=1.0),
        InitialCondition(-1.0),
        (-1.0, 10.0),
    ),
    (AbruptDrop(alpha=1.0), InitialCondition(0.0), (-5.0, 10.0)),
    (AbruptJump(omega0=2.0, omega1=1.0), InitialCondition(0.0), (-5.0, 10.0)),
]


class TestIntegrateFundamental:
    """integrate_fundamental のテスト."""

    def test_harmonic(self) -> None:
        """ω = 1 で x₁ = cos t, x₂ = sin t となること."""
        pair = integrate_fundamental(ConstantFrequency(omega0=1.0), 0.0, (0.0, 10.0), TIGHT)
        for t in np.linspace(0.0, 10.0, 51):
            assert pair.x1(t) == pytest.approx(math.cos(t), abs=1e-8)
            assert pair.x2(t) == pytest.approx(math.sin(t), abs=1e-8)

    def test_free_particle(self) -> None:
        """ω = 0 で x₁ = 1, x₂ = t となること."""
        pair = integrate_fundamental(ConstantFrequency(omega0=0.0), 0.0, (-3.0, 3.0), TIGHT)
        for t in np.linspace(-3.0, 3.0, 25):
            assert pair.x1(t) == pytest.approx(1.0, abs=1e-10)
            assert pair.x2(t) == pytest.approx(t, abs=1e-10)

    def test_lorentz_matches_rotated_square_root_family(self) -> None:
        """LorentzBell の基本解が閉形式解から復元した x₁, x₂ と一致すること."""
        profile = LorentzBell(a=1.5, eps=0.7)
        pair = integrate_fundamental(profile, 0.0, (-7.0, 7.0), TIGHT)
        sol = closed_form_emp(profile)
        for t in np.linspace(-7.0, 7.0, 57):
            x1, v1, x2, v2 = fundamental_from_emp(sol, t)
            state = pair.state(t)
            assert state[0] == pytest.approx(x1, abs=1e-8)
            assert state[1] == pytest.approx(v1, abs=1e-8)
            assert state[2] == pytest.approx(x2, abs=1e-8)
            assert state[3] == pytest.approx(v2, abs=1e-8)

    def test_wronskian_is_constant(self) -> None:
        """ロンスキアンが区間全体で 1 に保たれること."""
        profile = QuenchedSechBump(a=1.0, eps=1.0)
        pair = integrate_fundamental(profile, 0.0, (-5.0, 10.0), TIGHT)
        for t in np.linspace(-5.0, 10.0, 61):
            assert pair.wronskian_at(t) == pytest.approx(1.0, abs=1e-8)

    def test_splits_at_breakpoints(self) -> None:
        """不連続プロファイルでブレークポイントを区間境界にすること."""
        pair = integrate_fundamental(AbruptDrop(alpha=1.0), -2.0, (-5.0, 10.0), TIGHT)
        bounds = [(lo, hi) for lo, hi, _ in pair.trajectory.pieces]
        assert bounds == [(-5.0, -2.0), (-2.0, 0.0), (0.0, 10.0)]

    def test_t0_outside_window(self) -> None:
        """t0 が区間外なら ValidationError となること."""
        with pytest.raises(ValidationError):
            integrate_fundamental(ConstantFrequency(omega0=1.0), 20.0, (0.0, 10.0))

    def test_evaluation_outside_window(self) -> None:
        """区間外の評価が ValidationError となること."""
        pair = integrate_fundamental(ConstantFrequency(omega0=1.0), 0.0, (0.0, 1.0))
        with pytest.raises(ValidationError):
            pair.state(2.0)

    def test_step_failure(self) -> None:
        """ソルバーが失敗を返したら StepFailureError となること."""
        failed = MagicMock(success=False, message="Required step size is less than spacing")
        with patch("src.emp.solve_ivp", return_value=failed), pytest.raises(StepFailureError):
            integrate_fundamental(ConstantFrequency(omega0=1.0), 0.0, (0.0, 1.0))


class TestSolveSegmented:
    """solve_segmented のテスト."""

    def test_right_side_receives_one_sided_time(self) -> None:
        """右区間の積分で左端の時刻が右側に寄せられて渡されること."""
        seen: list[float] = []

        def fun(t: float, y: np.ndarray) -> tuple[float]:  # noqa: ARG001
            seen.append(t)
            return (1.0 if t > 0 else 0.0,)

        traj = solve_segmented(fun, (0.0,), 0.0, (0.0, 1.0), (0.0,))
        assert traj(1.0)[0] == pytest.approx(1.0, abs=1e-9)
        assert min(seen) > 0.0

    def test_non_positive_tolerance(self) -> None:
        """tol ≤ 0 が拒否されること."""
        with pytest.raises(ValidationError):
            solve_segmented(lambda t, y: y, (1.0,), 0.0, (0.0, 1.0), tol=0.0)  # noqa: ARG005


class TestEmpFromFundamental:
    """emp_from_fundamental のテスト."""

    def test_constant_frequency(self) -> None:
        """ω = c = 1 で b ≡ 1 となること."""
        pair = integrate_fundamental(ConstantFrequency(omega0=1.0), 0.0, (0.0, 10.0), TIGHT)
        sol = emp_from_fundamental(pair, 1.0)
        for t in np.linspace(0.0, 10.0, 21):
            assert sol.b(t) == pytest.approx(1.0, abs=1e-9)
            assert sol.b_dot(t) == pytest.approx(0.0, abs=1e-9)

    def test_abrupt_drop(self) -> None:
        """AbruptDrop で b = √(1+t²) となること."""
        pair = integrate_fundamental(AbruptDrop(alpha=1.0), 0.0, (0.0, 10.0), TIGHT)
        sol = emp_from_fundamental(pair, 1.0)
        for t in np.linspace(0.0, 10.0, 21):
            assert sol.b(t) == pytest.approx(math.sqrt(1.0 + t * t), rel=1e-9)

    def test_sech_peak_against_closed_form(self) -> None:
        """SechBump (a=ε=1, t0=0) の数値 b² が閉形式と 1e-8 で一致すること."""
        profile = SechBump(a=1.0, eps=1.0)
        pair = integrate_fundamental(profile, 0.0, (0.0, 10.0), TIGHT)
        numeric = emp_from_fundamental(pair, math.sqrt(3.0))
        closed = closed_form_emp(profile)
        for t in np.linspace(0.0, 10.0, 101):
            assert numeric.b(t) ** 2 == pytest.approx(closed.b(t) ** 2, abs=1e-8)
            assert numeric.b_dot(t) == pytest.approx(closed.b_dot(t), abs=1e-8)

    def test_independent_of_tolerance(self) -> None:
        """許容誤差を変えて積分し直しても b が 1e-8 で一致すること."""
        profile = LorentzBell(a=1.0, eps=1.0)
        coarse = emp_from_fundamental(
            integrate_fundamental(profile, 0.0, (0.0, 10.0), 1e-11), 1.0
        )
        fine = emp_from_fundamental(integrate_fundamental(profile, 0.0, (0.0, 10.0), TIGHT), 1.0)
        for t in np.linspace(0.0, 10.0, 41):
            assert coarse.b(t) == pytest.approx(fine.b(t), abs=1e-8)

    def test_zero_c_rejected(self) -> None:
        """c = 0 が拒否されること."""
        pair = integrate_fundamental(ConstantFrequency(omega0=1.0), 0.0, (0.0, 1.0))
        with pytest.raises(ValidationError):
            emp_from_fundamental(pair, 0.0)


class TestCatalogAgainstOracle:
    """全カタログの閉形式と ODE オラクルの比較."""

    @pytest.mark.parametrize(("profile", "ic", "window"), CATALOG)
    def test_b2_matches_ode(
        self,
        profile: FrequencyProfile,
        ic: InitialCondition,
        window: tuple[float, float],
    ) -> None:
        """2000 点グリッドで閉形式 b² が数値解と 1e-8 で一致すること."""
        tol = 1e-13 if ic.is_remote_past else TIGHT
        numeric = solve_numeric_emp(profile, ic, window, tol)
        closed = closed_form_emp(profile, ic)
        grid = np.linspace(window[0], window[1], 2000)
        b2_numeric = np.array([numeric.b(t) ** 2 for t in grid])
        b2_closed = np.array([closed.b(t) ** 2 for t in grid])
        np.testing.assert_allclose(b2_numeric, b2_closed, rtol=1e-8, atol=1e-8)

    def test_remote_past_requires_supported_profile(self) -> None:
        """t0 = -∞ の数値解は SechBump 以外で拒否されること."""
        with pytest.raises(ValidationError):
            solve_numeric_emp(
                LorentzBell(a=1.0, eps=1.0), InitialCondition.remote_past(), (-1.0, 1.0)
            )

    def test_vanishing_c_rejected(self) -> None:
        """SechBump (a=0) を過去の無限遠から始めると c ≈ 0 となり DomainError となること."""
        with pytest.raises(DomainError):
            solve_numeric_emp(
                SechBump(a=0.0, eps=1.0), InitialCondition.remote_past(), (-1.0, 1.0)
            )

    def test_small_but_usable_c(self) -> None:
        """c が区間内の最大 ω に比べて小さすぎなければ解けること."""
        sol = solve_numeric_emp(SechBump(a=0.0, eps=1.0), InitialCondition(-5.0), (-5.0, 0.0))
        assert sol.b(-5.0) == pytest.approx(1.0)
        assert sol.c == pytest.approx(math.sqrt(2.0) / math.cosh(5.0))

    def test_custom_profile_fallback(self) -> None:
        """閉形式のない Custom でも数値解が得られること."""
        profile = CustomFrequency(func=lambda t: 1.0 + 0.5 * math.exp(-t * t))
        sol = solve_numeric_emp(profile, InitialCondition(0.0), (0.0, 5.0), TIGHT)
        assert sol.b(0.0) == pytest.approx(1.0)
        assert sol.c == pytest.approx(math.sqrt(1.5))
        assert abs(residual(sol, 2.5)) < 1e-4


class TestTau:
    """tau_of のテスト."""

    def test_unit_b(self) -> None:
        """b ≡ 1 で τ = t - t0 となること."""
        sol = closed_form_emp(ConstantFrequency(omega0=1.0), InitialCondition(-1.0))
        assert tau_of(sol, 4.0) == pytest.approx(5.0, abs=1e-10)
        assert tau_of(sol, -3.0) == pytest.approx(-2.0, abs=1e-10)

    def test_sech_peak(self) -> None:
        """SechBump の求積 τ が分岐を接続した閉形式と一致すること."""
        sol = closed_form_emp(SechBump(a=1.0, eps=1.0))
        for t in np.linspace(-10.0, 10.0, 21):
            assert tau_of(sol, t) == pytest.approx(sech_peak_tau(1.0, 1.0, t), abs=1e-8)
            assert tau_of(sol, t) == pytest.approx(sol.tau(t), abs=1e-8)

    def test_lorentz(self) -> None:
        """LorentzBell の求積 τ が閉形式 τ と一致すること."""
        sol = closed_form_emp(LorentzBell(a=1.0, eps=1.0))
        for t in np.linspace(-10.0, 10.0, 21):
            assert tau_of(sol, t) == pytest.approx(sol.tau(t), abs=1e-8)

    def test_across_breakpoint(self) -> None:
        """不連続プロファイルでも区間分割して求積できること."""
        sol = closed_form_emp(AbruptDrop(alpha=1.0), InitialCondition(-1.0))
        # t ≤ 0 で b = 1, t > 0 で b² = 1 + t² → τ = 1 + arctan t
        assert tau_of(sol, 3.0) == pytest.approx(1.0 + math.atan(3.0), abs=1e-10)

    def test_harmonic_in_tau(self) -> None:
        """x₁(t)/b(t) = cos(cτ(t)) となり、τ が振動子を調和振動子に写すこと."""
        profile = QuenchedSechBump(a=1.0, eps=1.0)
        pair = integrate_fundamental(profile, 0.0, (-5.0, 10.0), TIGHT)
        sol = closed_form_emp(profile)
        for t in np.linspace(-5.0, 10.0, 61):
            ratio = pair.x1(t) / sol.b(t)
            assert ratio == pytest.approx(math.cos(sol.c * tau_of(sol, t)), abs=1e-5)

    def test_quadrature_failure(self) -> None:
        """求積が警告メッセージを返したら QuadratureFailureError となること."""
        sol = closed_form_emp(ConstantFrequency(omega0=1.0))
        with (
            patch("src.emp.quad", return_value=(0.0, 1.0, {}, "limit reached")),
            pytest.raises(QuadratureFailureError),
        ):
            tau_of(sol, 1.0)

    def test_remote_past_has_no_origin(self) -> None:
        """t0 = -∞ の解では tau_of が拒否されること."""
        sol = closed_form_emp(SechBump(a=1.0, eps=1.0), InitialCondition.remote_past())
        with pytest.raises(ValidationError):
            tau_of(sol, 0.0)


class TestComplexB:
    """complex_B のテスト."""

    def test_initial_value(self) -> None:
        """t0 で B = i/√(2ω₀), Ḃ = -√(ω₀/2) となること."""
        sol = closed_form_emp(SechBump(a=1.0, eps=1.0))
        big_b, big_b_dot = complex_B(sol, 0.0)
        omega0 = math.sqrt(3.0)
        assert big_b == pytest.approx(1j / math.sqrt(2 * omega0))
        assert big_b_dot == pytest.approx(-math.sqrt(omega0 / 2))

    @pytest.mark.parametrize(("profile", "ic", "window"), CATALOG)
    def test_wronskian_identity(
        self,
        profile: FrequencyProfile,
        ic: InitialCondition,
        window: tuple[float, float],
    ) -> None:
        """ḂB̄ - B̄̇B = i, |B|² = b²/(2c) が成り立つこと."""
        sol = closed_form_emp(profile, ic)
        for t in np.linspace(window[0], window[1], 31):
            big_b, big_b_dot = complex_B(sol, t)
            identity = big_b_dot * big_b.conjugate() - big_b_dot.conjugate() * big_b
            assert abs(identity - 1j) < 1e-10
            assert abs(big_b) ** 2 == pytest.approx(sol.b(t) ** 2 / (2 * sol.c), rel=1e-12)


class TestResidual:
    """residual のテスト."""

    def test_constant(self) -> None:
        """b ≡ 1, ω = c で残差が 0 となること."""
        sol = closed_form_emp(ConstantFrequency(omega0=1.3))
        for t in (0.0, 2.0, 7.5):
            assert abs(residual(sol, t)) < 1e-6

    def test_lorentz_rational(self) -> None:
        """a = √3ε の LorentzBell で [0, 10ε] の残差が 1e-6 未満であること."""
        eps = 1.0
        sol = closed_form_emp(LorentzBell(a=math.sqrt(3.0) * eps, eps=eps))
        for t in np.linspace(0.0, 10.0 * eps, 51):
            assert abs(residual(sol, t)) < 1e-6

    def test_sech_peak(self) -> None:
        """SechBump (a=ε=1) で [0, 10] の残差が 1e-6 未満であること."""
        sol = closed_form_emp(SechBump(a=1.0, eps=1.0))
        for t in np.linspace(0.0, 10.0, 51):
            assert abs(residual(sol, t)) < 1e-6

    def test_composites_away_from_junctions(self) -> None:
        """合成プロファイルでも接合点から離れた点で残差が小さいこと."""
        for profile in (
            QuenchedLorentz(a=3.0, eps=1.0, t0=0.0),
            WindowedLorentz(a=1.0, eps=1.0, t0=-1.0, t1=1.0),
            AbruptJump(omega0=2.0, omega1=1.0),
        ):
            sol = closed_form_emp(profile, InitialCondition(profile.breakpoints[0]))
            for t in (-2.5, -0.5, 0.5, 2.5, 6.0):
                assert abs(residual(sol, t)) < 1e-6


class TestFundamentalFromEmp:
    """fundamental_from_emp のテスト."""

    def test_initial_data(self) -> None:
        """t0 で (1, 0, 0, 1) を返すこと."""
        sol = closed_form_emp(LorentzBell(a=1.0, eps=1.0))
        x1, v1, x2, v2 = fundamental_from_emp(sol, 0.0)
        assert (x1, v1, x2, v2) == pytest.approx((1.0, 0.0, 0.0, 1.0), abs=1e-14)
