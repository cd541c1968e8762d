"""EMP 方程式の数値エンジン.

b̈ + ω²b = c²/b³ の解 b(t) を基本解ペアから組み立て、τ(t) = ∫dt/b² を適応求積で求める。
閉形式 (src.profiles) に対する独立なオラクルとして使う。
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from itertools import pairwise
from typing import TYPE_CHECKING

import config
import numpy as np
from scipy.integrate import quad, solve_ivp

from src.errors import DomainError, QuadratureFailureError, StepFailureError, ValidationError
from src.logger import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray
    from scipy.integrate import OdeSolution

    from src.profiles import FrequencyProfile, InitialCondition

logger = get_logger(__name__)

# 時間の関数
ScalarFn = Callable[[float], float]
# 区間内に寄せた時刻と状態ベクトルから導関数を返す右辺
OdeRhs = Callable[[float, "NDArray[np.float64]"], "ArrayLike"]


@dataclass(frozen=True)
class EmpSolution:
    """EMP 方程式の解 (b, ḃ, τ) と定数.

    b, b_dot, tau は時刻を受け取る関数。omega2 と breakpoints は
    下流の計算 (残差、求積の区間分割、モーメント) のために保持する。
    """

    b: ScalarFn
    b_dot: ScalarFn
    tau: ScalarFn
    c: float
    t0: float
    omega0: float
    omega2: ScalarFn
    breakpoints: tuple[float, ...] = ()
    label: str = ""


# =============================================================================
# 区間分割つき ODE 積分
# =============================================================================
@dataclass(frozen=True)
class DenseTrajectory:
    """区間ごとの連続出力をつないだ軌道."""

    pieces: tuple[tuple[float, float, OdeSolution], ...]

    @property
    def window(self) -> tuple[float, float]:
        return min(p[0] for p in self.pieces), max(p[1] for p in self.pieces)

    def __call__(self, t: float) -> NDArray[np.float64]:
        for lo, hi, dense in self.pieces:
            if lo <= t <= hi:
                return np.asarray(dense(t), dtype=np.float64)
        lo, hi = self.window
        msg = f"時刻 {t} は積分区間 [{lo}, {hi}] の外です"
        logger.error(msg)
        raise ValidationError("t", msg)


def _inside(t: float, lo: float, hi: float) -> float:
    # 区間は左開き: 左端では右側の値を使う
    return min(max(t, math.nextafter(lo, math.inf)), hi)


def _integrate_piece(
    fun: OdeRhs,
    y0: NDArray[np.float64],
    start: float,
    end: float,
    tol: float,
) -> tuple[OdeSolution, NDArray[np.float64]]:
    lo, hi = min(start, end), max(start, end)

    def rhs(t: float, y: NDArray[np.float64]) -> ArrayLike:
        return fun(_inside(t, lo, hi), y)

    result = solve_ivp(
        rhs, (start, end), y0, method="RK45", rtol=tol, atol=tol, dense_output=True
    )
    if not result.success:
        msg = f"ODE 積分に失敗しました [{start}, {end}]: {result.message}"
        logger.error(msg)
        raise StepFailureError(msg)

    logger.debug(f"RK45 [{start:g}, {end:g}]: nfev={result.nfev}")
    return result.sol, result.y[:, -1]


def solve_segmented(
    fun: OdeRhs,
    y0: Sequence[float],
    t0: float,
    window: tuple[float, float],
    breakpoints: Sequence[float] = (),
    tol: float | None = None,
) -> DenseTrajectory:
    """ブレークポイントで区間を分けて t0 から前後に積分.

    Args:
        fun: 右辺 f(t, y)。t は常に現在の区間の内側に寄せて渡される
        y0: t0 での状態
        t0: 初期時刻 (有限)
        window: 積分区間 (t_min, t_max)
        breakpoints: 右辺が不連続になりうる時刻
        tol: RK45 の rtol / atol (None なら config.ODE_TOL)

    Returns:
        DenseTrajectory: 区間をまたいで評価できる連続出力
    """
    tol = config.ODE_TOL if tol is None else tol
    t_lo, t_hi = window
    if tol <= 0:
        msg = f"許容誤差は正である必要があります: {tol}"
        logger.error(msg)
        raise ValidationError("tol", msg)
    if not (math.isfinite(t0) and t_lo <= t0 <= t_hi):
        msg = f"初期時刻 {t0} が区間 [{t_lo}, {t_hi}] に含まれません"
        logger.error(msg)
        raise ValidationError("t0", msg)

    inner = sorted(bp for bp in breakpoints if t_lo < bp < t_hi)
    start_state = np.asarray(y0, dtype=np.float64)
    pieces: list[tuple[float, float, OdeSolution]] = []

    forward = [t0, *(bp for bp in inner if bp > t0), t_hi]
    state = start_state
    for start, end in pairwise(forward):
        if end > start:
            dense, state = _integrate_piece(fun, state, start, end, tol)
            pieces.append((start, end, dense))

    backward = [t0, *(bp for bp in reversed(inner) if bp < t0), t_lo]
    state = start_state
    for start, end in pairwise(backward):
        if end < start:
            dense, state = _integrate_piece(fun, state, start, end, tol)
            pieces.append((end, start, dense))

    if not pieces:
        msg = "積分区間の長さが 0 です"
        logger.error(msg)
        raise ValidationError("window", msg)

    pieces.sort(key=lambda p: p[0])
    return DenseTrajectory(pieces=tuple(pieces))


# =============================================================================
# 基本解ペア
# =============================================================================
@dataclass(frozen=True)
class FundamentalPair:
    """ẍ = -ω²x の基本解 x₁, x₂ (x₁(t₀)=1, ẋ₁(t₀)=0, x₂(t₀)=0, ẋ₂(t₀)=1)."""

    trajectory: DenseTrajectory
    t0: float
    omega2: ScalarFn
    breakpoints: tuple[float, ...] = ()
    wronskian: float = 1.0

    def state(self, t: float) -> tuple[float, float, float, float]:
        """(x₁, ẋ₁, x₂, ẋ₂) を返す."""
        x1, v1, x2, v2 = self.trajectory(t)
        return float(x1), float(v1), float(x2), float(v2)

    def x1(self, t: float) -> float:
        return self.state(t)[0]

    def x2(self, t: float) -> float:
        return self.state(t)[2]

    def wronskian_at(self, t: float) -> float:
        """時刻 t で数値的に評価したロンスキアン."""
        x1, v1, x2, v2 = self.state(t)
        return x1 * v2 - v1 * x2


def integrate_fundamental(
    profile: FrequencyProfile,
    t0: float,
    window: tuple[float, float],
    tol: float | None = None,
) -> FundamentalPair:
    """プロファイルの基本解ペアを RK45 で積分.

    Args:
        profile: 周波数プロファイル
        t0: 初期時刻 (有限)
        window: 評価区間
        tol: 局所許容誤差

    Returns:
        FundamentalPair: W = 1 の基本解
    """

    def fun(t: float, y: NDArray[np.float64]) -> ArrayLike:
        w2 = profile.omega2(t)
        return (y[1], -w2 * y[0], y[3], -w2 * y[2])

    trajectory = solve_segmented(
        fun, (1.0, 0.0, 0.0, 1.0), t0, window, profile.breakpoints, tol
    )
    return FundamentalPair(
        trajectory=trajectory,
        t0=t0,
        omega2=profile.omega2,
        breakpoints=profile.breakpoints,
    )


def _integrate_inverse_square(
    b: ScalarFn,
    origin: float,
    t: float,
    breakpoints: Sequence[float],
    tol: float | None,
) -> float:
    tol = config.QUAD_TOL if tol is None else tol
    if t == origin:
        return 0.0

    lo, hi = (origin, t) if origin < t else (t, origin)
    points = [bp for bp in breakpoints if lo < bp < hi] or None
    result = quad(
        lambda s: 1.0 / b(s) ** 2,
        lo,
        hi,
        epsabs=tol,
        epsrel=0.0,
        limit=config.QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    if len(result) > 3:
        msg = f"τ の求積が収束しません [{lo}, {hi}]: {result[3]}"
        logger.error(msg)
        raise QuadratureFailureError(msg)

    value = float(result[0])
    return value if origin < t else -value


def emp_from_fundamental(
    pair: FundamentalPair,
    c: float,
    tau_origin: float | None = None,
    tol: float | None = None,
) -> EmpSolution:
    """基本解ペアから b = √(x₁² + (c²/W²)x₂²) を組み立てる.

    Args:
        pair: 基本解ペア
        c: EMP 方程式の定数 (0 以外)
        tau_origin: τ = 0 とする時刻 (None なら pair.t0)
        tol: τ の求積の絶対誤差

    Returns:
        EmpSolution: 数値解
    """
    if c == 0:
        msg = "c は 0 以外である必要があります"
        logger.error(msg)
        raise ValidationError("c", msg)

    k = (c / pair.wronskian) ** 2
    origin = pair.t0 if tau_origin is None else tau_origin

    def b(t: float) -> float:
        x1, _, x2, _ = pair.state(t)
        return math.sqrt(x1 * x1 + k * x2 * x2)

    def b_dot(t: float) -> float:
        x1, v1, x2, v2 = pair.state(t)
        return (x1 * v1 + k * x2 * v2) / math.sqrt(x1 * x1 + k * x2 * x2)

    def tau(t: float) -> float:
        return _integrate_inverse_square(b, origin, t, pair.breakpoints, tol)

    return EmpSolution(
        b=b,
        b_dot=b_dot,
        tau=tau,
        c=abs(c),
        t0=pair.t0,
        omega0=math.sqrt(max(pair.omega2(pair.t0), 0.0)),
        omega2=pair.omega2,
        breakpoints=pair.breakpoints,
        label="numeric",
    )


def solve_numeric_emp(
    profile: FrequencyProfile,
    ic: InitialCondition,
    window: tuple[float, float],
    tol: float | None = None,
) -> EmpSolution:
    """瞬間固有状態の初期条件で EMP 方程式を数値的に解く.

    t₀ = -∞ は profile.past_start() が返す有限時刻から始め、τ は τ(0) = 0 に揃える。
    閉形式がないプロファイルのフォールバックとして使う。
    """
    t0 = ic.t0
    tau_origin: float | None = None
    if math.isinf(t0):
        start = profile.past_start()
        if start is None:
            msg = f"{profile.kind} は t0 = -inf の初期条件を持ちません"
            logger.error(msg)
            raise ValidationError("t0", msg)
        t0 = start
        tau_origin = 0.0
        window = (min(window[0], start), max(window[1], 0.0))

    c = math.sqrt(max(profile.omega2(t0), 0.0))
    if c <= 0:
        msg = f"ω(t0) = 0 のため c > 0 を満たしません (t0={t0})"
        logger.error(msg)
        raise ValidationError("c", msg)
    inside = [p for p in profile.breakpoints if window[0] <= p <= window[1]]
    reference = max(profile.omega(t) for t in (t0, *window, *inside))
    if c < config.MIN_C_RATIO * reference:
        msg = f"c = {c:g} が区間内の最大 ω = {reference:g} に比べて小さすぎます (t0={t0})"
        logger.error(msg)
        raise DomainError(msg)

    pair = integrate_fundamental(profile, t0, window, tol)
    sol = emp_from_fundamental(pair, c, tau_origin=tau_origin)
    return EmpSolution(
        b=sol.b,
        b_dot=sol.b_dot,
        tau=sol.tau,
        c=c,
        t0=ic.t0,
        omega0=c,
        omega2=sol.omega2,
        breakpoints=sol.breakpoints,
        label=f"numeric:{profile.kind}",
    )


# =============================================================================
# EMP 解から導かれる量
# =============================================================================
def tau_of(sol: EmpSolution, t: float, tol: float | None = None) -> float:
    """τ(t) = ∫_{t₀}^{t} ds/b²(s) を適応求積で計算.

    Args:
        sol: EMP 解 (t₀ は有限)
        t: 時刻
        tol: 絶対誤差

    Returns:
        float: τ(t)
    """
    if not math.isfinite(sol.t0):
        msg = "t0 = -inf の解では求積の起点が定まりません"
        logger.error(msg)
        raise ValidationError("t0", msg)
    return _integrate_inverse_square(sol.b, sol.t0, t, sol.breakpoints, tol)


def complex_B(sol: EmpSolution, t: float) -> tuple[complex, complex]:  # noqa: N802
    """B = (i/√(2c))·b·e^{icτ} とその時間微分."""
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    prefactor = 1j / math.sqrt(2.0 * sol.c) * cmath.exp(1j * sol.c * sol.tau(t))
    return prefactor * b, prefactor * complex(b_dot, sol.c / b)


def residual(sol: EmpSolution, t: float) -> float:
    """b̈ + ω²b - c²/b³ (b̈ は 5 点中心差分)."""
    h = config.STENCIL_REL_STEP * max(1.0, abs(t))
    b = sol.b
    b0 = b(t)
    b_ddot = (-b(t + 2 * h) + 16 * b(t + h) - 30 * b0 + 16 * b(t - h) - b(t - 2 * h)) / (
        12 * h * h
    )
    return b_ddot + sol.omega2(t) * b0 - sol.c**2 / b0**3


def fundamental_from_emp(sol: EmpSolution, t: float) -> tuple[float, float, float, float]:
    """b と τ から基本解ペア (x₁, ẋ₁, x₂, ẋ₂) を復元.

    x₁ = b·cos(cτ), x₂ = b·sin(cτ)/c。有限の t₀ で瞬間固有状態の初期条件を
    満たす解に対してのみ x₁(t₀)=1, ẋ₂(t₀)=1 となる。
    """
    c = sol.c
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    phase = c * sol.tau(t)
    cos, sin = math.cos(phase), math.sin(phase)
    return (
        b * cos,
        b_dot * cos - (c / b) * sin,
        b * sin / c,
        (b_dot * sin + (c / b) * cos) / c,
    )
