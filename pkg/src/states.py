"""基底状態 ψ_n の振幅・確率密度・モーメント.

密度は位置・運動量とも ρ(u) = h_n(u/L)²/L (h_n は規格化エルミート関数) の形になり、
スケール L だけが b(t), ḃ(t) に依存する。
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import config
import numpy as np
from scipy.integrate import quad
from scipy.special import roots_hermite

from src.emp import EmpSolution, ScalarFn, solve_segmented
from src.errors import HermiteOverflowError, QuadratureFailureError, ValidationError
from src.logger import get_logger

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from src.profiles import FrequencyProfile

logger = get_logger(__name__)

Which = Literal["position", "momentum"]


def _check_degree(n: int) -> None:
    if n < 0 or n > config.HERMITE_MAX_DEGREE:
        msg = f"量子数 n={n} は 0..{config.HERMITE_MAX_DEGREE} の範囲外です"
        logger.error(msg)
        raise ValidationError("n", msg)


# =============================================================================
# エルミート多項式・エルミート関数
# =============================================================================
def hermite(n: int, y: ArrayLike) -> float | NDArray[np.float64]:
    """物理学者のエルミート多項式 H_n(y) (三項漸化式).

    Args:
        n: 次数 (0..200)
        y: 引数 (スカラーまたは配列)

    Returns:
        H_n(y)

    Raises:
        HermiteOverflowError: 値が倍精度の範囲を超えた
    """
    _check_degree(n)
    y_arr = np.asarray(y, dtype=np.float64)
    prev = np.ones_like(y_arr)
    cur = prev if n == 0 else 2.0 * y_arr
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n):
            prev, cur = cur, 2.0 * y_arr * cur - 2.0 * k * prev

    if not np.all(np.isfinite(cur)):
        msg = f"H_{n} がオーバーフローしました"
        logger.error(msg)
        raise HermiteOverflowError(msg)
    return float(cur) if cur.ndim == 0 else cur


def _hermite_pair(
    n: int, y: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(h_n(y), h_{n-1}(y)). h_{-1} = 0."""
    h_prev = np.zeros_like(y)
    h_cur = math.pi**-0.25 * np.exp(-0.5 * y * y)
    for k in range(n):
        h_next = math.sqrt(2.0 / (k + 1)) * y * h_cur - math.sqrt(k / (k + 1)) * h_prev
        h_prev, h_cur = h_cur, h_next
    return h_cur, h_prev


def hermite_function(n: int, y: ArrayLike) -> float | NDArray[np.float64]:
    """規格化エルミート関数 h_n(y) = H_n(y)e^{-y²/2}/√(2ⁿn!√π)."""
    _check_degree(n)
    y_arr = np.asarray(y, dtype=np.float64)
    value, _ = _hermite_pair(n, y_arr)
    return float(value) if value.ndim == 0 else value


def hermite_function_derivative(n: int, y: ArrayLike) -> float | NDArray[np.float64]:
    """h_n'(y) = √(2n)·h_{n-1}(y) - y·h_n(y)."""
    _check_degree(n)
    y_arr = np.asarray(y, dtype=np.float64)
    value, lower = _hermite_pair(n, y_arr)
    result = math.sqrt(2.0 * n) * lower - y_arr * value
    return float(result) if result.ndim == 0 else result


# =============================================================================
# 基底状態
# =============================================================================
@dataclass(frozen=True)
class BasisState:
    """量子数 n と EMP 解の組."""

    n: int
    sol: EmpSolution

    def __post_init__(self) -> None:
        _check_degree(self.n)


@dataclass(frozen=True)
class HermiteDensity:
    """ρ(u) = h_n(u/L)²/L."""

    n: int
    scale: float

    def __call__(self, u: ArrayLike) -> float | NDArray[np.float64]:
        y = np.asarray(u, dtype=np.float64) / self.scale
        value, _ = _hermite_pair(self.n, y)
        rho = value * value / self.scale
        return float(rho) if rho.ndim == 0 else rho

    def derivative(self, u: ArrayLike) -> float | NDArray[np.float64]:
        y = np.asarray(u, dtype=np.float64) / self.scale
        value, lower = _hermite_pair(self.n, y)
        slope = math.sqrt(2.0 * self.n) * lower - y * value
        result = 2.0 * value * slope / self.scale**2
        return float(result) if result.ndim == 0 else result

    @property
    def support(self) -> float:
        """裾の質量が無視できる半幅. 高い n では古典的転回点の外側まで取る."""
        gaussian = math.sqrt(config.TAIL_EXPONENT + self.n * math.log(4.0))
        turning = math.sqrt(2.0 * self.n + 1.0) + config.TAIL_WIDTHS
        return self.scale * max(gaussian, turning) + config.TAIL_MARGIN

    @property
    def nodes(self) -> list[float]:
        """求積の分割点 (h_n の零点、原点、古典的転回点)."""
        turning = self.scale * math.sqrt(2.0 * self.n + 1.0)
        points = {0.0, turning, -turning}
        if self.n > 0:
            zeros, _ = roots_hermite(self.n)
            points.update(float(z) * self.scale for z in zeros)
        return sorted(points)

    def integrate(self, integrand: Callable[[float], float], tol: float | None = None) -> float:
        """密度の台の上で integrand を適応求積."""
        tol = config.ORACLE_QUAD_TOL if tol is None else tol
        half = self.support
        result = quad(
            integrand,
            -half,
            half,
            epsabs=tol,
            epsrel=0.0,
            limit=4 * config.QUAD_LIMIT,
            points=[p for p in self.nodes if -half < p < half],
            full_output=1,
        )
        if len(result) > 3:
            msg = f"密度の求積が収束しません (n={self.n}, L={self.scale:g}): {result[3]}"
            logger.error(msg)
            raise QuadratureFailureError(msg)
        return float(result[0])


def position_scale(sol: EmpSolution, t: float) -> float:
    """位置密度のスケール L_x = b/√ω₀."""
    return sol.b(t) / math.sqrt(sol.omega0)


def momentum_scale(sol: EmpSolution, t: float) -> float:
    """運動量密度のスケール L_p = √(ω₀² + b²ḃ²)/(√ω₀·b)."""
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    return math.sqrt(sol.omega0**2 + (b * b_dot) ** 2) / (math.sqrt(sol.omega0) * b)


def density_shape(state: BasisState, t: float, which: Which = "position") -> HermiteDensity:
    """時刻 t の位置または運動量密度."""
    if which == "position":
        return HermiteDensity(state.n, position_scale(state.sol, t))
    if which == "momentum":
        return HermiteDensity(state.n, momentum_scale(state.sol, t))
    msg = f"which は position / momentum のいずれかです: {which}"
    logger.error(msg)
    raise ValidationError("which", msg)


def densities(
    state: BasisState, value: ArrayLike, t: float, which: Which = "position"
) -> float | NDArray[np.float64]:
    """位置密度 ρ_n(x, t) または運動量密度 ρ_n(p, t)."""
    return density_shape(state, t, which)(value)


def _amplitude(
    state: BasisState, x: ArrayLike, t: float
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    sol = state.sol
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    scale = b / math.sqrt(sol.c)
    x_arr = np.asarray(x, dtype=np.float64)
    value, lower = _hermite_pair(state.n, x_arr / scale)
    slope = math.sqrt(2.0 * state.n) * lower - (x_arr / scale) * value

    envelope = value / math.sqrt(scale)
    envelope_dx = slope / scale**1.5
    phase = np.exp(
        -1j * sol.c * (state.n + 0.5) * sol.tau(t) + 1j * b_dot * x_arr * x_arr / (2.0 * b)
    )
    psi_value = envelope * phase
    psi_dx = (envelope_dx + 1j * (b_dot * x_arr / b) * envelope) * phase
    return psi_value, psi_dx


def psi(state: BasisState, x: ArrayLike, t: float) -> complex | NDArray[np.complex128]:
    """波動関数 ψ_n(x, t). 位相 e^{-ic(n+1/2)τ(t)} を含む."""
    value, _ = _amplitude(state, x, t)
    return complex(value) if value.ndim == 0 else value


def psi_derivative(state: BasisState, x: ArrayLike, t: float) -> complex | NDArray[np.complex128]:
    """∂ψ_n/∂x."""
    _, derivative = _amplitude(state, x, t)
    return complex(derivative) if derivative.ndim == 0 else derivative


@dataclass(frozen=True)
class MomentRecord:
    """⟨x²⟩, ⟨p²⟩, ⟨H⟩, Δx·Δp."""

    x2: float
    p2: float
    energy: float
    uncertainty: float


def moments(state: BasisState, t: float) -> MomentRecord:
    """瞬間固有状態から出発した ψ_n のモーメント (閉形式)."""
    sol = state.sol
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    w0 = sol.omega0
    level = 2 * state.n + 1
    x2 = b * b / (2.0 * w0) * level
    p2 = (w0 / (b * b) + b_dot * b_dot / w0) * level / 2.0
    energy = 0.25 * (sol.omega2(t) * b * b / w0 + w0 / (b * b) + b_dot * b_dot / w0) * level
    uncertainty = (state.n + 0.5) * math.sqrt(1.0 + (b * b_dot / w0) ** 2)
    return MomentRecord(x2=x2, p2=p2, energy=energy, uncertainty=uncertainty)


def lr_expectation(state: BasisState, t: float) -> float:
    """不変量 Î = ½(c²x²/b² + (b·p̂ - ḃ·x)²) の期待値を座標表示の求積で計算.

    (b·p̂ - ḃ·x) はエルミートなので ⟨(b·p̂ - ḃ·x)²⟩ = ‖(b·p̂ - ḃ·x)ψ‖²。
    """
    sol = state.sol
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    c = sol.c

    def integrand(x: float) -> float:
        value, derivative = _amplitude(state, x, t)
        shifted = -1j * b * derivative - b_dot * x * value
        return float(0.5 * ((c * x / b) ** 2 * abs(value) ** 2 + abs(shifted) ** 2))

    return density_shape(state, t).integrate(integrand, config.QUAD_TOL)


def momentum_density_fft(
    state: BasisState, t: float, points: int = 4096, halfwidth: float | None = None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """ψ の離散フーリエ変換による運動量密度 (検証用).

    Returns:
        (p, ρ(p)): p は昇順
    """
    half = halfwidth if halfwidth is not None else density_shape(state, t).support
    dx = 2.0 * half / points
    x = -half + dx * np.arange(points)
    amplitude = np.asarray(psi(state, x, t))
    spectrum = np.fft.fftshift(np.fft.fft(amplitude))
    p = np.fft.fftshift(np.fft.fftfreq(points, d=dx)) * 2.0 * math.pi
    return p, dx * dx / (2.0 * math.pi) * np.abs(spectrum) ** 2


# =============================================================================
# 外力のある振動子
# =============================================================================
@dataclass(frozen=True)
class DrivenTrajectory:
    """ë + ω²e = f の古典解 e(t)."""

    e: ScalarFn
    e_dot: ScalarFn
    f: ScalarFn


def integrate_drive(
    profile: FrequencyProfile,
    force: ScalarFn,
    t0: float,
    window: tuple[float, float],
    tol: float | None = None,
    e0: float = 0.0,
    e_dot0: float = 0.0,
) -> DrivenTrajectory:
    """外力 f(t) に対する古典軌道を積分.

    Args:
        profile: 周波数プロファイル
        force: 外力 f(t)
        t0: 初期時刻
        window: 積分区間
        tol: 許容誤差
        e0: e(t0)
        e_dot0: ė(t0)

    Returns:
        DrivenTrajectory: 連続出力つきの軌道
    """

    def fun(t: float, y: NDArray[np.float64]) -> ArrayLike:
        return (y[1], force(t) - profile.omega2(t) * y[0])

    trajectory = solve_segmented(fun, (e0, e_dot0), t0, window, profile.breakpoints, tol)
    return DrivenTrajectory(
        e=lambda t: float(trajectory(t)[0]),
        e_dot=lambda t: float(trajectory(t)[1]),
        f=force,
    )


def driven_density(
    state: BasisState, drive: DrivenTrajectory, x: ArrayLike, t: float
) -> float | NDArray[np.float64]:
    """外力下の密度 ρ_n(x - e(t), t)."""
    shifted = np.asarray(x, dtype=np.float64) - drive.e(t)
    return densities(state, shifted, t, "position")
