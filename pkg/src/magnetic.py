"""一様で時間変化する磁場中の荷電粒子.

ベクトルポテンシャル A = ω(t)(-x², x¹) (磁場 B = 2ω(t)e₃) のもとで、
回転 x̃ = R(Ω)x, Ω̇ = ω により 2 次元の時間依存調和振動子に帰着する。
ω → 0, a ~ ε の極限で磁場はデルタ関数的なパルスになるが、
その極限は解析的に扱うだけで専用の積分器は持たない。
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import config
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import quad, trapezoid

from src.emp import DenseTrajectory, EmpSolution, fundamental_from_emp, solve_segmented
from src.errors import QuadratureFailureError, ValidationError
from src.logger import get_logger
from src.measures import initial_entropies
from src.profiles import FrequencyProfile
from src.states import BasisState, Which, density_shape

logger = get_logger(__name__)

Vector2 = tuple[float, float]


@dataclass(frozen=True)
class MagneticScenario:
    """磁場プロファイル ω(t) とその EMP 解 (ω₀ = ω(t₀) = c)."""

    profile: FrequencyProfile
    sol: EmpSolution
    p3: float = 0.0

    @property
    def t0(self) -> float:
        return self.sol.t0


@dataclass(frozen=True)
class MagneticInfo:
    """φ_mn 基底の 2 次元情報量."""

    delta_s2x: float
    delta_s2p: float
    f2x: float
    f2p: float
    cfs2x: float
    cfs2p: float


@dataclass(frozen=True)
class Trajectory2D:
    """Lorentz 方程式の解.

    x, v, p は (len(t), 2) の配列。p は正準運動量 p = v + A(x, t)。
    """

    t: NDArray[np.float64]
    x: NDArray[np.float64]
    v: NDArray[np.float64]
    p: NDArray[np.float64]
    dense: DenseTrajectory

    def state(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """時刻 t の (x, p)."""
        y = self.dense(t)
        return y[:2], y[2:]


# =============================================================================
# 回転
# =============================================================================
def _require_finite_start(scenario: MagneticScenario) -> None:
    if not math.isfinite(scenario.t0):
        msg = "回転角の基準 Ω(t₀) = 0 には有限の t₀ が必要です"
        logger.error(msg)
        raise ValidationError("t0", msg)


def _omega_integral(profile: FrequencyProfile, lo: float, hi: float) -> float:
    interior = [p for p in profile.breakpoints if min(lo, hi) < p < max(lo, hi)]
    result = quad(
        profile.omega,
        lo,
        hi,
        epsabs=config.QUAD_TOL,
        epsrel=0.0,
        limit=config.QUAD_LIMIT,
        points=interior or None,
        full_output=1,
    )
    if len(result) > 3:
        msg = f"回転角の求積が収束しません [{lo}, {hi}]: {result[3]}"
        logger.error(msg)
        raise QuadratureFailureError(msg)
    return float(result[0])


def rotation_angle(scenario: MagneticScenario, t: float) -> float:
    """Ω(t) = ∫_{t₀}^t ω(s)ds."""
    _require_finite_start(scenario)
    return _omega_integral(scenario.profile, scenario.t0, t)


def rotation_angles(scenario: MagneticScenario, grid: ArrayLike) -> NDArray[np.float64]:
    """時刻列上の Ω. 隣接点間の求積を累積する."""
    _require_finite_start(scenario)
    times = np.asarray(grid, dtype=np.float64)
    angles = np.empty_like(times)
    previous, angle = scenario.t0, 0.0
    for i, t in enumerate(times):
        angle += _omega_integral(scenario.profile, previous, float(t))
        angles[i] = angle
        previous = float(t)
    return angles


def rotation_matrix(angle: float) -> NDArray[np.float64]:
    """x̃ = R(Ω)x となる回転行列."""
    cos, sin = math.cos(angle), math.sin(angle)
    return np.array([[cos, -sin], [sin, cos]])


def field_strength(scenario: MagneticScenario, t: float) -> float:
    """磁場の大きさ 2ω(t)."""
    return 2.0 * scenario.profile.omega(t)


# =============================================================================
# 情報量
# =============================================================================
def basis_info(m: int, n: int, scenario: MagneticScenario, t: float) -> MagneticInfo:
    """φ_mn 基底のエントロピー増分・Fisher 情報量・複雑度.

    複雑度は 2 次元の定義 F·e^{S} (S は絶対エントロピー) を使う。

    Args:
        m, n: 量子数
        scenario: 磁場シナリオ
        t: 時刻

    Returns:
        MagneticInfo
    """
    sol = scenario.sol
    w0 = sol.omega0
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    chirp = (b * b_dot / w0) ** 2
    level = m + n + 1

    delta_s2x = 2.0 * math.log(b)
    delta_s2p = math.log1p(chirp) - 2.0 * math.log(b)
    f2x = 4.0 * w0 * level / (b * b)
    f2p = 4.0 * b * b * level / (w0 * (1.0 + chirp))

    first = initial_entropies(BasisState(m, sol))
    second = initial_entropies(BasisState(n, sol))
    s2x = first.position + second.position + delta_s2x
    s2p = first.momentum + second.momentum + delta_s2p
    return MagneticInfo(
        delta_s2x=delta_s2x,
        delta_s2p=delta_s2p,
        f2x=f2x,
        f2p=f2p,
        cfs2x=f2x * math.exp(s2x),
        cfs2p=f2p * math.exp(s2p),
    )


def entropy_2d_oracle(
    m: int,
    n: int,
    scenario: MagneticScenario,
    t: float,
    which: Which = "position",
    points: int | None = None,
) -> float:
    """実験室系の格子上で φ_mn の密度の Shannon エントロピーを台形則で計算.

    密度は回転系で ρ_m(x̃¹)ρ_n(x̃²)。格子は b(t) に合わせて伸縮する。
    """
    points = config.GRID2D_POINTS if points is None else points
    first = density_shape(BasisState(m, scenario.sol), t, which)
    second = density_shape(BasisState(n, scenario.sol), t, which)
    half = max(first.support, second.support)
    axis = np.linspace(-half, half, points)
    u1, u2 = np.meshgrid(axis, axis, indexing="ij")

    rot = rotation_matrix(rotation_angle(scenario, t))
    r1 = rot[0, 0] * u1 + rot[0, 1] * u2
    r2 = rot[1, 0] * u1 + rot[1, 1] * u2
    rho = np.asarray(first(r1)) * np.asarray(second(r2))

    safe = np.where(rho > config.DENSITY_FLOOR, rho, 1.0)
    integrand = np.where(rho > config.DENSITY_FLOOR, -rho * np.log(safe), 0.0)
    return float(trapezoid(trapezoid(integrand, axis, axis=1), axis))


# =============================================================================
# 古典軌道
# =============================================================================
def lorentz_integrate(
    scenario: MagneticScenario,
    x0: Vector2,
    v0: Vector2,
    grid: ArrayLike,
    tol: float | None = None,
) -> Trajectory2D:
    """H = ½(p - A)² の正準方程式を積分.

    Args:
        scenario: 磁場シナリオ
        x0: grid[0] での位置
        v0: grid[0] での速度 ẋ
        grid: 出力する時刻列 (昇順)
        tol: RK45 の許容誤差

    Returns:
        Trajectory2D

    Raises:
        StepFailureError: 積分ステップの失敗
    """
    times = np.asarray(grid, dtype=np.float64)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        msg = "時刻列は 2 点以上の狭義単調増加列である必要があります"
        logger.error(msg)
        raise ValidationError("grid", msg)
    omega = scenario.profile.omega

    def fun(t: float, y: NDArray[np.float64]) -> ArrayLike:
        w = omega(t)
        v1 = y[2] + w * y[1]
        v2 = y[3] - w * y[0]
        return (v1, v2, w * v2, -w * v1)

    start = float(times[0])
    w_start = omega(start)
    p_start = (v0[0] - w_start * x0[1], v0[1] + w_start * x0[0])
    dense = solve_segmented(
        fun,
        (x0[0], x0[1], p_start[0], p_start[1]),
        start,
        (start, float(times[-1])),
        scenario.profile.breakpoints,
        tol,
    )

    states = np.array([dense(float(t)) for t in times])
    w = np.array([omega(float(t)) for t in times])
    x = states[:, :2]
    p = states[:, 2:]
    v = np.column_stack((p[:, 0] + w * x[:, 1], p[:, 1] - w * x[:, 0]))
    logger.debug(f"Lorentz 軌道: {times.size} 点, [{start:g}, {times[-1]:g}]")
    return Trajectory2D(t=times, x=x, v=v, p=p, dense=dense)


def rotating_frame_trajectory(
    scenario: MagneticScenario, x0: Vector2, v0: Vector2, t: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """回転系の振動子解から組み立てた (x(t), ẋ(t)). 初期値は t₀ で与える.

    z = x¹ + ix² に対し z = e^{-iΩ}z̃, z̃'' + ω²z̃ = 0,
    z̃(t₀) = z(t₀), z̃'(t₀) = ż(t₀) + iω₀z(t₀)。
    """
    _require_finite_start(scenario)
    z0 = complex(*x0)
    z_dot0 = complex(*v0) + 1j * scenario.profile.omega(scenario.t0) * z0
    x1, x1_dot, x2, x2_dot = fundamental_from_emp(scenario.sol, t)
    z_rot = z0 * x1 + z_dot0 * x2
    z_rot_dot = z0 * x1_dot + z_dot0 * x2_dot

    turn = np.exp(-1j * rotation_angle(scenario, t))
    z = turn * z_rot
    z_dot = turn * (z_rot_dot - 1j * scenario.profile.omega(t) * z_rot)
    return np.array([z.real, z.imag]), np.array([z_dot.real, z_dot.imag])


def kinetic_energy(traj: Trajectory2D) -> NDArray[np.float64]:
    """½|v|² (= H) の時系列."""
    return 0.5 * np.sum(traj.v**2, axis=1)


def _invariant(
    sol: EmpSolution, t: float, x: NDArray[np.float64], p: NDArray[np.float64]
) -> float:
    b = sol.b(t)
    shifted = b * p - sol.b_dot(t) * x
    return -0.5 * (float(shifted @ shifted) + sol.c**2 * float(x @ x) / (b * b))


def ermakov_lewis(traj: Trajectory2D, sol: EmpSolution, t: float) -> float:
    """J = -½(|b·p - ḃ·x|² + c²|x|²/b²). 軌道に沿って一定."""
    x, p = traj.state(t)
    return _invariant(sol, t, x, p)


def ermakov_lewis_series(traj: Trajectory2D, sol: EmpSolution) -> NDArray[np.float64]:
    """軌道の時刻列上の J."""
    return np.array(
        [_invariant(sol, float(t), x, p) for t, x, p in zip(traj.t, traj.x, traj.p, strict=True)]
    )
