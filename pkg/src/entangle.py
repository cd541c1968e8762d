"""結合した 2 つの振動子のエンタングルメント.

H = ½(p₁² + p₂²) + ½ω²(x₁² + x₂²) + k·(x₁ + x₂)²/2 相当の系を基準振動
ω₁² = ω² + 2k, ω₂² = ω² に分解し、それぞれの EMP 解 (b₁, b₂) から
片側の縮約密度行列 ρ(x, x̃) のガウス型パラメータ (ζ, χ, φ) を求める。
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import config
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid
from scipy.linalg import eigh

from src.emp import EmpSolution, ScalarFn, solve_numeric_emp
from src.errors import (
    ConvergenceFailureError,
    DomainError,
    NegativeModeFrequencyError,
    NoClosedFormError,
    ValidationError,
)
from src.logger import get_logger
from src.measures import entropy_increases
from src.profiles import (
    ConstantFrequency,
    FrequencyProfile,
    InitialCondition,
    QuenchedLorentz,
    QuenchedSechBump,
    SechBump,
    closed_form_emp,
)

logger = get_logger(__name__)


# =============================================================================
# 基準振動への分解
# =============================================================================
def decouple(
    profile: FrequencyProfile,
    k: ScalarFn,
    window: tuple[float, float],
    samples: int = config.DEFAULT_STEPS,
) -> tuple[ScalarFn, ScalarFn]:
    """(ω², k) から基準振動 (ω₁², ω₂²) = (ω² + 2k, ω²) を作る.

    Args:
        profile: 結合前の周波数 ω(t)
        k: 結合パラメータ k(t)
        window: ω₁² ≥ 0 を確認する区間
        samples: 確認に使う標本点の数

    Returns:
        (ω₁², ω₂²) の関数の組

    Raises:
        NegativeModeFrequencyError: 区間内で ω₁² < 0 (反転振動子)
    """

    def omega1_sq(t: float) -> float:
        return profile.omega2(t) + 2.0 * k(t)

    lo, hi = window
    grid = np.concatenate(
        (np.linspace(lo, hi, samples), [p for p in profile.breakpoints if lo <= p <= hi])
    )
    worst = min(omega1_sq(float(t)) for t in grid)
    if worst < 0:
        msg = f"ω₁² が負になります (最小値 {worst:g}, 区間 [{lo:g}, {hi:g}])"
        logger.error(msg)
        raise NegativeModeFrequencyError(msg)
    return omega1_sq, profile.omega2


def recouple(omega1_sq: ScalarFn, omega2_sq: ScalarFn) -> tuple[ScalarFn, ScalarFn]:
    """decouple の逆写像: (ω₁², ω₂²) → (ω², k) = (ω₂², (ω₁² - ω₂²)/2)."""

    def k(t: float) -> float:
        return 0.5 * (omega1_sq(t) - omega2_sq(t))

    return omega2_sq, k


@dataclass(frozen=True)
class CoupledSystem:
    """基準振動それぞれの EMP 解 (同じ t₀ から出発)."""

    sol1: EmpSolution
    sol2: EmpSolution

    def __post_init__(self) -> None:
        if self.sol1.t0 != self.sol2.t0:
            msg = f"2 つの解の t₀ が異なります: {self.sol1.t0} / {self.sol2.t0}"
            logger.error(msg)
            raise ValidationError("t0", msg)

    @property
    def c1(self) -> float:
        return self.sol1.c

    @property
    def c2(self) -> float:
        return self.sol2.c


def _static_solution(omega: float, t0: float) -> EmpSolution:
    # 一定周波数なら b ≡ 1. t₀ = -∞ では τ の原点を 0 に置く
    origin = t0 if math.isfinite(t0) else 0.0
    return EmpSolution(
        b=lambda t: 1.0,  # noqa: ARG005
        b_dot=lambda t: 0.0,  # noqa: ARG005
        tau=lambda t: t - origin,
        c=omega,
        t0=t0,
        omega0=omega,
        omega2=lambda t: omega * omega,  # noqa: ARG005
        label=ConstantFrequency.kind,
    )


def _mode_solution(
    profile: FrequencyProfile, ic: InitialCondition, window: tuple[float, float] | None
) -> EmpSolution:
    if isinstance(profile, ConstantFrequency):
        if profile.omega0 <= 0:
            msg = f"基準振動の周波数は正である必要があります: {profile.omega0}"
            logger.error(msg)
            raise ValidationError("omega2_sq", msg)
        return _static_solution(profile.omega0, ic.t0)
    try:
        return closed_form_emp(profile, ic)
    except NoClosedFormError:
        if window is None:
            raise
        logger.info(f"{profile.kind}: 閉形式がないため数値解に切り替えます")
        return solve_numeric_emp(profile, ic, window)


def coupled_system(
    profile1: FrequencyProfile,
    profile2: FrequencyProfile,
    ic: InitialCondition | None = None,
    window: tuple[float, float] | None = None,
) -> CoupledSystem:
    """基準振動 ω₁, ω₂ のプロファイルから CoupledSystem を作る.

    閉形式がないプロファイルは window を与えれば数値解で代替する。
    """
    ic = ic if ic is not None else InitialCondition()
    system = CoupledSystem(
        sol1=_mode_solution(profile1, ic, window), sol2=_mode_solution(profile2, ic, window)
    )
    logger.info(f"結合振動子: c₁={system.c1:.10g}, c₂={system.c2:.10g}, t₀={ic.t0:g}")
    return system


def quenched_coupling(a: float, eps: float, omega2_sq: float) -> CoupledSystem:
    """ω₁ = QuenchedSechBump, ω₂ 一定 (t₀ = 0) の結合 k₁(t)."""
    return coupled_system(QuenchedSechBump(a, eps), ConstantFrequency(math.sqrt(omega2_sq)))


def quenched_lorentz_coupling(a: float, eps: float, omega2_sq: float) -> CoupledSystem:
    """ω₁ = QuenchedLorentz, ω₂ 一定 (t₀ = 0)."""
    return coupled_system(QuenchedLorentz(a, eps), ConstantFrequency(math.sqrt(omega2_sq)))


def bell_coupling(a: float, eps: float, omega2_sq: float) -> CoupledSystem:
    """ω₁ = SechBump (t₀ = -∞), ω₂ 一定の結合 k₂(t)."""
    return coupled_system(
        SechBump(a, eps), ConstantFrequency(math.sqrt(omega2_sq)), InitialCondition.remote_past()
    )


def coupling(system: CoupledSystem, t: float) -> float:
    """k(t) = (ω₁² - ω₂²)/2."""
    return 0.5 * (system.sol1.omega2(t) - system.sol2.omega2(t))


# =============================================================================
# 縮約密度行列
# =============================================================================
@dataclass(frozen=True)
class GaussianReduced:
    """ρ(x, x̃) ∝ exp(χxx̃ + iφ(x² - x̃²) - ζ(x² + x̃²)/2) のパラメータ."""

    zeta: float
    chi: float
    phi: float

    @property
    def xi(self) -> float:
        """ξ = χ/(ζ + √(ζ² - χ²)). 固有値は (1-ξ)ξ^k."""
        return self.chi / (self.zeta + math.sqrt(self.zeta**2 - self.chi**2))


class EntanglementEntropy(NamedTuple):
    """(Rényi エントロピー, von Neumann エントロピー)."""

    renyi: float
    von_neumann: float


class Classicality(NamedTuple):
    """量子デコヒーレンス δ_QD と古典的相関 δ_CC."""

    decoherence: float
    correlation: float


class SingleClassicality(NamedTuple):
    """単一振動子の (δ_QD, δ_CC, ΔSj との関係式の残差)."""

    decoherence: float
    correlation: float
    residual: float


class Spectrum(NamedTuple):
    """離散化した縮約密度行列の固有値 (降順) とエントロピー."""

    eigenvalues: NDArray[np.float64]
    entropy: float


def reduced_params(system: CoupledSystem, t: float) -> GaussianReduced:
    """g_j = c_j/b_j², h_j = ḃ_j/b_j から (ζ, χ, φ) を計算."""
    b1, b2 = system.sol1.b(t), system.sol2.b(t)
    g1 = system.c1 / (b1 * b1)
    g2 = system.c2 / (b2 * b2)
    h1 = system.sol1.b_dot(t) / b1
    h2 = system.sol2.b_dot(t) / b2
    total = g1 + g2
    spread = (h1 - h2) ** 2
    zeta = (total**2 + 4.0 * g1 * g2 + spread) / (4.0 * total)
    chi = ((g1 - g2) ** 2 + spread) / (4.0 * total)
    phi = 0.25 * (h1 + h2) - 0.25 * (g1 - g2) / total * (h1 - h2)
    return GaussianReduced(zeta=zeta, chi=chi, phi=phi)


def entanglement_entropy(reduced: GaussianReduced, alpha: float) -> EntanglementEntropy:
    """幾何分布の固有値 (1-ξ)ξ^k から Rényi / von Neumann エントロピーを計算.

    tr ρ^α = (1-ξ)^α/(1-ξ^α). α = 1 では R_α = S.

    Raises:
        DomainError: ξ ∉ [0, 1) または α ≤ 0
    """
    xi = reduced.xi
    if not 0.0 <= xi < 1.0:
        msg = f"ξ は [0, 1) の範囲である必要があります: {xi}"
        logger.error(msg)
        raise DomainError(msg)
    if not alpha > 0:
        msg = f"Rényi 次数 α は正である必要があります: {alpha}"
        logger.error(msg)
        raise DomainError(msg)
    if xi == 0.0:
        return EntanglementEntropy(renyi=0.0, von_neumann=0.0)

    entropy = -math.log1p(-xi) - xi / (1.0 - xi) * math.log(xi)
    if alpha == 1.0:
        return EntanglementEntropy(renyi=entropy, von_neumann=entropy)
    renyi = (alpha * math.log1p(-xi) - math.log1p(-(xi**alpha))) / (1.0 - alpha)
    return EntanglementEntropy(renyi=renyi, von_neumann=entropy)


def reduced_kernel(
    system: CoupledSystem, x: ArrayLike, x_tilde: ArrayLike, t: float
) -> complex | NDArray[np.complex128]:
    """縮約密度行列の核 ρ(x, x̃, t). 規格化 tr ρ = 1."""
    reduced = reduced_params(system, t)
    x_arr = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(x_tilde, dtype=np.float64)
    exponent = (
        reduced.chi * x_arr * y_arr
        + 1j * reduced.phi * (x_arr**2 - y_arr**2)
        - 0.5 * reduced.zeta * (x_arr**2 + y_arr**2)
    )
    value = math.sqrt((reduced.zeta - reduced.chi) / math.pi) * np.exp(exponent)
    return complex(value) if value.ndim == 0 else value


def spectrum_oracle(
    system: CoupledSystem,
    t: float,
    gridsize: int | None = None,
    halfwidth: float | None = None,
) -> Spectrum:
    """核を一様格子で離散化し、対称固有値問題として固有値を求める.

    位相 e^{iφ(x² - x̃²)} はユニタリ変換で除けるので実対称核だけを扱う。

    Raises:
        ConvergenceFailureError: 固有値の和が 1 から TRACE_TOL 以上ずれた
    """
    gridsize = config.SPECTRUM_GRIDSIZE if gridsize is None else gridsize
    if gridsize < config.SPECTRUM_MIN_GRIDSIZE:
        msg = f"格子点数は {config.SPECTRUM_MIN_GRIDSIZE} 以上が必要です: {gridsize}"
        logger.error(msg)
        raise ValidationError("gridsize", msg)
    reduced = reduced_params(system, t)
    gap = reduced.zeta - reduced.chi
    half = config.SPECTRUM_WIDTHS / math.sqrt(gap) if halfwidth is None else halfwidth

    x, step = np.linspace(-half, half, gridsize, retstep=True)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    kernel = math.sqrt(gap / math.pi) * np.exp(
        reduced.chi * xx * yy - 0.5 * reduced.zeta * (xx**2 + yy**2)
    )
    eigenvalues = np.clip(eigh(step * kernel, eigvals_only=True)[::-1], 0.0, None)

    trace = float(np.sum(eigenvalues))
    if abs(trace - 1.0) > config.TRACE_TOL:
        msg = f"固有値の和が 1 になりません: {trace:.12g} (格子 {gridsize}, 半幅 {half:g})"
        logger.error(msg)
        raise ConvergenceFailureError(msg)
    positive = eigenvalues[eigenvalues > config.DENSITY_FLOOR]
    entropy = float(-np.sum(positive * np.log(positive)))
    logger.debug(f"スペクトル: λ₀={eigenvalues[0]:.12g}, S={entropy:.12g}")
    return Spectrum(eigenvalues=eigenvalues, entropy=entropy)


def purity_oracle(system: CoupledSystem, t: float, points: int | None = None) -> float:
    """tr ρ² = ∫∫|ρ(x, x̃)|² を 2 次元台形則で計算."""
    points = config.GRID2D_POINTS if points is None else points
    reduced = reduced_params(system, t)
    half = config.SPECTRUM_WIDTHS / math.sqrt(reduced.zeta - reduced.chi)
    axis = np.linspace(-half, half, points)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    density = np.abs(np.asarray(reduced_kernel(system, xx, yy, t))) ** 2
    return float(trapezoid(trapezoid(density, axis, axis=1), axis))


# =============================================================================
# デコヒーレンスと古典的相関
# =============================================================================
def classicality(reduced: GaussianReduced) -> Classicality:
    """δ_QD = √((ζ-χ)/(ζ+χ)) と δ_CC = √(ζ² - χ²)/(4|φ|) (φ = 0 なら +∞)."""
    zeta, chi, phi = reduced.zeta, reduced.chi, reduced.phi
    decoherence = math.sqrt((zeta - chi) / (zeta + chi))
    correlation = math.inf if phi == 0 else math.sqrt(zeta**2 - chi**2) / (4.0 * abs(phi))
    return Classicality(decoherence=decoherence, correlation=correlation)


def decoherence_from_modes(system: CoupledSystem, t: float) -> float:
    """δ_QD を (b₁, b₂) から直接計算."""
    c1, c2 = system.c1, system.c2
    b1, b2 = system.sol1.b(t), system.sol2.b(t)
    cross = system.sol1.b_dot(t) * b2 - system.sol2.b_dot(t) * b1
    denominator = math.sqrt((c1 * b2**2 + c2 * b1**2) ** 2 + (b1 * b2 * cross) ** 2)
    return 2.0 * math.sqrt(c1 * c2) * b1 * b2 / denominator


def single_classicality(sol: EmpSolution, t: float) -> SingleClassicality:
    """単一振動子の基底状態: δ_QD = 1, δ_CC = c/(2b|ḃ|).

    残差 ΔSj - ½ln(1 + 1/(4δ_CC²)) は恒等的に 0.
    """
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    correlation = math.inf if b_dot == 0 else sol.c / (2.0 * b * abs(b_dot))
    # 1/(4δ_CC²) = b²ḃ²/c²
    residual = entropy_increases(sol, t).joint - 0.5 * math.log1p((b * b_dot / sol.c) ** 2)
    return SingleClassicality(decoherence=1.0, correlation=correlation, residual=residual)
