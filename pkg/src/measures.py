"""情報量の計算.

エントロピー増分・Rényi 増分・Fisher 情報量は b(t), ḃ(t) だけで閉じた形になる。
絶対エントロピーは求積 (オラクル) で求め、閉形式との整合を検証に使う。
単位はすべて nat (自然対数).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import config

from src.emp import EmpSolution
from src.errors import DomainError
from src.logger import get_logger
from src.states import BasisState, HermiteDensity, density_shape, hermite_function_derivative

logger = get_logger(__name__)


class EntropyIncrease(NamedTuple):
    """t₀ からのエントロピー増分 (ΔSx, ΔSp, ΔSj)."""

    position: float
    momentum: float
    joint: float


class InfoPair(NamedTuple):
    """位置・運動量の組."""

    position: float
    momentum: float


class InequalityMargins(NamedTuple):
    """各不等式の余裕 (すべて非負)."""

    stam_position: float
    stam_momentum: float
    cramer_rao_position: float
    cramer_rao_momentum: float
    heisenberg: float


def _spread(sol: EmpSolution, t: float) -> tuple[float, float]:
    """(b, b²ḃ²/ω₀²)."""
    b = sol.b(t)
    b_dot = sol.b_dot(t)
    return b, (b * b_dot / sol.omega0) ** 2


def _check_alpha(alpha: float) -> None:
    if not alpha > 0 or alpha == 1.0 or math.isinf(alpha):
        msg = f"Rényi 次数 α は正かつ 1 以外である必要があります: {alpha}"
        logger.error(msg)
        raise DomainError(msg)


# =============================================================================
# 閉形式
# =============================================================================
def entropy_increases(sol: EmpSolution, t: float) -> EntropyIncrease:
    """Shannon エントロピーの増分. n に依らない.

    Args:
        sol: EMP 解 (ω₀ = c)
        t: 時刻

    Returns:
        EntropyIncrease: ΔSx = ln b, ΔSp = ½ln((ω₀²+b²ḃ²)/(ω₀²b²)), ΔSj = ΔSx + ΔSp
    """
    b, chirp = _spread(sol, t)
    joint = 0.5 * math.log1p(chirp)
    position = math.log(b)
    return EntropyIncrease(position=position, momentum=joint - position, joint=joint)


def renyi_increase(sol: EmpSolution, alpha: float, t: float) -> InfoPair:
    """Rényi エントロピーの増分. α にも n にも依らず Shannon の増分と同じ値になる.

    Raises:
        DomainError: α ≤ 0 または α = 1
    """
    _check_alpha(alpha)
    increase = entropy_increases(sol, t)
    return InfoPair(position=increase.position, momentum=increase.momentum)


def fisher(sol: EmpSolution, n: int, t: float) -> InfoPair:
    """Fisher 情報量 Fx = 2ω₀(2n+1)/b², Fp = 2b²ω₀(2n+1)/(ω₀²+b²ḃ²)."""
    b, chirp = _spread(sol, t)
    level = 2 * n + 1
    fx = 2.0 * sol.omega0 * level / (b * b)
    fp = 2.0 * level * b * b / (sol.omega0 * (1.0 + chirp))
    return InfoPair(position=fx, momentum=fp)


# =============================================================================
# 求積オラクル
# =============================================================================
def _shannon(shape: HermiteDensity) -> float:
    def integrand(u: float) -> float:
        rho = float(shape(u))
        if rho < config.DENSITY_FLOOR:
            return 0.0
        return -rho * math.log(rho)

    return shape.integrate(integrand)


def _renyi(shape: HermiteDensity, alpha: float) -> float:
    power = shape.integrate(lambda u: float(shape(u)) ** alpha)
    return math.log(power) / (1.0 - alpha)


def _fisher(shape: HermiteDensity) -> float:
    # ρ'²/ρ = 4h_n'(u/L)²/L³
    scale = shape.scale

    def integrand(u: float) -> float:
        slope = float(hermite_function_derivative(shape.n, u / scale))
        return 4.0 * slope * slope / scale**3

    return shape.integrate(integrand)


def entropy_oracle(state: BasisState, t: float) -> InfoPair:
    """位置・運動量の絶対 Shannon エントロピーを適応求積で計算.

    Raises:
        QuadratureFailureError: 求積が収束しない
    """
    sx = _shannon(density_shape(state, t, "position"))
    sp = _shannon(density_shape(state, t, "momentum"))
    logger.debug(f"エントロピー (n={state.n}, t={t:g}): Sx={sx:.12g}, Sp={sp:.12g}")
    return InfoPair(position=sx, momentum=sp)


def renyi_oracle(state: BasisState, alpha: float, t: float) -> InfoPair:
    """絶対 Rényi エントロピー R_α = ln∫ρ^α/(1-α) の求積."""
    _check_alpha(alpha)
    return InfoPair(
        position=_renyi(density_shape(state, t, "position"), alpha),
        momentum=_renyi(density_shape(state, t, "momentum"), alpha),
    )


def fisher_oracle(state: BasisState, t: float) -> InfoPair:
    """Fisher 情報量 ∫ρ'²/ρ の求積."""
    return InfoPair(
        position=_fisher(density_shape(state, t, "position")),
        momentum=_fisher(density_shape(state, t, "momentum")),
    )


def complexity(state: BasisState, t: float) -> InfoPair:
    """Fisher-Shannon 複雑度 CFS = F·e^{2S}. 時間に依らない."""
    entropy = entropy_oracle(state, t)
    info = fisher(state.sol, state.n, t)
    return InfoPair(
        position=info.position * math.exp(2.0 * entropy.position),
        momentum=info.momentum * math.exp(2.0 * entropy.momentum),
    )


def inequality_margins(state: BasisState, t: float) -> InequalityMargins:
    """Stam, Cramér-Rao, エントロピー版 Heisenberg 不等式の余裕.

    (4⟨p²⟩-Fx, 4⟨x²⟩-Fp, Fx-1/Δ²x, Fp-1/Δ²p, ΔxΔp - e^{ΔSj}/(2(2n+1)))
    """
    sol = state.sol
    b, chirp = _spread(sol, t)
    w0 = sol.omega0
    level = 2 * state.n + 1
    x2 = b * b * level / (2.0 * w0)
    p2 = w0 * (1.0 + chirp) * level / (2.0 * b * b)
    info = fisher(sol, state.n, t)
    joint = entropy_increases(sol, t).joint
    return InequalityMargins(
        stam_position=4.0 * p2 - info.position,
        stam_momentum=4.0 * x2 - info.momentum,
        cramer_rao_position=info.position - 1.0 / x2,
        cramer_rao_momentum=info.momentum - 1.0 / p2,
        heisenberg=math.sqrt(x2 * p2) - math.exp(joint) / (2.0 * level),
    )


# =============================================================================
# 時系列
# =============================================================================
@dataclass(frozen=True)
class InfoRecord:
    """時刻 t の情報量一式."""

    t: float
    delta_sx: float
    delta_sp: float
    delta_sj: float
    fx: float
    fp: float
    cfsx: float
    cfsp: float
    margins: InequalityMargins
    renyi: Mapping[float, InfoPair] = field(default_factory=dict)


def initial_entropies(state: BasisState) -> InfoPair:
    """t₀ (b = 1, ḃ = 0) での絶対エントロピー. t₀ = -∞ でも使える."""
    root = math.sqrt(state.sol.omega0)
    return InfoPair(
        position=_shannon(HermiteDensity(state.n, 1.0 / root)),
        momentum=_shannon(HermiteDensity(state.n, root)),
    )


def info_series(
    state: BasisState,
    times: Iterable[float],
    alphas: Iterable[float] = config.DEFAULT_RENYI_ALPHAS,
) -> list[InfoRecord]:
    """時刻列に沿って InfoRecord を作る.

    絶対エントロピーは t₀ で一度だけ求積し、以後は閉形式の増分を足す。

    Args:
        state: 基底状態
        times: 時刻列
        alphas: 記録する Rényi 次数

    Returns:
        list[InfoRecord]: times と同じ順序
    """
    alphas = tuple(alphas)
    for alpha in alphas:
        _check_alpha(alpha)
    base = initial_entropies(state)
    logger.info(
        f"情報量の時系列: n={state.n}, ω₀={state.sol.omega0:g}, "
        f"Sx(t₀)={base.position:.10g}, Sp(t₀)={base.momentum:.10g}"
    )

    records = []
    for t in times:
        increase = entropy_increases(state.sol, t)
        info = fisher(state.sol, state.n, t)
        renyi = {alpha: renyi_increase(state.sol, alpha, t) for alpha in alphas}
        records.append(
            InfoRecord(
                t=t,
                delta_sx=increase.position,
                delta_sp=increase.momentum,
                delta_sj=increase.joint,
                fx=info.position,
                fp=info.momentum,
                cfsx=info.position * math.exp(2.0 * (base.position + increase.position)),
                cfsp=info.momentum * math.exp(2.0 * (base.momentum + increase.momentum)),
                margins=inequality_margins(state, t),
                renyi=renyi,
            )
        )
    return records
