"""フェルミオン系のトラップ解除 (Lorentz 型クエンチ) の Kibble-Zurek 解析.

ω(t) = αε²/(t² + ε²) を t₀ = 0 から与えたときの b² を無次元時間 s = t/ε と
β = αε で表す。λ = √(1 + β²).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq

from src.errors import DomainError, RootNotBracketedError, ValidationError
from src.logger import get_logger
from src.profiles import QuenchedLorentz, lorentz_index

logger = get_logger(__name__)

# 厳密な臨界点を探すときの上限 (s)
_BRACKET_LIMIT = 1e8


@dataclass(frozen=True)
class QuenchSetup:
    """クエンチのパラメータ (α: クエンチ後の周波数スケール, ε: 時間スケール)."""

    alpha: float
    eps: float

    def __post_init__(self) -> None:
        for name in ("alpha", "eps"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                msg = f"正の有限値である必要があります: {value}"
                logger.error(f"{name}: {msg}")
                raise ValidationError(name, msg)

    @classmethod
    def from_beta(cls, beta: float, eps: float = 1.0) -> QuenchSetup:
        """β = αε から作る."""
        return cls(alpha=beta / eps, eps=eps)

    @property
    def beta(self) -> float:
        return self.alpha * self.eps

    @property
    def index(self) -> float:
        """λ = √(1 + β²)."""
        return lorentz_index(self.alpha * self.eps**2, self.eps)

    def to_time(self, s: ArrayLike) -> float | NDArray[np.float64]:
        return _scalar_or_array(np.asarray(s, dtype=np.float64) * self.eps)

    def to_scaled(self, t: ArrayLike) -> float | NDArray[np.float64]:
        return _scalar_or_array(np.asarray(t, dtype=np.float64) / self.eps)


class KzTime(NamedTuple):
    """臨界時刻. 慣例値 (s_c = β) と |ω̇|/ω² = 1 の厳密解."""

    t_c: float
    s_c: float
    t_exact: float
    s_exact: float


@dataclass(frozen=True)
class QuenchReport:
    """s 格子上の b², b²_ad, Δb² と臨界点・後期展開の係数."""

    s: NDArray[np.float64]
    b2: NDArray[np.float64]
    b2_ad: NDArray[np.float64]
    delta: NDArray[np.float64]
    kz: KzTime
    b2_at_critical: float
    # s²β² - sπβ²/2 + (1 + β²) の係数 (s², s, 1)
    late_coefficients: tuple[float, float, float]


def _scalar_or_array(value: NDArray[np.float64]) -> float | NDArray[np.float64]:
    return float(value) if value.ndim == 0 else value


def _scaled(s: ArrayLike) -> NDArray[np.float64]:
    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(s_arr < 0):
        msg = "s は 0 以上である必要があります"
        logger.error(msg)
        raise DomainError(msg)
    return s_arr


def quench_profile(q: QuenchSetup) -> QuenchedLorentz:
    """対応する周波数プロファイル (a = αε², t₀ = 0)."""
    return QuenchedLorentz(a=q.alpha * q.eps**2, eps=q.eps, t0=0.0)


def b2_scaled(q: QuenchSetup, s: ArrayLike) -> float | NDArray[np.float64]:
    """b²(s) = (s²+1)/(2(1+β²))·(cos(2λ·arctan s) + 1 + 2β²)."""
    s_arr = _scaled(s)
    beta2 = q.beta**2
    value = (
        (s_arr**2 + 1.0)
        / (2.0 * (1.0 + beta2))
        * (np.cos(2.0 * q.index * np.arctan(s_arr)) + 1.0 + 2.0 * beta2)
    )
    return _scalar_or_array(value)


def adiabatic_b2_scaled(s: ArrayLike) -> float | NDArray[np.float64]:
    """断熱近似 b²_ad = ω₀/ω = 1 + s²."""
    s_arr = _scaled(s)
    return _scalar_or_array(1.0 + s_arr**2)


def delta_b2(q: QuenchSetup, s: ArrayLike) -> float | NDArray[np.float64]:
    """Δb² = b²_ad - b² = (s²+1)/(1+β²)·sin²(λ·arctan s) ≥ 0."""
    s_arr = _scaled(s)
    value = (s_arr**2 + 1.0) / (1.0 + q.beta**2) * np.sin(q.index * np.arctan(s_arr)) ** 2
    return _scalar_or_array(value)


def landau_ratio(q: QuenchSetup, s: float) -> float:
    """|ω̇|/ω² = 2s/β."""
    return 2.0 * abs(s) / q.beta


def kz_time(q: QuenchSetup) -> KzTime:
    """Landau 基準による臨界時刻.

    慣例値 t_c = αε²/2 (s_c = β) と、|ω̇|/ω² = 1 を brentq で解いた厳密値を返す。

    Raises:
        RootNotBracketedError: 探索上限までに符号が変わらない
    """

    def excess(s: float) -> float:
        return landau_ratio(q, s) - 1.0

    upper = 1.0
    while excess(upper) <= 0:
        upper *= 2.0
        if upper > _BRACKET_LIMIT:
            msg = f"|ω̇|/ω² = 1 となる s が [0, {_BRACKET_LIMIT:g}] にありません (β={q.beta:g})"
            logger.error(msg)
            raise RootNotBracketedError(msg)
    s_exact = float(brentq(excess, 0.0, upper, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return KzTime(
        t_c=q.alpha * q.eps**2 / 2.0,
        s_c=q.beta,
        t_exact=s_exact * q.eps,
        s_exact=s_exact,
    )


def critical_b2(q: QuenchSetup) -> float:
    """b²(s_c) = β² + cos²(λ·arctan β)."""
    return q.beta**2 + math.cos(q.index * math.atan(q.beta)) ** 2


def late_time(q: QuenchSetup, s: ArrayLike) -> float | NDArray[np.float64]:
    """β ≪ 1, s ≫ 1 での展開 s²β² - sπβ²/2 + β² + 1. s が小さい所では意味を持たない."""
    s_arr = np.asarray(s, dtype=np.float64)
    beta2 = q.beta**2
    return _scalar_or_array(s_arr**2 * beta2 - s_arr * math.pi * beta2 / 2.0 + beta2 + 1.0)


def late_time_physical(alpha: float, eps: float, t: ArrayLike) -> float | NDArray[np.float64]:
    """late_time を物理時間で書いたもの. ε → 0 で 1 + α²t² (急激なクエンチ) に戻る."""
    t_arr = np.asarray(t, dtype=np.float64)
    a2 = alpha * alpha
    return _scalar_or_array(a2 * t_arr**2 - math.pi * a2 * eps * t_arr / 2.0 + a2 * eps**2 + 1.0)


def fermion_observable(q: QuenchSetup, s: ArrayLike) -> float | NDArray[np.float64]:
    """⟨Ô⟩(s) ∝ b²(s). 比例定数は定まらないので 1 とする."""
    return b2_scaled(q, s)


def subregion_entropy_proxy(q: QuenchSetup, s: ArrayLike) -> float | NDArray[np.float64]:
    """部分領域のエンタングルメントエントロピーの s 依存 b⁻¹(s) (定数倍は不定)."""
    return _scalar_or_array(1.0 / np.sqrt(np.asarray(b2_scaled(q, s))))


def delta_b2_zeros(q: QuenchSetup) -> list[float]:
    """Δb² の (0, ∞) 上の零点 s_k = tan(kπ/λ), kπ/λ < π/2."""
    lam = q.index
    zeros = []
    k = 1
    while k * math.pi / lam < math.pi / 2:
        zeros.append(math.tan(k * math.pi / lam))
        k += 1
    return zeros


def find_delta_b2_zeros(q: QuenchSetup, s_max: float = 1e3, points: int = 100_001) -> list[float]:
    """符号つき振幅 sin(λ·arctan s) の符号変化から Δb² の零点を数値的に求める.

    Δb² 自体は零点で符号を変えないので振幅の側で探す。
    """
    lam = q.index

    def amplitude(s: float) -> float:
        return math.sin(lam * math.atan(s))

    grid = np.linspace(0.0, s_max, points)[1:]
    values = np.sin(lam * np.arctan(grid))
    crossings = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    zeros = [float(brentq(amplitude, grid[i], grid[i + 1], xtol=1e-14)) for i in crossings]
    logger.debug(f"Δb² の零点 (β={q.beta:g}, s ≤ {s_max:g}): {len(zeros)} 個")
    return zeros


def count_delta_b2_zeros(q: QuenchSetup, s_max: float = 1e3, points: int = 100_001) -> int:
    """(0, s_max] 上の Δb² の零点の数."""
    return len(find_delta_b2_zeros(q, s_max, points))


def quench_report(q: QuenchSetup, s_grid: ArrayLike) -> QuenchReport:
    """s 格子上の系列と臨界点をまとめる."""
    s = _scaled(s_grid)
    kz = kz_time(q)
    beta2 = q.beta**2
    report = QuenchReport(
        s=s,
        b2=np.asarray(b2_scaled(q, s)),
        b2_ad=np.asarray(adiabatic_b2_scaled(s)),
        delta=np.asarray(delta_b2(q, s)),
        kz=kz,
        b2_at_critical=critical_b2(q),
        late_coefficients=(beta2, -math.pi * beta2 / 2.0, 1.0 + beta2),
    )
    logger.info(
        f"クエンチ解析: β={q.beta:g}, s_c={kz.s_c:g}, 厳密な臨界点 s={kz.s_exact:.12g}, "
        f"b²(s_c)={report.b2_at_critical:.12g}"
    )
    return report
