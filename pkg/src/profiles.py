"""周波数プロファイルのカタログと EMP 方程式の閉形式解.

各プロファイルは滑らかな区間の列として表され、区間ごとに ẍ = -ω²x の
複素基本解 ζ(t) = ρ·e^{iψ} (ψ は連続) を持つ。Z = x₁ + i·c·x₂ を区間ごとに
Z = αζ + βζ̄ と書き、接合点で Z, Ż を引き継ぐと b = |Z| と、
分岐の跳びのない τ = arg Z / c が得られる。
"""

from __future__ import annotations

import bisect
import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import ClassVar, Literal, Protocol

import config

from src.emp import EmpSolution
from src.errors import DomainError, NoClosedFormError, ValidationError
from src.logger import get_logger

logger = get_logger(__name__)

_INF = math.inf


def _require(ok: bool, field_name: str, message: str) -> None:
    if not ok:
        msg = f"{field_name}: {message}"
        logger.error(msg)
        raise ValidationError(field_name, message)


def _sech2(u: float) -> float:
    """sech²(u). cosh のオーバーフローを避ける."""
    e = math.exp(-2.0 * abs(u))
    return 4.0 * e / (1.0 + e) ** 2


def lorentz_index(a: float, eps: float) -> float:
    """ローレンツ型プロファイルの指数 λ = √(1 + a²/ε²)."""
    return math.sqrt(1.0 + (a / eps) ** 2)


# =============================================================================
# 初期条件
# =============================================================================
@dataclass(frozen=True)
class InitialCondition:
    """瞬間固有状態の初期条件: b(t₀)=1, ḃ(t₀)=0, c=ω(t₀)."""

    t0: float = 0.0
    kind: Literal["instantaneous_eigenstate"] = "instantaneous_eigenstate"

    def __post_init__(self) -> None:
        _require(not math.isnan(self.t0), "t0", "NaN は使えません")
        _require(self.t0 != _INF, "t0", "+inf は使えません")

    @classmethod
    def remote_past(cls) -> InitialCondition:
        """t₀ = -∞ の初期条件."""
        return cls(t0=-_INF)

    @property
    def is_remote_past(self) -> bool:
        return math.isinf(self.t0)


# =============================================================================
# 複素基本解 (区間ごと)
# =============================================================================
class _Mode(Protocol):
    def value(self, t: float) -> tuple[complex, complex, float]:
        """(ζ, ζ̇, 連続な偏角 ψ) を返す. Im(ζ̄ζ̇) > 0."""
        ...


@dataclass(frozen=True)
class _HarmonicMode:
    omega: float
    t_ref: float

    def value(self, t: float) -> tuple[complex, complex, float]:
        psi = self.omega * (t - self.t_ref)
        zeta = cmath.exp(1j * psi)
        return zeta, 1j * self.omega * zeta, psi


@dataclass(frozen=True)
class _FreeMode:
    t_ref: float

    def value(self, t: float) -> tuple[complex, complex, float]:
        s = t - self.t_ref
        return complex(1.0, s), 1j, math.atan(s)


@dataclass(frozen=True)
class _SechMode:
    """ω² = a² + 2sech²(t/ε)/ε² (a > 0) の解 e^{iat}(tanh(t/ε) - iaε)."""

    a: float
    eps: float

    def value(self, t: float) -> tuple[complex, complex, float]:
        u = t / self.eps
        tanh = math.tanh(u)
        k = self.a * self.eps
        rotor = cmath.exp(1j * self.a * t)
        inner = complex(tanh, -k)
        zeta = rotor * inner
        zeta_dot = rotor * (1j * self.a * inner + _sech2(u) / self.eps)
        return zeta, zeta_dot, self.a * t + math.atan2(-k, tanh)


@dataclass(frozen=True)
class _SechFreeMode:
    """a = 0 の場合の解 (1 - s·tanh s) + i·tanh s, s = t/ε."""

    eps: float

    def value(self, t: float) -> tuple[complex, complex, float]:
        u = t / self.eps
        tanh = math.tanh(u)
        sech2 = _sech2(u)
        zeta = complex(1.0 - u * tanh, tanh)
        zeta_dot = complex(-(tanh + u * sech2) / self.eps, sech2 / self.eps)
        return zeta, zeta_dot, math.atan2(tanh, 1.0 - u * tanh)


@dataclass(frozen=True)
class _LorentzMode:
    """ω = a/(t²+ε²) の解 √(t²+ε²)·e^{iλ·arctan(t/ε)}."""

    a: float
    eps: float

    def value(self, t: float) -> tuple[complex, complex, float]:
        lam = lorentz_index(self.a, self.eps)
        r = math.hypot(t, self.eps)
        psi = lam * math.atan2(t, self.eps)
        rotor = cmath.exp(1j * psi)
        return r * rotor, rotor * complex(t, lam * self.eps) / r, psi


def _harmonic_or_free(omega: float, t_ref: float) -> _Mode:
    return _HarmonicMode(omega, t_ref) if omega > 0 else _FreeMode(t_ref)


@dataclass(frozen=True)
class _Piece:
    """区間 (lo, hi] とその上の基本解."""

    lo: float
    hi: float
    mode: _Mode


# =============================================================================
# プロファイル
# =============================================================================
class FrequencyProfile:
    """ω²(t) を与えるプロファイルの基底クラス."""

    kind: ClassVar[str] = "abstract"

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """ω² またはその導関数が不連続になる時刻."""
        return ()

    def omega2(self, t: float) -> float:
        raise NotImplementedError

    def omega(self, t: float) -> float:
        return math.sqrt(max(self.omega2(t), 0.0))

    def past_start(self) -> float | None:
        """t₀ = -∞ を数値的に近似する開始時刻 (対応しないなら None)."""
        return None

    def pieces(self) -> tuple[_Piece, ...]:
        """閉形式の区間列."""
        msg = f"{self.kind} には閉形式解がありません"
        logger.error(msg)
        raise NoClosedFormError(msg)


@dataclass(frozen=True)
class ConstantFrequency(FrequencyProfile):
    """ω(t) = ω₀."""

    omega0: float
    kind: ClassVar[str] = "constant"

    def __post_init__(self) -> None:
        _require(self.omega0 >= 0, "omega0", "0 以上である必要があります")

    def omega2(self, t: float) -> float:  # noqa: ARG002
        return self.omega0**2

    def pieces(self) -> tuple[_Piece, ...]:
        return (_Piece(-_INF, _INF, _harmonic_or_free(self.omega0, 0.0)),)


@dataclass(frozen=True)
class SechBump(FrequencyProfile):
    """ω²(t) = 2/(ε²cosh²(t/ε)) + a²."""

    a: float
    eps: float
    kind: ClassVar[str] = "sech"

    def __post_init__(self) -> None:
        _require(self.eps > 0, "eps", "正である必要があります")
        _require(self.a >= 0, "a", "0 以上である必要があります")

    def omega2(self, t: float) -> float:
        return 2.0 * _sech2(t / self.eps) / self.eps**2 + self.a**2

    def past_start(self) -> float | None:
        return -config.PAST_HORIZON * self.eps

    def bump_mode(self) -> _Mode:
        return _SechMode(self.a, self.eps) if self.a > 0 else _SechFreeMode(self.eps)

    def pieces(self) -> tuple[_Piece, ...]:
        return (_Piece(-_INF, _INF, self.bump_mode()),)


@dataclass(frozen=True)
class QuenchedSechBump(FrequencyProfile):
    """t ≤ 0 で最大値に固定し、t > 0 で SechBump に従う."""

    a: float
    eps: float
    kind: ClassVar[str] = "quenched_sech"

    def __post_init__(self) -> None:
        _require(self.eps > 0, "eps", "正である必要があります")
        _require(self.a >= 0, "a", "0 以上である必要があります")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (0.0,)

    @property
    def omega_initial(self) -> float:
        return math.sqrt(self.a**2 + 2.0 / self.eps**2)

    @property
    def omega_final(self) -> float:
        return self.a

    def omega2(self, t: float) -> float:
        if t <= 0:
            return self.omega_initial**2
        return SechBump(self.a, self.eps).omega2(t)

    def pieces(self) -> tuple[_Piece, ...]:
        return (
            _Piece(-_INF, 0.0, _HarmonicMode(self.omega_initial, 0.0)),
            _Piece(0.0, _INF, SechBump(self.a, self.eps).bump_mode()),
        )


@dataclass(frozen=True)
class LorentzBell(FrequencyProfile):
    """ω(t) = a/(t²+ε²)."""

    a: float
    eps: float
    kind: ClassVar[str] = "lorentz"

    def __post_init__(self) -> None:
        _require(self.eps > 0, "eps", "正である必要があります")
        _require(self.a >= 0, "a", "0 以上である必要があります")

    def omega2(self, t: float) -> float:
        return (self.a / (t * t + self.eps**2)) ** 2

    def pieces(self) -> tuple[_Piece, ...]:
        return (_Piece(-_INF, _INF, _LorentzMode(self.a, self.eps)),)


@dataclass(frozen=True)
class QuenchedLorentz(FrequencyProfile):
    """t ≤ t₀ で ω(t₀) に固定し、その後 LorentzBell に従う."""

    a: float
    eps: float
    t0: float = 0.0
    kind: ClassVar[str] = "quenched_lorentz"

    def __post_init__(self) -> None:
        _require(self.eps > 0, "eps", "正である必要があります")
        _require(self.a >= 0, "a", "0 以上である必要があります")
        _require(math.isfinite(self.t0), "t0", "有限である必要があります")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.t0,)

    @property
    def omega_initial(self) -> float:
        return self.a / (self.t0**2 + self.eps**2)

    @property
    def omega_final(self) -> float:
        return 0.0

    def omega2(self, t: float) -> float:
        return LorentzBell(self.a, self.eps).omega2(max(t, self.t0))

    def pieces(self) -> tuple[_Piece, ...]:
        return (
            _Piece(-_INF, self.t0, _harmonic_or_free(self.omega_initial, self.t0)),
            _Piece(self.t0, _INF, _LorentzMode(self.a, self.eps)),
        )


@dataclass(frozen=True)
class WindowedLorentz(FrequencyProfile):
    """[t₀, t₁] でのみ LorentzBell に従い、外側では端の値に固定."""

    a: float
    eps: float
    t0: float
    t1: float
    kind: ClassVar[str] = "windowed_lorentz"

    def __post_init__(self) -> None:
        _require(self.eps > 0, "eps", "正である必要があります")
        _require(self.a >= 0, "a", "0 以上である必要があります")
        _require(
            math.isfinite(self.t0) and math.isfinite(self.t1) and self.t0 < self.t1,
            "t1",
            "有限で t0 < t1 である必要があります",
        )

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.t0, self.t1)

    def omega2(self, t: float) -> float:
        clipped = min(max(t, self.t0), self.t1)
        return LorentzBell(self.a, self.eps).omega2(clipped)

    def pieces(self) -> tuple[_Piece, ...]:
        bell = LorentzBell(self.a, self.eps)
        return (
            _Piece(-_INF, self.t0, _harmonic_or_free(bell.omega(self.t0), self.t0)),
            _Piece(self.t0, self.t1, _LorentzMode(self.a, self.eps)),
            _Piece(self.t1, _INF, _harmonic_or_free(bell.omega(self.t1), self.t1)),
        )


@dataclass(frozen=True)
class AbruptDrop(FrequencyProfile):
    """t ≤ 0 で ω = α, t > 0 で ω = 0."""

    alpha: float
    kind: ClassVar[str] = "abrupt_drop"

    def __post_init__(self) -> None:
        _require(self.alpha >= 0, "alpha", "0 以上である必要があります")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (0.0,)

    def omega2(self, t: float) -> float:
        return self.alpha**2 if t <= 0 else 0.0

    def pieces(self) -> tuple[_Piece, ...]:
        return (
            _Piece(-_INF, 0.0, _harmonic_or_free(self.alpha, 0.0)),
            _Piece(0.0, _INF, _FreeMode(0.0)),
        )


@dataclass(frozen=True)
class AbruptJump(FrequencyProfile):
    """t ≤ 0 で ω = ω₀, t > 0 で ω = ω₁."""

    omega0: float
    omega1: float
    kind: ClassVar[str] = "abrupt_jump"

    def __post_init__(self) -> None:
        _require(self.omega0 >= 0, "omega0", "0 以上である必要があります")
        _require(self.omega1 >= 0, "omega1", "0 以上である必要があります")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (0.0,)

    def omega2(self, t: float) -> float:
        return self.omega0**2 if t <= 0 else self.omega1**2

    def pieces(self) -> tuple[_Piece, ...]:
        return (
            _Piece(-_INF, 0.0, _harmonic_or_free(self.omega0, 0.0)),
            _Piece(0.0, _INF, _harmonic_or_free(self.omega1, 0.0)),
        )


@dataclass(frozen=True)
class CustomFrequency(FrequencyProfile):
    """ユーザー定義の ω²(t). 閉形式はない."""

    func: Callable[[float], float]
    points: tuple[float, ...] = field(default=())
    kind: ClassVar[str] = "custom"

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.points

    def omega2(self, t: float) -> float:
        return float(self.func(t))


def omega2(profile: FrequencyProfile, t: float) -> float:
    """ω²(t). 不連続点では左側 (t ≤ 接合点) の値."""
    return profile.omega2(t)


def adiabatic_b2(profile: FrequencyProfile, t0: float, t: float) -> float:
    """断熱近似 b²_ad = ω(t₀)/ω(t)."""
    omega_t = profile.omega(t)
    if omega_t <= 0:
        msg = f"ω({t}) = 0 では断熱近似が定義されません"
        logger.error(msg)
        raise DomainError(msg)
    return profile.omega(t0) / omega_t


# =============================================================================
# 閉形式エンジン
# =============================================================================
@dataclass(frozen=True)
class _MatchedSegment:
    lo: float
    hi: float
    mode: _Mode
    alpha: complex
    beta: complex
    c: float
    tau_ref: float
    phase_ref: float

    def z(self, t: float) -> tuple[complex, complex]:
        zeta, zeta_dot, _ = self.mode.value(t)
        return (
            self.alpha * zeta + self.beta * zeta.conjugate(),
            self.alpha * zeta_dot + self.beta * zeta_dot.conjugate(),
        )

    def phase(self, t: float) -> float:
        return _continuous_phase(self.mode, self.alpha, self.beta, t)

    def tau(self, t: float) -> float:
        return self.tau_ref + (self.phase(t) - self.phase_ref) / self.c


def _continuous_phase(mode: _Mode, alpha: complex, beta: complex, t: float) -> float:
    # arg Z - arg α。|β/α| < 1 なので第 2 項は分岐を越えない
    _, _, psi = mode.value(t)
    return psi + cmath.phase(1.0 + (beta / alpha) * cmath.exp(-2j * psi))


def _match(mode: _Mode, t: float, z: complex, z_dot: complex) -> tuple[complex, complex]:
    zeta, zeta_dot, _ = mode.value(t)
    det = zeta * zeta_dot.conjugate() - zeta.conjugate() * zeta_dot
    alpha = (z * zeta_dot.conjugate() - zeta.conjugate() * z_dot) / det
    beta = (zeta * z_dot - zeta_dot * z) / det
    return alpha, beta


def _anchor(
    piece: _Piece, t: float, z: complex, z_dot: complex, tau: float, c: float
) -> _MatchedSegment:
    alpha, beta = _match(piece.mode, t, z, z_dot)
    return _MatchedSegment(
        lo=piece.lo,
        hi=piece.hi,
        mode=piece.mode,
        alpha=alpha,
        beta=beta,
        c=c,
        tau_ref=tau,
        phase_ref=_continuous_phase(piece.mode, alpha, beta, t),
    )


class _PiecewiseEmp:
    """区間ごとに接続した Z(t) = x₁ + i·c·x₂."""

    def __init__(self, segments: list[_MatchedSegment]) -> None:
        self.segments = segments
        self._his = [seg.hi for seg in segments]

    @classmethod
    def from_instant(cls, pieces: tuple[_Piece, ...], t0: float, c: float) -> _PiecewiseEmp:
        his = [p.hi for p in pieces]
        i0 = bisect.bisect_left(his, t0)
        segments: list[_MatchedSegment | None] = [None] * len(pieces)
        anchor = _anchor(pieces[i0], t0, 1.0 + 0j, 1j * c, 0.0, c)
        segments[i0] = anchor

        prev = anchor
        for j in range(i0 + 1, len(pieces)):
            piece = pieces[j]
            z, z_dot = prev.z(piece.lo)
            prev = _anchor(piece, piece.lo, z, z_dot, prev.tau(piece.lo), c)
            segments[j] = prev

        nxt = anchor
        for j in range(i0 - 1, -1, -1):
            piece = pieces[j]
            z, z_dot = nxt.z(piece.hi)
            nxt = _anchor(piece, piece.hi, z, z_dot, nxt.tau(piece.hi), c)
            segments[j] = nxt

        return cls([seg for seg in segments if seg is not None])

    def _segment(self, t: float) -> _MatchedSegment:
        return self.segments[bisect.bisect_left(self._his, t)]

    def b(self, t: float) -> float:
        z, _ = self._segment(t).z(t)
        return abs(z)

    def b_dot(self, t: float) -> float:
        z, z_dot = self._segment(t).z(t)
        return (z.conjugate() * z_dot).real / abs(z)

    def tau(self, t: float) -> float:
        return self._segment(t).tau(t)


def closed_form_emp(profile: FrequencyProfile, ic: InitialCondition | None = None) -> EmpSolution:
    """カタログにある (プロファイル, 初期条件) の閉形式 EMP 解.

    Args:
        profile: 周波数プロファイル
        ic: 初期条件 (None なら t₀ = 0)

    Returns:
        EmpSolution: b, ḃ, τ が閉形式で評価される解

    Raises:
        NoClosedFormError: カタログにない組み合わせ
        ValidationError: c = ω(t₀) が 0
    """
    ic = ic if ic is not None else InitialCondition()
    pieces = profile.pieces()

    if ic.is_remote_past:
        if not (isinstance(profile, SechBump) and profile.a > 0):
            msg = f"{profile.kind} では t0 = -inf の閉形式解がありません"
            logger.error(msg)
            raise NoClosedFormError(msg)
        # 過去の無限遠で瞬間固有状態 (β = 0)、τ(0) = 0
        c = profile.a
        mode = pieces[0].mode
        alpha = complex(1.0 / math.sqrt(1.0 + (profile.a * profile.eps) ** 2))
        segment = _MatchedSegment(
            lo=-_INF,
            hi=_INF,
            mode=mode,
            alpha=alpha,
            beta=0j,
            c=c,
            tau_ref=0.0,
            phase_ref=_continuous_phase(mode, alpha, 0j, 0.0),
        )
        engine = _PiecewiseEmp([segment])
    else:
        c = math.sqrt(profile.omega2(ic.t0))
        _require(c > 0, "c", f"ω(t0) = 0 です (t0={ic.t0})")
        engine = _PiecewiseEmp.from_instant(pieces, ic.t0, c)

    logger.debug(f"閉形式解を構成: {profile.kind}, t0={ic.t0}, c={c}")
    return EmpSolution(
        b=engine.b,
        b_dot=engine.b_dot,
        tau=engine.tau,
        c=c,
        t0=ic.t0,
        omega0=c,
        omega2=profile.omega2,
        breakpoints=profile.breakpoints,
        label=profile.kind,
    )


# =============================================================================
# 教科書的な閉形式 (エンジンの相互検証用)
# =============================================================================
def sech_peak_b2(a: float, eps: float, t: float) -> float:
    """SechBump, t₀ = 0 (最大値から開始), a > 0."""
    k = a * eps
    tanh = math.tanh(t / eps)
    sin = math.sin(a * t + math.atan(tanh / k))
    return (1.0 + tanh**2 / k**2) * (1.0 - sin**2 / (1.0 + k**2) ** 2)


def sech_peak_tau(a: float, eps: float, t: float) -> float:
    """SechBump, t₀ = 0 の τ. tan の分岐ごとに π を足して連続にする."""
    k = a * eps
    root = math.sqrt(2.0 + k * k)
    u = a * t + math.atan(math.tanh(t / eps) / k)
    branch = math.floor((u + math.pi / 2) / math.pi)
    gain = k * root / (1.0 + k * k)
    return eps / root * (math.atan(gain * math.tan(u)) + math.pi * branch)


def sech_free_b2(eps: float, t: float) -> float:
    """SechBump, a = 0, t₀ = 0."""
    u = t / eps
    tanh = math.tanh(u)
    return (1.0 - u * tanh) ** 2 + 2.0 * tanh**2


def sech_past_b2(a: float, eps: float, t: float) -> float:
    """SechBump, t₀ = -∞."""
    k2 = (a * eps) ** 2
    return (k2 + math.tanh(t / eps) ** 2) / (1.0 + k2)


def sech_past_tau(a: float, eps: float, t: float) -> float:
    """SechBump, t₀ = -∞ の τ (τ(0) = 0)."""
    return t + math.atan(math.tanh(t / eps) / (a * eps)) / a


def lorentz_b2(a: float, eps: float, t0: float, t: float) -> float:
    """LorentzBell, 一般の t₀ から開始した場合の b²."""
    lam = lorentz_index(a, eps)
    psi = lam * (math.atan(t / eps) - math.atan(t0 / eps))
    delta = math.atan(t0 / (lam * eps))
    prefactor = (t * t + eps * eps) / (lam**2 * eps**2 * (t0 * t0 + eps * eps))
    return prefactor * (
        (eps**2 + a**2 + t0**2) * math.cos(psi + delta) ** 2 + a**2 * math.sin(psi) ** 2
    )


def lorentz_rational_b2(eps: float, t: float) -> float:
    """LorentzBell, a = √3·ε (λ = 2), t₀ = 0 の有理関数形."""
    return 1.0 + t**4 / (eps**2 * (t * t + eps * eps))


def abrupt_drop_b2(alpha: float, t: float) -> float:
    """AbruptDrop, t₀ ≤ 0."""
    return 1.0 if t <= 0 else 1.0 + (alpha * t) ** 2


def abrupt_jump_b2(omega0: float, omega1: float, t: float) -> float:
    """AbruptJump, t₀ = 0."""
    if t <= 0:
        return 1.0
    return math.cos(omega1 * t) ** 2 + (omega0 / omega1) ** 2 * math.sin(omega1 * t) ** 2
