"""例外クラス定義.

設定系 (ConfigError) は CLI の終了コード 1、数値計算系 (NumericalError) は 2 に対応する。
"""

from __future__ import annotations


class ErmakovError(Exception):
    """本パッケージの例外の基底クラス."""


# =============================================================================
# 設定エラー
# =============================================================================
class ConfigError(ErmakovError):
    """シナリオ設定の誤り."""


class ParseError(ConfigError):
    """設定テキストの構文エラー."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"{line}行目: {message}")
        self.line = line


class ValidationError(ConfigError, ValueError):
    """パラメータ制約違反."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


# =============================================================================
# 数値計算エラー
# =============================================================================
class NumericalError(ErmakovError):
    """数値計算の失敗."""


class NoClosedFormError(NumericalError):
    """(プロファイル, 初期条件) に閉形式解がない."""


class StepFailureError(NumericalError):
    """ODE 積分のステップ失敗."""


class QuadratureFailureError(NumericalError):
    """適応求積が許容誤差に到達しなかった."""


class HermiteOverflowError(NumericalError, OverflowError):
    """エルミート多項式の値が倍精度で表せない."""


class NegativeModeFrequencyError(NumericalError):
    """基準振動の ω₁² が負になった."""


class DomainError(NumericalError, ValueError):
    """関数の定義域外の引数."""


class ConvergenceFailureError(NumericalError):
    """離散化オラクルが収束しなかった."""


class RootNotBracketedError(NumericalError):
    """二分法の区間で符号が変わらない."""
