"""シナリオ設定 (key = value 形式) の読み書きと図の再現用プリセット.

設定ファイルは 1 行 1 項目の ``key = value`` で、``#`` 以降はコメント。
``scenario`` にプリセット ID (fig1 など) を書くとその値を土台にして、
残りのキーで上書きする。
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

import config

from src.errors import ParseError, ValidationError
from src.logger import get_logger

logger = get_logger(__name__)

KINDS: tuple[str, ...] = (
    "profile",
    "entropy",
    "fisher",
    "magnetic",
    "entangle",
    "decoherence",
    "quench",
)
PROFILE_KINDS: tuple[str, ...] = (
    "constant",
    "sech",
    "quenched_sech",
    "lorentz",
    "quenched_lorentz",
    "windowed_lorentz",
    "abrupt_drop",
    "abrupt_jump",
)
COUPLINGS: tuple[str, ...] = ("k1", "k2", "lorentz")

# プリセット ID と計算の種類
PRESET_KINDS: dict[str, str] = {
    "fig1": "entropy",
    "fig2": "entropy",
    "fig3": "fisher",
    "fig4": "magnetic",
    "fig5": "entangle",
    "fig7": "quench",
}


def _fail(field_name: str, message: str) -> NoReturn:
    logger.error(f"{field_name}: {message}")
    raise ValidationError(field_name, message)


@dataclass(frozen=True)
class ScenarioConfig:
    """1 回の計算に必要な設定一式.

    quench では t_min / t_max / steps が無次元時間 s の格子を表す。
    x0 / v0 は magnetic の古典軌道の t_min での位置と速度。
    """

    scenario: str = "entropy"
    profile: str = "sech"
    a: float = 1.0
    eps: float = 1.0
    alpha: float = 1.0
    omega0: float = 1.0
    omega1: float = 2.0
    t0: float = 0.0
    t1: float = 1.0
    n: int = 0
    m: int = 0
    omega2_sq: float = 0.5
    coupling: tuple[str, ...] = ("k1",)
    beta: tuple[float, ...] = (9.0,)
    compare_remote_past: bool = False
    x0: tuple[float, ...] = (1.0, 0.0)
    v0: tuple[float, ...] = (0.0, 1.0)
    t_min: float = 0.0
    t_max: float = 10.0
    steps: int = config.DEFAULT_STEPS
    renyi_alphas: tuple[float, ...] = config.DEFAULT_RENYI_ALPHAS
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.scenario not in KINDS and self.scenario not in PRESET_KINDS:
            _fail("scenario", f"未知のシナリオです: {self.scenario}")
        if self.profile not in PROFILE_KINDS:
            _fail("profile", f"未知のプロファイルです: {self.profile}")
        if not (self.eps > 0 and math.isfinite(self.eps)):
            _fail("eps", "eps > 0 である必要があります")
        for name in ("a", "alpha", "omega0", "omega1"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                _fail(name, f"{name} >= 0 の有限値である必要があります")
        if math.isnan(self.t0) or self.t0 == math.inf:
            _fail("t0", "t0 は有限値か -inf である必要があります")
        if not math.isfinite(self.t1):
            _fail("t1", "t1 は有限値である必要があります")
        for name in ("n", "m"):
            if not 0 <= getattr(self, name) <= config.HERMITE_MAX_DEGREE:
                _fail(name, f"{name} は 0 以上 {config.HERMITE_MAX_DEGREE} 以下である必要があります")
        if not (self.omega2_sq > 0 and math.isfinite(self.omega2_sq)):
            _fail("omega2_sq", "omega2_sq > 0 である必要があります")
        if not self.coupling or any(c not in COUPLINGS for c in self.coupling):
            _fail("coupling", f"coupling は {', '.join(COUPLINGS)} から選びます")
        if not self.beta or not all(b > 0 and math.isfinite(b) for b in self.beta):
            _fail("beta", "beta > 0 である必要があります")
        for name in ("x0", "v0"):
            value = getattr(self, name)
            if len(value) != 2 or not all(math.isfinite(v) for v in value):
                _fail(name, f"{name} は有限値 2 つである必要があります")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            _fail("t_min", "時間範囲は有限である必要があります")
        if not self.t_min < self.t_max:
            _fail("t_max", "t_min < t_max である必要があります")
        if self.kind == "quench" and self.t_min < 0:
            _fail("t_min", "quench では s >= 0 である必要があります")
        if self.steps < 2:
            _fail("steps", "steps >= 2 である必要があります")
        if not all(a > 0 and math.isfinite(a) for a in self.renyi_alphas):
            _fail("renyi_alphas", "Rényi 次数は正の有限値である必要があります")

    @property
    def kind(self) -> str:
        """計算の種類 (プリセットなら対応する種類)."""
        return PRESET_KINDS.get(self.scenario, self.scenario)

    @property
    def is_preset(self) -> bool:
        return self.scenario in PRESET_KINDS


# 図の説明文から取った値. フラグや設定ファイルで上書きできる
PRESETS: dict[str, ScenarioConfig] = {
    "fig1": ScenarioConfig(scenario="fig1", profile="sech", t0=0.0, t_min=0.0, t_max=10.0),
    "fig2": ScenarioConfig(
        scenario="fig2", profile="sech", t0=-math.inf, t_min=-40.0, t_max=40.0, steps=2001
    ),
    "fig3": ScenarioConfig(
        scenario="fig3",
        profile="sech",
        t0=0.0,
        compare_remote_past=True,
        t_min=-10.0,
        t_max=10.0,
    ),
    "fig4": ScenarioConfig(scenario="fig4", profile="lorentz", t0=0.0, t_min=0.0, t_max=10.0),
    "fig5": ScenarioConfig(
        scenario="fig5",
        omega2_sq=0.5,
        coupling=("k1", "k2"),
        t_min=-40.0,
        t_max=40.0,
        steps=2001,
    ),
    "fig7": ScenarioConfig(
        scenario="fig7", beta=(9.0, math.sqrt(15.0)), t_min=0.0, t_max=100.0, steps=2001
    ),
}


def preset(name: str) -> ScenarioConfig:
    """プリセット設定を取得.

    Raises:
        ValidationError: 未知のプリセット ID
    """
    if name not in PRESETS:
        _fail("scenario", f"未知のプリセットです: {name} (候補: {', '.join(PRESETS)})")
    return PRESETS[name]


# =============================================================================
# key = value 形式
# =============================================================================
def _parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"整数ではありません: {text}")
    return int(value)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"真偽値ではありません: {text}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _parse_words(text: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in text.split(",") if item.strip())


def _parse_path(text: str) -> Path | None:
    return Path(text) if text else None


_PARSERS: dict[str, Callable[[str], Any]] = {
    "scenario": str,
    "profile": str,
    "a": float,
    "eps": float,
    "alpha": float,
    "omega0": float,
    "omega1": float,
    "t0": float,
    "t1": float,
    "n": _parse_int,
    "m": _parse_int,
    "omega2_sq": float,
    "coupling": _parse_words,
    "beta": _parse_floats,
    "compare_remote_past": _parse_bool,
    "x0": _parse_floats,
    "v0": _parse_floats,
    "t_min": float,
    "t_max": float,
    "steps": _parse_int,
    "renyi_alphas": _parse_floats,
    "out": _parse_path,
}


def _format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format_value(item) for item in value)
    return str(value)


def parse_config(text: str) -> ScenarioConfig:
    """key = value 形式の設定を読む.

    Args:
        text: 設定ファイルの中身

    Returns:
        ScenarioConfig: scenario がプリセットならその値に上書きを適用したもの

    Raises:
        ParseError: 書式の誤り・未知のキー・重複キー・数値として読めない値 (行番号つき)
        ValidationError: 値が制約を満たさない (項目名つき)
    """
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            msg = f"'key = value' の形式ではありません: {body}"
            logger.error(f"{lineno} 行目: {msg}")
            raise ParseError(msg, lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _PARSERS:
            msg = f"未知のキーです: {key}"
            logger.error(f"{lineno} 行目: {msg}")
            raise ParseError(msg, lineno)
        if key in raw:
            msg = f"キーが重複しています: {key}"
            logger.error(f"{lineno} 行目: {msg}")
            raise ParseError(msg, lineno)
        raw[key] = (value, lineno)

    values: dict[str, Any] = {}
    for key, (value, lineno) in raw.items():
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as e:
            msg = f"{key} の値を読めません: {value!r}"
            logger.error(f"{lineno} 行目: {msg}")
            raise ParseError(msg, lineno) from e

    scenario = values.get("scenario")
    base = PRESETS[scenario] if scenario in PRESETS else ScenarioConfig()
    cfg = dataclasses.replace(base, **values)
    logger.debug(f"設定を読み込みました: scenario={cfg.scenario}, {len(values)} 項目")
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    """parse_config で読み戻せる形式に書き出す. 浮動小数点は repr で正確に残す."""
    lines = []
    for item in dataclasses.fields(cfg):
        value = getattr(cfg, item.name)
        if value is None:
            continue
        lines.append(f"{item.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def load_config(path: Path) -> ScenarioConfig:
    """設定ファイルを読む."""
    logger.info(f"設定ファイル: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def with_overrides(cfg: ScenarioConfig, **overrides: Any) -> ScenarioConfig:
    """None でない値だけを上書きした設定を返す."""
    changes = {key: value for key, value in overrides.items() if value is not None}
    return dataclasses.replace(cfg, **changes) if changes else cfg

