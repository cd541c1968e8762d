#!/usr/bin/env python3
"""時間依存調和振動子の情報量計算 - メインエントリーポイント."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

import config

from src.errors import ConfigError, NumericalError, ValidationError
from src.logger import setup_logger
from src.runner import run_to_directory
from src.scenario import (
    COUPLINGS,
    KINDS,
    PRESETS,
    PROFILE_KINDS,
    ScenarioConfig,
    load_config,
    preset,
    with_overrides,
)

logger = setup_logger()

# 終了コード
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_INTERRUPTED = 130

_COMMAND_HELP = {
    "profile": "b, ḃ, τ, ω² の時系列",
    "entropy": "エントロピー増分 ΔSx, ΔSp, ΔSj",
    "fisher": "Fisher 情報量と Fisher-Shannon 複雑度",
    "magnetic": "磁場中の 2 次元基底の情報量",
    "entangle": "結合振動子のエンタングルメントエントロピー",
    "decoherence": "量子デコヒーレンスと古典相関の指標",
    "quench": "Lorentz 型クエンチの b², b²_ad, Δb²",
}

# フラグ → ScenarioConfig の項目
_OVERRIDES = (
    "profile",
    "a",
    "eps",
    "alpha",
    "omega0",
    "omega1",
    "t0",
    "t1",
    "n",
    "m",
    "omega2_sq",
    "coupling",
    "beta",
    "x0",
    "v0",
    "t_min",
    "t_max",
    "steps",
    "renyi_alphas",
    "out",
)


class _ArgumentParser(argparse.ArgumentParser):
    """引数の誤りを SystemExit ではなく ConfigError にする."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(message)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value 形式の設定ファイル")
    common.add_argument("--out", type=Path, help=f"出力ディレクトリ (デフォルト: {config.OUTPUT_DIR})")
    common.add_argument("--log-dir", type=Path, help="ログファイルの出力先")
    common.add_argument("--profile", choices=PROFILE_KINDS, help="周波数プロファイル")
    common.add_argument("--a", type=float, help="プロファイルのパラメータ a")
    common.add_argument("--eps", type=float, help="時間スケール ε")
    common.add_argument("--alpha", type=float, help="abrupt_drop の周波数 α")
    common.add_argument("--omega0", type=float, help="constant / abrupt_jump の ω₀")
    common.add_argument("--omega1", type=float, help="abrupt_jump の ω₁")
    common.add_argument("--t0", type=float, help="初期時刻 (-inf は --t0=-inf と書く)")
    common.add_argument("--t1", type=float, help="windowed_lorentz の窓の終端")
    common.add_argument("--n", type=int, help="量子数 n")
    common.add_argument("--m", type=int, help="量子数 m (magnetic)")
    common.add_argument("--omega2-sq", dest="omega2_sq", type=float, help="結合系の ω₂²")
    common.add_argument("--coupling", nargs="+", choices=COUPLINGS, help="結合シナリオ")
    common.add_argument("--beta", nargs="+", type=float, help="クエンチの β = αε")
    common.add_argument(
        "--x0", nargs=2, type=float, metavar=("X", "Y"), help="magnetic の軌道の初期位置"
    )
    common.add_argument(
        "--v0", nargs=2, type=float, metavar=("VX", "VY"), help="magnetic の軌道の初期速度"
    )
    common.add_argument("--tmin", dest="t_min", type=float, help="時間範囲の始点")
    common.add_argument("--tmax", dest="t_max", type=float, help="時間範囲の終点")
    common.add_argument("--steps", type=int, help="時間格子の点数")
    common.add_argument(
        "--renyi-alpha", dest="renyi_alphas", nargs="+", type=float, help="Rényi 次数"
    )
    return common


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """コマンドライン引数をパース.

    Raises:
        ConfigError: 引数の誤り
    """
    parser = _ArgumentParser(
        prog="ermakov-info", description="時間依存調和振動子の情報量を計算して CSV に出力"
    )
    common = _common_options()
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for kind in KINDS:
        commands.add_parser(kind, parents=[common], help=_COMMAND_HELP[kind])
    reproduce = commands.add_parser("reproduce", parents=[common], help="図のプリセットを再現")
    reproduce.add_argument("figure", choices=sorted(PRESETS), help="プリセット ID")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> ScenarioConfig:
    """プリセット / 設定ファイル / 既定値を土台にフラグで上書きする."""
    if args.command == "reproduce":
        base = preset(args.figure)
    elif args.config is not None:
        try:
            base = load_config(args.config)
        except OSError as e:
            msg = f"設定ファイルを読めません: {e}"
            logger.error(msg)
            raise ValidationError("config", msg) from e
        if base.kind != args.command:
            msg = f"設定ファイルは {base.kind} 用です ({args.command} が指定されました)"
            logger.error(msg)
            raise ValidationError("scenario", msg)
    else:
        base = ScenarioConfig(scenario=args.command)

    overrides = {}
    for name in _OVERRIDES:
        value = getattr(args, name)
        overrides[name] = tuple(value) if isinstance(value, list) else value
    return with_overrides(base, **overrides)


def main(argv: Sequence[str] | None = None) -> int:
    """メイン関数. 終了コードを返す."""
    try:
        args = parse_args(argv)
    except ConfigError as e:
        logger.error(f"引数エラー: {e}")
        return EXIT_CONFIG

    if args.log_dir is not None:
        setup_logger(log_dir=args.log_dir)

    logger.info("=" * 50)
    logger.info("  時間依存調和振動子の情報量計算")
    logger.info("=" * 50)

    try:
        cfg = build_config(args)
        paths = run_to_directory(cfg)
    except ConfigError as e:
        logger.error(f"設定エラー: {e}")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"数値計算エラー: {e}")
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error(f"出力エラー: {e}")
        return EXIT_NUMERICAL
    except KeyboardInterrupt:
        logger.info("中断されました")
        return EXIT_INTERRUPTED
    except Exception:
        logger.exception("予期しないエラー")
        return EXIT_NUMERICAL

    logger.info(f"終了: {len(paths)} ファイル")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
