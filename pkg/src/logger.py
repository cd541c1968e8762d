"""ロギング設定モジュール."""

from __future__ import annotations

import logging
import sys
from datetime import datetime
from pathlib import Path

import config

ROOT_LOGGER_NAME = "ermakov_info"

_FORMATTER = logging.Formatter(
    "%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
)


def _add_file_handler(logger: logging.Logger, directory: Path) -> None:
    if any(isinstance(h, logging.FileHandler) for h in logger.handlers):
        return
    directory.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    file_handler = logging.FileHandler(directory / f"{timestamp}.log", encoding="utf-8")
    file_handler.setLevel(logger.level)
    file_handler.setFormatter(_FORMATTER)
    logger.addHandler(file_handler)


def setup_logger(
    name: str = ROOT_LOGGER_NAME,
    log_dir: Path | None = None,
    level: str | None = None,
) -> logging.Logger:
    """ロガーをセットアップして取得.

    Args:
        name: ロガー名
        log_dir: ログファイルの出力先 (None なら config.LOG_DIR、それも None ならファイル出力なし)
        level: ログレベル名 (None なら config.LOG_LEVEL)

    Returns:
        logging.Logger: 設定済みロガー
    """
    logger = logging.getLogger(name)

    # 既にハンドラーが設定されている場合はファイル出力の追加だけ行う
    if logger.handlers:
        if log_dir is not None:
            _add_file_handler(logger, log_dir)
        return logger

    level_value = logging.getLevelName(level or config.LOG_LEVEL)
    logger.setLevel(level_value)

    # 標準エラー出力へのハンドラー (標準出力は空けておく)
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(level_value)
    stream_handler.setFormatter(_FORMATTER)
    logger.addHandler(stream_handler)

    directory = log_dir if log_dir is not None else config.LOG_DIR
    if directory is not None:
        _add_file_handler(logger, directory)

    return logger


def get_logger(name: str) -> logging.Logger:
    """モジュール用ロガーを取得.

    Args:
        name: モジュール名 (__name__)

    Returns:
        logging.Logger: 子ロガー
    """
    setup_logger()
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")
