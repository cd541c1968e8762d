"""シナリオの実行と CSV 出力."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from itertools import pairwise
from pathlib import Path

import config
import numpy as np
from numpy.typing import NDArray

from src.emp import EmpSolution, solve_numeric_emp
from src.entangle import (
    CoupledSystem,
    bell_coupling,
    classicality,
    coupling,
    entanglement_entropy,
    quenched_coupling,
    quenched_lorentz_coupling,
    reduced_params,
)
from src.errors import NoClosedFormError, ValidationError
from src.logger import get_logger
from src.magnetic import (
    MagneticScenario,
    basis_info,
    ermakov_lewis_series,
    field_strength,
    lorentz_integrate,
)
from src.measures import entropy_increases, info_series
from src.profiles import (
    AbruptDrop,
    AbruptJump,
    ConstantFrequency,
    FrequencyProfile,
    InitialCondition,
    LorentzBell,
    QuenchedLorentz,
    QuenchedSechBump,
    SechBump,
    WindowedLorentz,
    closed_form_emp,
)
from src.quench import QuenchSetup, quench_report
from src.scenario import ScenarioConfig
from src.states import BasisState

logger = get_logger(__name__)


@dataclass(frozen=True)
class CsvSeries:
    """ヘッダーと数値行. 先頭列 (時刻) は狭義単調増加."""

    header: tuple[str, ...]
    rows: list[tuple[float, ...]]

    def __post_init__(self) -> None:
        width = len(self.header)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                msg = f"{i} 行目の列数 {len(row)} がヘッダーの {width} と異なります"
                logger.error(msg)
                raise ValidationError("rows", msg)
        times = [row[0] for row in self.rows]
        if any(later <= earlier for earlier, later in pairwise(times)):
            msg = "時刻列が単調増加ではありません"
            logger.error(msg)
            raise ValidationError("rows", msg)

    def to_csv(self) -> str:
        """17 桁・LF 改行の CSV テキスト."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([format(value, config.CSV_FLOAT_FORMAT) for value in row])
        return buffer.getvalue()


# =============================================================================
# 設定からのオブジェクト構築
# =============================================================================
def build_profile(cfg: ScenarioConfig) -> FrequencyProfile:
    """設定の profile 名から周波数プロファイルを作る."""
    start = cfg.t0 if math.isfinite(cfg.t0) else 0.0
    match cfg.profile:
        case "constant":
            return ConstantFrequency(cfg.omega0)
        case "sech":
            return SechBump(cfg.a, cfg.eps)
        case "quenched_sech":
            return QuenchedSechBump(cfg.a, cfg.eps)
        case "lorentz":
            return LorentzBell(cfg.a, cfg.eps)
        case "quenched_lorentz":
            return QuenchedLorentz(cfg.a, cfg.eps, start)
        case "windowed_lorentz":
            return WindowedLorentz(cfg.a, cfg.eps, start, cfg.t1)
        case "abrupt_drop":
            return AbruptDrop(cfg.alpha)
        case "abrupt_jump":
            return AbruptJump(cfg.omega0, cfg.omega1)
    msg = f"未知のプロファイルです: {cfg.profile}"
    logger.error(msg)
    raise ValidationError("profile", msg)


def build_solution(cfg: ScenarioConfig, profile: FrequencyProfile, t0: float) -> EmpSolution:
    """閉形式解を優先し、なければ時間範囲を覆う数値解を返す."""
    ic = InitialCondition(t0)
    try:
        return closed_form_emp(profile, ic)
    except NoClosedFormError:
        logger.info(f"{profile.kind} (t0={t0:g}): 閉形式がないため数値解に切り替えます")
    window = (cfg.t_min, cfg.t_max)
    if math.isfinite(t0):
        window = (min(cfg.t_min, t0), max(cfg.t_max, t0))
    return solve_numeric_emp(profile, ic, window)


def time_grid(cfg: ScenarioConfig) -> NDArray[np.float64]:
    return np.linspace(cfg.t_min, cfg.t_max, cfg.steps)


def _starts(cfg: ScenarioConfig) -> list[tuple[str, float]]:
    if cfg.compare_remote_past:
        return [("start", cfg.t0), ("remote_past", -math.inf)]
    return [("start", cfg.t0)]


_COUPLINGS: dict[str, Callable[[float, float, float], CoupledSystem]] = {
    "k1": quenched_coupling,
    "k2": bell_coupling,
    "lorentz": quenched_lorentz_coupling,
}


def _coupled(cfg: ScenarioConfig) -> Iterable[tuple[str, CoupledSystem]]:
    for name in cfg.coupling:
        yield name, _COUPLINGS[name](cfg.a, cfg.eps, cfg.omega2_sq)


# =============================================================================
# 種類ごとの系列
# =============================================================================
def _profile_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    profile = build_profile(cfg)
    results = {}
    for label, t0 in _starts(cfg):
        sol = build_solution(cfg, profile, t0)
        rows = [(t, sol.b(t), sol.b_dot(t), sol.tau(t), sol.omega2(t)) for t in time_grid(cfg)]
        results[label] = CsvSeries(("t", "b", "b_dot", "tau", "omega2"), rows)
    return results


def _entropy_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    profile = build_profile(cfg)
    results = {}
    for label, t0 in _starts(cfg):
        sol = build_solution(cfg, profile, t0)
        rows = []
        for t in time_grid(cfg):
            increase = entropy_increases(sol, t)
            rows.append((t, increase.position, increase.momentum, increase.joint))
        results[label] = CsvSeries(("t", "dSx", "dSp", "dSj"), rows)
    return results


def _fisher_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    profile = build_profile(cfg)
    results = {}
    for label, t0 in _starts(cfg):
        state = BasisState(cfg.n, build_solution(cfg, profile, t0))
        rows = [
            (r.t, r.fx, r.fp, r.cfsx, r.cfsp)
            for r in info_series(state, time_grid(cfg).tolist(), alphas=())
        ]
        results[label] = CsvSeries(("t", "Fx", "Fp", "CFSx", "CFSp"), rows)
    return results


def _magnetic_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    profile = build_profile(cfg)
    scenario = MagneticScenario(profile, build_solution(cfg, profile, cfg.t0))
    grid = time_grid(cfg)
    rows = []
    for t in grid:
        info = basis_info(cfg.m, cfg.n, scenario, t)
        rows.append(
            (
                t,
                field_strength(scenario, t),
                info.delta_s2x,
                info.delta_s2p,
                info.f2x,
                info.f2p,
                info.cfs2x,
                info.cfs2p,
            )
        )
    header = ("t", "B", "dS2x", "dS2p", "F2x", "F2p", "CFS2x", "CFS2p")

    # 古典軌道と Ermakov-Lewis 不変量 J (軌道に沿って一定)
    x0 = (cfg.x0[0], cfg.x0[1])
    v0 = (cfg.v0[0], cfg.v0[1])
    traj = lorentz_integrate(scenario, x0, v0, grid)
    invariant = ermakov_lewis_series(traj, scenario.sol)
    trajectory = [
        (float(t), float(x[0]), float(x[1]), float(p[0]), float(p[1]), float(j))
        for t, x, p, j in zip(traj.t, traj.x, traj.p, invariant, strict=True)
    ]
    return {
        "info": CsvSeries(header, rows),
        "trajectory": CsvSeries(("t", "x", "y", "px", "py", "J"), trajectory),
    }


def _entangle_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    header = ("t", "k", "xi", "S", *(f"R_{alpha:g}" for alpha in cfg.renyi_alphas))
    results = {}
    for label, system in _coupled(cfg):
        rows = []
        for t in time_grid(cfg):
            reduced = reduced_params(system, t)
            entropy = entanglement_entropy(reduced, 1.0).von_neumann
            renyi = [entanglement_entropy(reduced, alpha).renyi for alpha in cfg.renyi_alphas]
            rows.append((t, coupling(system, t), reduced.xi, entropy, *renyi))
        results[label] = CsvSeries(header, rows)
    return results


def _decoherence_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    results = {}
    for label, system in _coupled(cfg):
        rows = []
        for t in time_grid(cfg):
            reduced = reduced_params(system, t)
            measures = classicality(reduced)
            rows.append((t, reduced.xi, measures.decoherence, measures.correlation))
        results[label] = CsvSeries(("t", "xi", "dQD", "dCC"), rows)
    return results


def _quench_series(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    results = {}
    for beta in cfg.beta:
        report = quench_report(QuenchSetup.from_beta(beta, cfg.eps), time_grid(cfg))
        rows = list(
            zip(
                report.s.tolist(),
                report.b2.tolist(),
                report.b2_ad.tolist(),
                report.delta.tolist(),
                strict=True,
            )
        )
        results[f"beta{beta:g}"] = CsvSeries(("s", "b2", "b2_ad", "delta_b2"), rows)
    return results


_RUNNERS: dict[str, Callable[[ScenarioConfig], dict[str, CsvSeries]]] = {
    "profile": _profile_series,
    "entropy": _entropy_series,
    "fisher": _fisher_series,
    "magnetic": _magnetic_series,
    "entangle": _entangle_series,
    "decoherence": _decoherence_series,
    "quench": _quench_series,
}


def run_scenario(cfg: ScenarioConfig) -> dict[str, CsvSeries]:
    """設定に従って計算し、系列名ごとの CsvSeries を返す (ファイルは書かない).

    Args:
        cfg: シナリオ設定

    Returns:
        dict[str, CsvSeries]: 系列名 (start, remote_past, info, trajectory, k1, beta9 など) ごとの表
    """
    logger.info(
        f"シナリオ {cfg.scenario} ({cfg.kind}): [{cfg.t_min:g}, {cfg.t_max:g}], {cfg.steps} 点"
    )
    return _RUNNERS[cfg.kind](cfg)


# =============================================================================
# ファイル出力
# =============================================================================
def write_csv(series: CsvSeries, path: Path) -> Path:
    """UTF-8 で CSV を書き出す."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(series.to_csv())
    logger.info(f"出力: {path} ({len(series.rows)} 行, 列 {','.join(series.header)})")
    return path


def output_paths(cfg: ScenarioConfig, names: Iterable[str], out_dir: Path) -> list[Path]:
    """系列が 1 つなら <scenario>.csv、複数なら <scenario>_<系列名>.csv."""
    names = list(names)
    if len(names) == 1:
        return [out_dir / f"{cfg.scenario}.csv"]
    return [out_dir / f"{cfg.scenario}_{name}.csv" for name in names]


def run_to_directory(cfg: ScenarioConfig, out_dir: Path | None = None) -> list[Path]:
    """run_scenario の結果を out_dir (省略時は cfg.out か config.OUTPUT_DIR) に書く."""
    directory = out_dir or cfg.out or config.OUTPUT_DIR
    results = run_scenario(cfg)
    paths = output_paths(cfg, results, directory)
    return [write_csv(series, path) for series, path in zip(results.values(), paths, strict=True)]
