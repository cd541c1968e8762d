"""
時間依存調和振動子の情報量計算ライブラリ - 設定ファイル
"""

from pathlib import Path

# =============================================================================
# パス設定
# =============================================================================
PROJECT_ROOT = Path(__file__).parent
SRC_DIR = PROJECT_ROOT / "src"
OUTPUT_DIR = PROJECT_ROOT / "output"

# ログファイル出力先 (None ならファイル出力しない)
LOG_DIR: Path | None = None
LOG_LEVEL: str = "INFO"

# =============================================================================
# ソルバー設定
# =============================================================================
# RK45 の rtol / atol
ODE_TOL: float = 1e-10

# 1/b² などの適応求積 (絶対誤差)
QUAD_TOL: float = 1e-10
QUAD_LIMIT: int = 200

# 密度から情報量を求めるオラクル用
ORACLE_QUAD_TOL: float = 1e-9

# 有限差分ステップ h = STENCIL_REL_STEP * max(1, |t|)
STENCIL_REL_STEP: float = 1e-4

# t0 = -inf の数値代替開始点 (ε 単位)
PAST_HORIZON: float = 40.0

# c = ω(t0) の下限 (区間内の最大 ω に対する比)
MIN_C_RATIO: float = 1e-8

# =============================================================================
# 密度評価設定
# =============================================================================
DENSITY_FLOOR: float = 1e-300  # これ未満は ρ ln ρ = 0 とみなす
TAIL_EXPONENT: float = 36.0  # e^{-36} ≈ 2e-16
TAIL_MARGIN: float = 5.0
TAIL_WIDTHS: float = 6.0  # 古典的転回点の外側に取る振動子長の数
HERMITE_MAX_DEGREE: int = 200

# =============================================================================
# エンタングルメント設定
# =============================================================================
SPECTRUM_GRIDSIZE: int = 400
SPECTRUM_WIDTHS: float = 10.0  # 半幅 = SPECTRUM_WIDTHS / sqrt(ζ - χ)
SPECTRUM_MIN_GRIDSIZE: int = 200
TRACE_TOL: float = 1e-6

# =============================================================================
# 磁場設定
# =============================================================================
GRID2D_POINTS: int = 1201

# =============================================================================
# 出力設定
# =============================================================================
DEFAULT_STEPS: int = 1001
CSV_FLOAT_FORMAT: str = ".17g"
DEFAULT_RENYI_ALPHAS: tuple[float, ...] = (0.5, 2.0, 3.0)
