"""時間依存調和振動子の情報量計算."""

from src.emp import EmpSolution, solve_numeric_emp
from src.entangle import CoupledSystem, entanglement_entropy, reduced_params
from src.measures import entropy_increases, fisher, info_series
from src.profiles import FrequencyProfile, InitialCondition, closed_form_emp
from src.quench import QuenchSetup
from src.runner import CsvSeries, run_scenario
from src.scenario import ScenarioConfig, parse_config
from src.states import BasisState

__all__ = [
    "BasisState",
    "CoupledSystem",
    "CsvSeries",
    "EmpSolution",
    "FrequencyProfile",
    "InitialCondition",
    "QuenchSetup",
    "ScenarioConfig",
    "closed_form_emp",
    "entanglement_entropy",
    "entropy_increases",
    "fisher",
    "info_series",
    "parse_config",
    "reduced_params",
    "run_scenario",
    "solve_numeric_emp",
]
