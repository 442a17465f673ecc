"""Genetic algorithms for the weekly nurse rostering problem."""

from .engine import (
    Dynamic,
    DeltaConfig,
    EngineConfig,
    GradeBased,
    KPoint,
    Mix,
    Population,
    Static,
    Uniform,
    crossover,
    delta_restart,
    dynamic_weight,
    grade_boundaries,
    mutate,
    rank_select,
    replace_elitist,
    run_basic,
    step_generation,
)
from .evaluation import (
    Balance,
    CoverageTable,
    Evaluation,
    PenaltyShape,
    Schedule,
    balance_from_surplus,
    classify_balance,
    coverage_of,
    evaluate,
    random_schedule,
    validate_schedule,
)
from .fileformat import parse_instance, serialize_instance
from .generator import GenSpec, HourType, even_hours, generate_instance, generate_with_reference
from .harness import (
    AblationSpec,
    DEFAULT_LADDER,
    OracleInfeasible,
    OracleOptimal,
    OracleTooLarge,
    Rung,
    oracle_solve,
    run_experiment,
    run_with_features,
)
from .improvement import (
    IncentiveConfig,
    local_search_firstfit,
    ranking_score,
    shift_swap_best,
    special_swap,
)
from .model import Instance, InstanceError, Nurse, PatternKind, ShiftPattern, validate_instance
from .reporting import RunReport
from .subpops import CoopConfig, PopulationSet, SubPopSpec, migrate, run_coop, sub_fitness

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
