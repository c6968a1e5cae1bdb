"""Closed-form interval type-2 fuzzy inference with a verification workbench."""

from .mf import (
    IT2Gaussian,
    ScaledGaussian,
    FitDominanceViolated,
    NonConvergence,
    default_fit_window,
    fit_bounds,
)
from .rulebase import (
    Partition,
    Rule,
    RuleBase,
    RuleBaseInvalid,
    Violation,
    default_rulebase,
    dump_rulebase,
    load_rulebase,
    rulebase_from_dict,
    rulebase_to_dict,
)
from .engine import (
    BoundSource,
    ClosedFormEngine,
    EngineConfig,
    FiringInterval,
    Form,
    InferenceResult,
    fire,
    infer,
    infer_gc,
    infer_gc_split,
    infer_nt,
)
from .reference import (
    ConsequentSet,
    DomainTooNarrow,
    Join,
    RefConfig,
    ReferenceEngine,
    SampledCurve,
    TNorm,
    ZeroArea,
    ZeroMass,
    build_output_fou,
    coa_decomposition_check,
    coa_defuzz,
    nt_defuzz,
)
from .pendulum import (
    ACTUATOR_RATE,
    GRAVITY,
    RK4_MAX_STEP,
    LoopConfig,
    NumericalBlowup,
    PlantState,
    SimTrace,
    controller_step,
    plant_derivatives,
    settle_time,
    simulate,
    write_trace_csv,
)

__version__ = "0.1.0"

__all__ = [
    "IT2Gaussian", "ScaledGaussian", "FitDominanceViolated", "NonConvergence",
    "default_fit_window", "fit_bounds",
    "Partition", "Rule", "RuleBase", "RuleBaseInvalid", "Violation",
    "default_rulebase", "dump_rulebase", "load_rulebase",
    "rulebase_from_dict", "rulebase_to_dict",
    "BoundSource", "ClosedFormEngine", "EngineConfig", "FiringInterval",
    "Form", "InferenceResult", "fire", "infer", "infer_gc", "infer_gc_split",
    "infer_nt",
    "ConsequentSet", "DomainTooNarrow", "Join", "RefConfig", "ReferenceEngine",
    "SampledCurve", "TNorm", "ZeroArea", "ZeroMass", "build_output_fou",
    "coa_decomposition_check", "coa_defuzz", "nt_defuzz",
    "ACTUATOR_RATE", "GRAVITY", "RK4_MAX_STEP", "LoopConfig", "NumericalBlowup",
    "PlantState", "SimTrace", "controller_step", "plant_derivatives",
    "settle_time", "simulate", "write_trace_csv",
    "__version__",
]
