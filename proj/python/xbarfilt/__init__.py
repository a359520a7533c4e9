"""XBAR ladder filter modeling toolkit."""

from ._core import (
    Error,
    InvalidArgument,
    LadderDesign,
    MbvdParams,
    PhysicalRealization,
    Placement,
    SchemaError,
    SolverError,
    Stage,
    UnboundedBandError,
    admittance,
    derive_motional,
    extract_resonator,
    fit,
    fp_from,
    k2_from,
    load_design,
    metrics,
    plan_trims,
    read_touchstone,
    response_metrics,
    run_cli,
    save_design,
    scale_design,
    simulate,
    synthesize,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "LadderDesign",
    "MbvdParams",
    "PhysicalRealization",
    "Placement",
    "SchemaError",
    "SolverError",
    "Stage",
    "UnboundedBandError",
    "admittance",
    "derive_motional",
    "extract_resonator",
    "fit",
    "fp_from",
    "k2_from",
    "load_design",
    "metrics",
    "plan_trims",
    "read_touchstone",
    "response_metrics",
    "run_cli",
    "save_design",
    "scale_design",
    "simulate",
    "synthesize",
]
