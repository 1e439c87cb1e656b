"""Piecewise-linear multi-scroll systems without equilibria: construction,
RK4 simulation and chaos diagnostics."""
from .analysis import (
    Chaos01Config,
    ChaosReport,
    chaos01_K,
    chaos01_series,
    growth_rate_Kc,
    lle_benettin,
    occupancy,
    symbol_sequence,
    translation_series,
)
from .errors import (
    DegenerateSeries,
    DimensionError,
    Divergence,
    EmptyTrajectory,
    NoMatchingRegion,
    NotSingleZeroEigenvalue,
    SchemaError,
)
from .integrator import IntegrationConfig, Trajectory, integrate, rk4_step
from .pwl_core import (
    AffinePiece,
    Clause,
    NeighborhoodRegions,
    PWLSystem,
    RegionPredicate,
    ScrollRegions,
    Side,
    SubsystemParams,
    SwitchingPlane,
    classify,
    equilibrium_report,
    has_equilibrium,
    is_equilibrium_free,
    neutral_vector_independent,
    subsystem_solution,
    vector_field_at,
    virtual_equilibria,
)
from .systems import (
    build_example1_double,
    build_example1_triple,
    build_example2_triple,
    build_scroll_system,
    load_system,
    save_system,
)

__version__ = "0.1.0"

__all__ = [
    "AffinePiece",
    "Chaos01Config",
    "ChaosReport",
    "Clause",
    "DegenerateSeries",
    "DimensionError",
    "Divergence",
    "EmptyTrajectory",
    "IntegrationConfig",
    "NeighborhoodRegions",
    "NoMatchingRegion",
    "NotSingleZeroEigenvalue",
    "PWLSystem",
    "RegionPredicate",
    "SchemaError",
    "ScrollRegions",
    "Side",
    "SubsystemParams",
    "SwitchingPlane",
    "Trajectory",
    "build_example1_double",
    "build_example1_triple",
    "build_example2_triple",
    "build_scroll_system",
    "chaos01_K",
    "chaos01_series",
    "classify",
    "equilibrium_report",
    "growth_rate_Kc",
    "has_equilibrium",
    "integrate",
    "is_equilibrium_free",
    "lle_benettin",
    "load_system",
    "neutral_vector_independent",
    "occupancy",
    "rk4_step",
    "save_system",
    "subsystem_solution",
    "symbol_sequence",
    "translation_series",
    "vector_field_at",
    "virtual_equilibria",
]
