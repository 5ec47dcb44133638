"""Excitable-media simulation with topological filament diagnostics.

A FitzHugh-Nagumo medium on a cubic grid, plus the machinery to measure
how its level-set filaments wind: helicity of the phase vorticity,
boundary helicity flux, intersection-curve extraction and Gauss linking
numbers.
"""
from . import backend
from .config import ConfigError, RunConfig, apply_overrides, parse_config, render_config
from .curves import (
    CurveSet,
    IsoPair,
    Polyline,
    TriMesh,
    extract_intersection_curves,
    extract_isosurface,
)
from .dynamics import (
    BlowUpError,
    HopfICParams,
    MediumState,
    ModelParams,
    SimResult,
    equilibrium_state,
    fhn_rhs,
    hopf_initial_condition,
    pin_boundary,
    run_simulation,
    stable_dt,
    step_euler,
)
from .grid import (
    BoundarySpec,
    FaceBC,
    Grid3,
    ScalarField,
    VectorField3,
    curl,
    divergence,
    gradient,
    laplacian,
    make_grid,
    surface_integral,
    volume_integral,
)
from .linking import LinkReport, ProximityError, gauss_linking, link_report
from .snapshots import SnapshotError, read_snapshot, write_snapshot
from .topo import (
    HelicityRecord,
    NormalizationRanges,
    PhaseField,
    analytic_potential,
    dpsi_dt,
    helicity,
    helicity_flux,
    helicity_record,
    normalize_uv,
    omega_field,
    phi_field,
    solenoidal_project,
    spectral_divergence,
    spectral_gradient,
    vector_potential_coulomb,
)

__version__ = "0.1.0"
