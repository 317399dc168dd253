"""Scale-indexed distance families: tilings, mapping spaces, audits and metrization."""
from ._validation import INFINITY
from .core import (
    AxiomReport,
    MetricFamily,
    NeighborhoodSpec,
    WitnessNotFound,
    audit_monotone_in_r,
    audit_self_distance,
    audit_symmetry,
    audit_usc_in_r,
    audit_weak_triangle,
    audit_weaker_triangle,
    axiom_suite,
    basis_witness,
    neighborhood_contains,
    verify_basis_inclusion,
)
from .diffeology import (
    Parametrization,
    PlotCheckReport,
    Polynomial,
    check_plot_at,
    continuity_witness,
    mapping_path,
    recover_u,
    tiling_translation,
    translation_plot_identity,
)
from .mapping_space import PiecewiseLinearMap, dr_sup, mapping_family
from .metrization import ChainMetrizer, build_levels, chain_metric, g_matrix
from .tiling import (
    Tiling1D,
    dr_tiling,
    lambda_T,
    orbit_metric,
    periodic_tiling,
    substitution_tiling,
    tiling_family,
    translate,
    valid_translations,
)
from .uniformity import Relation, compose, entourage_matrix, half_step

__version__ = "0.1.0"
