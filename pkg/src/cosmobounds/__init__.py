"""Integral mean-curvature bounds on areas and volumes of cosmological-time level sets."""

from .errors import (CosmoBoundsError, DegenerateMetricError, DomainError, HypothesisError,
                     ValidationError)
from .model_geometry import (ModelGeometry, WarpedInvariants, model_area, model_mean_curvature,
                             model_volume, scale_factor, warped_invariants)
from .initial_data import Cell, InitialDataSet, h_plus, load_initial_data, lp_norm, restrict
from .integral_bounds import (area_bound_binomial, area_bound_exact, area_bound_jensen,
                              area_report, tg_pointwise_area, tg_pointwise_volume,
                              volume_bound_binomial, volume_bound_exact, volume_bound_jensen,
                              volume_report)
from .congruence import (GeneralizedFLRW, RicciProfile, comparison_envelope, envelope_violation,
                         evolve_flrw_areas, integrate_raychaudhuri, monotone_quotient_check,
                         sec_check)
from .level_sets import AreaHistory, generalized_area, omega_volume, sandwich_check
from .counterexample import (build_counterexample, counterexample_area, counterexample_lp_norm,
                             divergence_report)

__version__ = "0.1.0"

__all__ = [
    "CosmoBoundsError",
    "DegenerateMetricError",
    "DomainError",
    "HypothesisError",
    "ValidationError",
    "ModelGeometry",
    "WarpedInvariants",
    "model_area",
    "model_mean_curvature",
    "model_volume",
    "scale_factor",
    "warped_invariants",
    "Cell",
    "InitialDataSet",
    "h_plus",
    "load_initial_data",
    "lp_norm",
    "restrict",
    "area_bound_binomial",
    "area_bound_exact",
    "area_bound_jensen",
    "area_report",
    "tg_pointwise_area",
    "tg_pointwise_volume",
    "volume_bound_binomial",
    "volume_bound_exact",
    "volume_bound_jensen",
    "volume_report",
    "GeneralizedFLRW",
    "RicciProfile",
    "comparison_envelope",
    "envelope_violation",
    "evolve_flrw_areas",
    "integrate_raychaudhuri",
    "monotone_quotient_check",
    "sec_check",
    "AreaHistory",
    "generalized_area",
    "omega_volume",
    "sandwich_check",
    "build_counterexample",
    "counterexample_area",
    "counterexample_lp_norm",
    "divergence_report",
]
