"""Perimeter and convexity of rasterized planar sets via mollified marginals."""

from .calibration import (CALIBRATION_C, CONVEX_BASELINE_INTERIOR, EQUIBOUND_TOTAL,
                          THEOREM_RATIO_BOUNDS, constants_json, recompute_all)
from .detector import (ConvexityReport, CounterexampleReport, DemoConfig, DetectorConfig,
                       HypothesisReport, Witness, check_hypotheses, convexity_verdict,
                       counterexample_demo)
from .geometry import (ConvexPolygon, Difference, Disk, MarginViolation, PerimeterEstimate,
                       Rect, ShapeError, SmoothBump, Union, convex_hull, crofton_perimeter,
                       density_one_filter, hull_polygon, random_convex_polygon, rasterize,
                       rotate_shape, sample_bump, shape_from_json, shape_to_json,
                       symmetric_difference_area)
from .grids import (BinaryGrid, GridError, GridSpec, Profile1D, ScalarField, field_from_grid,
                    load_field, load_mask, save_field, save_mask)
from .mollify import UnderResolvedError, epsilon_schedule, gaussian_kernel, mollify1d, mollify2d
from .radon import (EnergyMeasure, IdentityCheck, MarginalDiagnostics, MarginalFamily,
                    SliceCheck, SupportInterval, fourier_slice_check, global_identity_check,
                    load_family, marginal_derivative, marginal_diagnostics, marginal_family,
                    midpoint_violation, nu_measure, radon_marginal, save_family,
                    spectral_derivative, support_analysis, support_interval)
from .sobolev import (CostGuardError, EnergyValue, ScalingFit, h_half_direct, h_half_spectral,
                      localized_energy, perimeter_by_scaling, raw_spectral_energy)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
