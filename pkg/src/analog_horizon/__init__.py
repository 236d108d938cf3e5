"""Detection, tracing, and classification of analog black and white holes
in stationary metrics of moving media."""

__version__ = "0.1.0"

from .domains import AnnulusDomain, BoxDomain
from .metric import (GaugeTransform, MetricField, SignatureReport,
                     characteristic_residual, full_metric, full_symbol,
                     is_timelike, lower_g00, pullback_metric, signature_report,
                     solve_xi0, spatial_delta)
from .media import (MediumFlow, acoustic_metric, build_metric, ergo_function,
                    four_velocity, gordon_metric, trace_flow, uniform_flow,
                    vortex_flow, radial_profile_flow, radial_gordon_flow)
from .rays import (BicharState, RayResult, TraceOptions, make_null_initial,
                   null_geodesic_residual, time_orientation, trace_ray)
from .charfields import (CharFieldPair, ErgoRegion, build_char_fields,
                         kernel_direction, locate_ergo_region,
                         polar_vortex_fields, radial_profile_fields,
                         reduce_axisymmetric, s1_flux_test)
from .horizon import (ClosedOrbit, CycleOptions, HoleReport,
                      classify_closed_characteristic, classify_ergosphere,
                      enumerate_cycles, find_limit_cycle,
                      gordon_flow_crosscheck, hausdorff_distance)
