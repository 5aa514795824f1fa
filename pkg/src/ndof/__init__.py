"""Spatial degrees of freedom and channel strength of near-field channels.

Three independent routes to the number of degrees of freedom (NDoF)
between two regions are provided and can be cross-checked:

* numerical eigenspectra of the sampled Green's-function channel
  (:mod:`ndof.channel`, :mod:`ndof.metrics`),
* geometric shadow (view) measures (:mod:`ndof.shadow`),
* closed-form high-frequency limits (:mod:`ndof.asymptotics`).
"""

from .asymptotics import (discs_coupling, discs_coupling_strength, line_pair_coupling,
                          ne0_lines_2d, ne0_lines_3d, ne0_planar, shadow_length_two_lines,
                          sphere_mode_count, sphere_mode_count_asymptotic)
from .channel import (ChannelMatrix, Spectrum, assemble_channel, channel_spectrum,
                      compute_spectrum, merge_spectra)
from .errors import (ConfigError, DegenerateSpectrum, InsufficientSpectrum, InvalidArgument,
                     NdofError, NumericalFailure, RegionsOverlap, SingularKernel,
                     UnsupportedConfiguration, UnsupportedGeometry)
from .geometry import RegionKind, RegionSpec, SampledRegion, sample_region, sample_regions
from .greens import Kernel, KernelVariant, green2d, green3d
from .metrics import (NdofReport, average_channel_strength, build_report, corner_detect,
                      corner_fit, coupling_strength_quadrature, effective_ndof, effective_rank,
                      eig_level_bounds, normalized_values, power_law_fit, threshold_ndof)
from .shadow import (ShadowResult, paraxial_area, shadow_area, shadow_enclosed_convex,
                     shadow_length, shadow_ndof, shadow_two_discs)

__version__ = "0.1.0"
