"""Single-qubit-readout networks for spectra of Θ(ρ) and entanglement detection."""

from .detect import (DetectionReport, bell, isotropic, random_product_pure, random_state,
                     required_moment_count, run_contraction_test, run_positive_map_test, werner)
from .linmaps import (KrausPairDecomposition, LinearMap, apply, builtin_maps, conjugate_map, dual_map,
                      extend_with_identity, hermiticity_preserving, map_from_kraus_pairs, pair_product_map,
                      primed_map)
from .network import (binary_povm, controlled_form, dilation_unitary, mean_from_visibility, simulate_shots,
                      synthesize, visibility_exact, visibility_interval)
from .observables import (MomentVector, Observable, collective_observable, moment_exact, moment_via_observable,
                          spectrum_bounds)
from .spectra import Spectrum, newton_girard, roots_real, spectrum_from_moments, trace_norm_from_gammas
from .tensor import DensityMatrix, partial_transpose, realign, trace_norm

__version__ = "0.1.0"
