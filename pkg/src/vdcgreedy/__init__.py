"""Greedy energy minimization on the torus and permuted van der Corput sequences.

The greedy rule ``x_N = argmin_x sum_k f(|x - x_k|)`` started from ``{0}``
reproduces van der Corput sequences.  This package runs that system, builds
the permutation family that describes its trajectories, and computes
discrepancies both by definition and through Faure's exact series.
"""

from .discrepancy import (DiscrepancyReport, LeVequeBound, count_in_interval,
                          extreme_discrepancy, leveque_bound, local_discrepancy_R,
                          one_sided_counts)
from .family import (FamilyHandle, Permutation, canonical_sigma_m, closure_report,
                     complete_prefix, enumerate_family, extend_family, family_count,
                     family_membership, intricate, sample_family, swapping_permutation,
                     symmetry_transform)
from .faure import (F_m, F_m_and_alpha, faure_discrepancy_series, faure_report,
                    faure_series_table, off_grid_local_maxima, phi_function, psi,
                    psi_functions)
from .greedy import (GreedyTrajectory, SelectionPolicy, candidate_minima, find_gap_minimum,
                     greedy_run, greedy_step, predicted_minima_dyadic)
from .kernels import (Kernel, kernel_fourier_coeff, kernel_make, parse_kernel, point_energy,
                      total_pair_energy)
from .points import TorusPointSet, read_points, write_points_csv
from .pwa import PiecewiseAffine
from .radical import (DigitVector, digits_base_b, permuted_radical_inverse, radical_inverse,
                      vdc_prefix, vdc_segment)
from .verify import (CheckReport, MatchResult, check_family_equivalences,
                     check_greedy_equals_vdc, check_self_similarity,
                     match_trajectory_to_permutation)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
