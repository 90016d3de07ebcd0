"""Finite-horizon behaviors as subspaces, the L-gap, and gap-based mode recognition."""

from .behavior import (ARModel, Complexity, ExcitationError, ExcitationReport, GraphForm,
                       Trajectory, TrajectoryFormatError, WindowError, ar_graph_form,
                       ar_permutation, behavior_basis, deepc_permutation, excitation_check,
                       graph_form_basis, hankel, read_trajectory_csv, write_trajectory_csv)
from .deepc import (DeePCInfeasibleError, DeePCProblem, DeePCSolution, DeePCWeights,
                    partition_data_matrix, solve_deepc)
from .metrics import (GRASSMANN_METRICS, GapResult, GraphGapBounds, all_metrics,
                      directed_gap, gap, gap_profile, graph_gap_bounds, grassmann_metric, l_gap,
                      worst_case_projection_error)
from .recognition import (ExperimentLog, RecognitionConfig, case_study_schedule,
                          recognition_step, run_closed_loop, window_basis)
from .sarx import (ModeSchedule, SARXSystem, generate_excited_trajectory, sarx_step,
                   truncated_gaussian)
from .subspace import (DimensionError, PrincipalAngles, SubspaceBasis, orthonormal_basis,
                       principal_angles, projector, singular_values, spectral_norm)

__version__ = "0.1.0"
