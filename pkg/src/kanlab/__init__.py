"""KAN regression lab: spline networks, label noise, kernel pre-filtering,
and oversampling studies."""

__version__ = "0.1.0"

from .datasets import (FUNCTIONS, LabeledDataset, NoiseSpec, TargetFunction,
                       add_noise, eval_target, get_function, sample_dataset,
                       snr_db)
from .experiments import (ExperimentRecord, PowerLawFit, TrainJob,
                          fit_power_law, run_combined_study,
                          run_filter_crossover, run_job, run_jobs,
                          run_noise_table, run_oversampling, run_sigma_sweep)
from .filtering import (KernelFilterConfig, KernelMatrix, build_kernel,
                        kernel_filter, sinc_reconstruct)
from .network import (GradientBundle, KanEdge, KanNetwork, KanSpec, backward,
                      edge_forward, forward, forward_batch, init_network,
                      load_checkpoint, save_checkpoint, silu)
from .splines import (SplineGrid, basis_deriv, basis_eval, basis_matrix,
                      build_grid, deriv_matrix)
from .training import (TrainConfig, TrainingDivergedError, TrainReport,
                       evaluate, rmse, train)
