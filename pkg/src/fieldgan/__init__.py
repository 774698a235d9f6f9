"""Generative training as charged-particle dynamics in a kernel potential.

Real samples act as positive charges and generated samples as negative
ones; a softened radial kernel turns the two clouds into a potential
field whose unique zero-energy state is a perfect match between them.
The package provides the kernel math, finite-sample field estimators, a
direct particle-flow simulator, a small neural stack, the two-network
trainer, and mixture-grid evaluation metrics, plus a CLI over all of it.
"""

__version__ = "0.1.0"

from .errors import InputError, SimulationDiverged, TrainingDiverged
from .kernels import (GAUSSIAN, PLUMMER, KernelSpec, kernel_grad,
                      kernel_grad_mean, kernel_laplacian, kernel_matrix,
                      kernel_value)
from .estimators import (Batch, FieldSample, energy_hat, field_hat,
                         field_samples, monte_carlo_potential, potential_grid,
                         potential_hat)
from .flow import (SCENARIOS, SimState, Snapshot, energy_gradient, make_state,
                   matched_gaussian_state, run_sim, scenario_state, sim_step,
                   stable_step_size, two_mode_escape_state)
from .nets import (ACTIVATIONS, AdamState, Gradients, Mlp, adam_update,
                   backward, forward, forward_cached, init_adam, init_mlp,
                   load_checkpoint, save_checkpoint)
from .rng import STREAM_NAMES, split_streams
from .mixtures import (MixtureSpec, ModeReport, assign_modes, grid_mixture_25,
                       hist2d_jsd, mixture_sampler, report_summary,
                       sample_mixture)
from .training import (MetricRow, TrainConfig, TrainState, config_from_dict,
                       config_from_json, config_to_dict, config_to_json,
                       discriminator_step, generator_step, init_state,
                       make_batch, mixture25_config, sample_generator, train)

__all__ = [
    "__version__",
    "InputError", "SimulationDiverged", "TrainingDiverged",
    "PLUMMER", "GAUSSIAN", "KernelSpec", "kernel_value", "kernel_grad",
    "kernel_laplacian", "kernel_matrix", "kernel_grad_mean",
    "Batch", "FieldSample", "potential_hat", "field_hat", "energy_hat",
    "field_samples", "potential_grid", "monte_carlo_potential",
    "SimState", "Snapshot", "SCENARIOS", "make_state", "sim_step", "run_sim",
    "energy_gradient", "stable_step_size", "scenario_state",
    "two_mode_escape_state", "matched_gaussian_state",
    "Mlp", "AdamState", "Gradients", "ACTIVATIONS", "init_mlp", "forward",
    "forward_cached", "backward", "init_adam", "adam_update",
    "save_checkpoint", "load_checkpoint",
    "STREAM_NAMES", "split_streams",
    "MixtureSpec", "ModeReport", "grid_mixture_25", "sample_mixture",
    "mixture_sampler", "assign_modes", "report_summary", "hist2d_jsd",
    "TrainConfig", "TrainState", "MetricRow", "config_to_dict",
    "config_from_dict", "config_to_json", "config_from_json", "init_state",
    "make_batch", "discriminator_step", "generator_step", "train",
    "sample_generator", "mixture25_config",
]
