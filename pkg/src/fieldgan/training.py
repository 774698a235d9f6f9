"""Two-network training on the mini-batch potential.

Each iteration draws a fresh batch, fits the discriminator toward the
batch potential at the batch's own locations (targets are constants, no
gradient flows back through them), then pushes the generator uphill on
the discriminator at freshly generated points.  Every batch is used for
exactly one update; both learning rates decay by a fixed factor per step
and are configured independently.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, TrainingDiverged
from .estimators import Batch, energy_hat, potential_hat
from .kernels import PLUMMER, KernelSpec
from .mixtures import MixtureSpec, assign_modes
from .nets import (AdamState, Mlp, adam_update, backward, forward,
                   forward_cached, init_adam, init_mlp)
from .rng import split_streams


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run depends on, JSON round-trippable."""

    batch_real: int
    batch_gen: int
    kernel: KernelSpec
    lr_discriminator: float
    lr_generator: float
    lr_decay: float
    total_steps: int
    z_dim: int
    gaussian_ball_sigma: float
    seed: int
    eval_every: int
    gen_output_gain: float = 1.0
    disc_output_gain: float = 1.0

    def __post_init__(self):
        if self.batch_real < 1 or self.batch_gen < 1:
            raise InputError("batch sizes must be >= 1")
        if self.total_steps < 1:
            raise InputError("total_steps must be >= 1")
        if not (self.lr_discriminator > 0 and self.lr_generator > 0):
            raise InputError("learning rates must be > 0")
        if not 0 < self.lr_decay <= 1:
            raise InputError("lr_decay must be in (0, 1]")
        if self.z_dim < 1:
            raise InputError("z_dim must be >= 1")
        if self.gaussian_ball_sigma < 0:
            raise InputError("gaussian_ball_sigma must be >= 0")
        if self.gen_output_gain <= 0:
            raise InputError("gen_output_gain must be > 0")
        if self.disc_output_gain <= 0:
            raise InputError("disc_output_gain must be > 0")
        if self.seed < 0:
            raise InputError("seed must be >= 0")
        if self.eval_every < 1:
            raise InputError("eval_every must be >= 1")


def config_to_dict(config: TrainConfig) -> dict:
    return {
        "batch_real": config.batch_real,
        "batch_gen": config.batch_gen,
        "kernel": {
            "family": config.kernel.family,
            "d": config.kernel.d,
            "epsilon": config.kernel.epsilon,
        },
        "lr_discriminator": config.lr_discriminator,
        "lr_generator": config.lr_generator,
        "lr_decay": config.lr_decay,
        "total_steps": config.total_steps,
        "z_dim": config.z_dim,
        "gaussian_ball_sigma": config.gaussian_ball_sigma,
        "seed": config.seed,
        "eval_every": config.eval_every,
        "gen_output_gain": config.gen_output_gain,
        "disc_output_gain": config.disc_output_gain,
    }


def config_from_dict(raw: dict) -> TrainConfig:
    try:
        kernel = KernelSpec(**raw["kernel"])
        fields = {k: raw[k] for k in (
            "batch_real", "batch_gen", "lr_discriminator", "lr_generator",
            "lr_decay", "total_steps", "z_dim", "gaussian_ball_sigma",
            "seed", "eval_every",
        )}
    except KeyError as missing:
        raise InputError(f"config is missing field {missing}") from None
    except TypeError as bad:
        raise InputError(f"bad kernel spec: {bad}") from None
    fields["gen_output_gain"] = raw.get("gen_output_gain", 1.0)
    fields["disc_output_gain"] = raw.get("disc_output_gain", 1.0)
    return TrainConfig(kernel=kernel, **fields)


def config_to_json(config: TrainConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2)


def config_from_json(text: str) -> TrainConfig:
    return config_from_dict(json.loads(text))


def mixture25_config(seed: int, total_steps: int = 30000, eval_every: int = 1000) -> TrainConfig:
    """Defaults for the 25-Gaussian grid experiment.

    lr_decay is chosen so both rates land at 1% of their initial value at
    total_steps.
    """
    return TrainConfig(
        batch_real=128,
        batch_gen=128,
        kernel=KernelSpec(family=PLUMMER, d=3.0, epsilon=3.0),
        lr_discriminator=0.01,
        lr_generator=0.01,
        lr_decay=0.01 ** (1.0 / total_steps),
        total_steps=total_steps,
        z_dim=4,
        gaussian_ball_sigma=0.0,
        seed=seed,
        eval_every=eval_every,
        gen_output_gain=50.0,
    )


@dataclass(frozen=True)
class MetricRow:
    step: int
    d_loss: float
    g_loss: float
    energy: float
    modes_covered: int
    high_quality_fraction: float


@dataclass
class TrainState:
    generator: Mlp
    gen_adam: AdamState
    discriminator: Mlp
    disc_adam: AdamState
    streams: dict
    step: int = 0
    metric_log: list = field(default_factory=list)


def init_state(config: TrainConfig, data_dim: int,
               gen_hidden=(128, 128), disc_hidden=(128, 128),
               gen_activation: str = "tanh",
               disc_activation: str = "elu") -> TrainState:
    """Fresh networks and optimizers from the config's seed.

    Draw order is fixed (generator weights first, then discriminator, both
    from the init stream) so results are reproducible.  The generator's
    hidden layers default to tanh: bounded units keep its output tails
    short, so early noisy discriminator gradients cannot fling samples
    arbitrarily far from the data.  The discriminator keeps elu, which
    fits the potential's sharp local structure better.
    """
    streams = split_streams(config.seed)
    gen_widths = [config.z_dim, *gen_hidden, data_dim]
    disc_widths = [data_dim, *disc_hidden, 1]
    activations = lambda widths, act: [act] * (len(widths) - 2) + ["linear"]
    generator = init_mlp(gen_widths, activations(gen_widths, gen_activation), streams["init"])
    # widen the initial output so the first samples already spread across
    # the data's scale instead of starting collapsed near the origin
    generator.weights[-1] *= config.gen_output_gain
    discriminator = init_mlp(disc_widths, activations(disc_widths, disc_activation), streams["init"])
    # a small gain starts the discriminator near zero, the right scale for
    # regressing a potential whose values are tiny; a unit-scale random
    # init would feed the generator garbage directions for thousands of
    # steps before the regression catches up
    discriminator.weights[-1] *= config.disc_output_gain
    return TrainState(
        generator=generator,
        gen_adam=init_adam(generator, config.lr_generator),
        discriminator=discriminator,
        disc_adam=init_adam(discriminator, config.lr_discriminator),
        streams=streams,
    )


def sample_generator(generator: Mlp, n: int, rng: np.random.Generator) -> np.ndarray:
    """n generator outputs from standard-normal latents."""
    z = rng.standard_normal((n, generator.input_dim))
    return forward(generator, z)


def make_batch(state: TrainState, config: TrainConfig, data_sampler) -> Batch:
    """Fresh batch: real draws from the data stream, generated points from
    latents drawn off the latent stream and pushed through the generator."""
    real = data_sampler(state.streams["data"], config.batch_real)
    generated = sample_generator(state.generator, config.batch_gen, state.streams["latent"])
    return Batch(real=real, generated=generated)


def discriminator_step(state: TrainState, config: TrainConfig, batch: Batch):
    """Regress the discriminator toward the batch potential.

    Evaluation points are the batch's own locations (optionally blurred by
    gaussian_ball_sigma noise); targets are plain numbers computed up
    front, so nothing differentiates through the potential.  Loss is
    0.5 * mean squared residual; one Adam step on the discriminator.
    """
    eval_points = np.vstack([batch.generated, batch.real])
    if config.gaussian_ball_sigma > 0:
        noise = state.streams["noise"].standard_normal(eval_points.shape)
        eval_points = eval_points + config.gaussian_ball_sigma * noise
    targets = np.atleast_1d(potential_hat(eval_points, batch, config.kernel))

    out, cache = forward_cached(state.discriminator, eval_points)
    residual = out[:, 0] - targets
    loss = 0.5 * float(np.mean(residual ** 2))
    if not np.isfinite(loss):
        raise TrainingDiverged(state.step + 1, "discriminator loss is not finite")
    grads = backward(state.discriminator, cache, (residual / residual.size)[:, None])
    adam_update(state.discriminator, grads, state.disc_adam)
    return state, loss


def generator_step(state: TrainState, config: TrainConfig, z_batch: np.ndarray):
    """Push generated points uphill on the discriminator.

    Loss is -0.5 * mean D(G(z)); the gradient flows through the (frozen)
    discriminator into the generator, and only generator weights move.
    """
    z_batch = np.asarray(z_batch, dtype=np.float64)
    if z_batch.ndim != 2 or z_batch.shape[1] != config.z_dim:
        raise InputError(f"z_batch must be (n, {config.z_dim}), got {z_batch.shape}")
    x, gen_cache = forward_cached(state.generator, z_batch)
    d_out, disc_cache = forward_cached(state.discriminator, x)
    loss = -0.5 * float(np.mean(d_out))
    if not np.isfinite(loss):
        raise TrainingDiverged(state.step + 1, "generator loss is not finite")
    upstream = np.full_like(d_out, -0.5 / d_out.shape[0])
    d_input_grad = backward(state.discriminator, disc_cache, upstream).d_input
    grads = backward(state.generator, gen_cache, d_input_grad)
    adam_update(state.generator, grads, state.gen_adam)
    return state, loss


def train(config: TrainConfig, data_sampler, data_dim: int,
          mixture: MixtureSpec | None = None, eval_samples: int = 2000,
          gen_hidden=(128, 128), disc_hidden=(128, 128),
          gen_activation: str = "tanh", disc_activation: str = "elu",
          on_metrics=None) -> TrainState:
    """Run the full loop: one discriminator and one generator update per
    step, each on a fresh batch, rates decayed every step.

    Metrics land in ``state.metric_log`` every ``eval_every`` steps and at
    the last step: losses, the current batch energy, and (when ``mixture``
    is given) mode coverage of ``eval_samples`` generator draws, computed
    on the eval stream so the measurement never disturbs training draws.
    Without a mixture the coverage columns are logged as zero.

    On divergence, raises with the state snapshotted at the last metric
    point so callers can persist it.
    """
    state = init_state(config, data_dim, gen_hidden=gen_hidden, disc_hidden=disc_hidden,
                       gen_activation=gen_activation, disc_activation=disc_activation)
    last_good = _snapshot(state)
    for step in range(1, config.total_steps + 1):
        try:
            batch = make_batch(state, config, data_sampler)
            _, d_loss = discriminator_step(state, config, batch)
            z = state.streams["latent"].standard_normal((config.batch_gen, config.z_dim))
            _, g_loss = generator_step(state, config, z)
        except TrainingDiverged as diverged:
            raise TrainingDiverged(diverged.step, diverged.reason, last_state=last_good) from None
        state.step = step
        state.disc_adam.learning_rate *= config.lr_decay
        state.gen_adam.learning_rate *= config.lr_decay

        if step % config.eval_every == 0 or step == config.total_steps:
            energy = energy_hat(batch, config.kernel)
            modes_covered, high_quality = 0, 0.0
            if mixture is not None:
                draws = sample_generator(state.generator, eval_samples, state.streams["eval"])
                report = assign_modes(draws, mixture)
                modes_covered = report.modes_covered
                high_quality = report.high_quality_fraction
            row = MetricRow(step, d_loss, g_loss, energy, modes_covered, high_quality)
            if not all(np.isfinite(v) for v in (d_loss, g_loss, energy, high_quality)):
                raise TrainingDiverged(step, "non-finite metric", last_state=last_good)
            state.metric_log.append(row)
            if on_metrics is not None:
                on_metrics(row, state)
            last_good = _snapshot(state)
    return state


def _snapshot(state: TrainState) -> TrainState:
    """Independent copy safe to hand out as a last-good checkpoint."""
    return TrainState(
        generator=copy.deepcopy(state.generator),
        gen_adam=copy.deepcopy(state.gen_adam),
        discriminator=copy.deepcopy(state.discriminator),
        disc_adam=copy.deepcopy(state.disc_adam),
        streams=state.streams,
        step=state.step,
        metric_log=list(state.metric_log),
    )
