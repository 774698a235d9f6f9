"""Train the two-network loop on a 1-D standard normal.

Small nets, a couple thousand steps: the generator's samples should end
with mean near 0 and spread near 1.  Prints the metric log as it lands.
"""

import numpy as np

from fieldgan import KernelSpec, TrainConfig, sample_generator, train


def main() -> None:
    total = 3000
    config = TrainConfig(
        batch_real=64,
        batch_gen=64,
        kernel=KernelSpec(family="plummer", d=1.0, epsilon=1.0),
        lr_discriminator=0.01,
        lr_generator=0.01,
        lr_decay=0.01 ** (1.0 / total),
        total_steps=total,
        z_dim=2,
        gaussian_ball_sigma=0.0,
        seed=0,
        eval_every=500,
    )
    sampler = lambda rng, n: rng.standard_normal((n, 1))

    def report(row, state):
        samples = sample_generator(state.generator, 500, np.random.default_rng(0))
        print(f"step {row.step:5d}  d_loss {row.d_loss:.3e}  g_loss {row.g_loss:+.3e}  "
              f"sample mean {samples.mean():+.3f}  std {samples.std():.3f}")

    state = train(config, sampler, 1, gen_hidden=(16,), disc_hidden=(16,),
                  on_metrics=report)

    samples = sample_generator(state.generator, 2000, np.random.default_rng(1))
    print(f"\nfinal: mean {samples.mean():+.4f} (target 0), std {samples.std():.4f} (target 1)")


if __name__ == "__main__":
    main()
