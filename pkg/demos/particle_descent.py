"""Particle flow on the two built-in scenarios.

The matched scenario (generated and real drawn from the same Gaussian)
shows the energy collapsing toward zero as the two sample densities
equalize.  The two-cluster scenario shows monotone descent with the
generated mass pinned near the cluster it started on: per-step travel is
bounded by the kernel's maximum gradient over the generated-sample count,
so mass cannot cross the gap to the far cluster on this budget.
"""

import numpy as np

from fieldgan import run_sim, scenario_state


def show(name: str, seed: int, n_steps: int, milestones=5) -> None:
    state = scenario_state(name, seed=seed)
    final, _ = run_sim(state, n_steps)
    history = np.array(final.energy_history)
    print(f"\n{name} (seed {seed}, step_size {state.step_size}, {n_steps} steps)")
    for i in np.linspace(0, n_steps, milestones, dtype=int):
        print(f"  step {i:6d}  energy {history[i]:.6e}")
    print(f"  final/initial energy ratio: {history[-1] / history[0]:.4f}")
    drops = np.diff(history)
    print(f"  monotone descent: {bool(np.all(drops <= 1e-12))}")


def main() -> None:
    show("matched-gaussian", seed=0, n_steps=2000)

    show("two-mode-escape", seed=0, n_steps=2000)
    state = scenario_state("two-mode-escape", seed=0)
    final, _ = run_sim(state, 2000)
    near_far_mode = np.linalg.norm(final.batch.generated - [5.0, 0.0], axis=1) < 3.0
    print(f"  fraction of generated mass near the far cluster: {near_far_mode.mean():.3f}")


if __name__ == "__main__":
    main()
