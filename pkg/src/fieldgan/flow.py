"""Direct particle simulation of the field dynamics.

Real samples stay fixed; generated samples follow plain gradient descent on
the batch energy, x_i <- x_i - step * grad_{x_i} F.  Because a generated
sample carries charge -1/N_x, that gradient equals field(x_i) / N_x, so the
particles drift along the force the field exerts on them: attracted to real
samples, repelled by each other.  Run long enough, the two clouds equalize.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SimulationDiverged
from .estimators import Batch, energy_hat
from .kernels import KernelSpec, kernel_grad_mean


@dataclass
class SimState:
    """Mutable simulation state.  ``batch.real`` never changes; sim_step
    replaces ``batch.generated`` and appends to ``energy_history``."""

    batch: Batch
    spec: KernelSpec
    step_size: float
    step_count: int = 0
    energy_history: list[float] = field(default_factory=list)


def stable_step_size(spec: KernelSpec, m: int) -> float:
    """Default step size, 0.1 * epsilon^(d+2) / (m d).

    The kernel Laplacian magnitude peaks at m d epsilon^-(d+2), which bounds
    the local curvature of the energy; one tenth of its inverse keeps plain
    gradient descent comfortably inside the monotone-descent regime.
    """
    return 0.1 * spec.epsilon ** (spec.d + 2.0) / (m * spec.d)


def make_state(real, generated, spec: KernelSpec, step_size: float | None = None) -> SimState:
    """Build a SimState, seeding ``energy_history`` with the initial energy.

    Exactly coincident generated points exert zero force on each other and
    would never separate, so duplicates get a deterministic jitter of
    magnitude 1e-8 * epsilon once, here at initialization.
    """
    generated = np.array(generated, dtype=np.float64)
    batch = Batch(real=real, generated=_break_exact_ties(generated, spec.epsilon))
    if step_size is None:
        step_size = stable_step_size(spec, batch.m)
    if not step_size > 0:
        raise InputError(f"step_size must be > 0, got {step_size}")
    state = SimState(batch=batch, spec=spec, step_size=float(step_size))
    state.energy_history.append(energy_hat(batch, spec))
    return state


def _break_exact_ties(x: np.ndarray, epsilon: float) -> np.ndarray:
    _, first_index = np.unique(x, axis=0, return_index=True)
    dupes = np.setdiff1d(np.arange(x.shape[0]), first_index)
    if dupes.size:
        jitter_rng = np.random.default_rng(0x7E5)  # fixed: same jitter every run
        x = x.copy()
        x[dupes] += 1e-8 * epsilon * jitter_rng.standard_normal((dupes.size, x.shape[1]))
    return x


def energy_gradient(batch: Batch, spec: KernelSpec) -> np.ndarray:
    """grad_{x_i} F for every generated sample, shape (N_x, m).

    Analytic, via the kernel gradient: (1/N_x) * (mean_j grad k(x_i, x_j)
    - mean_j grad k(x_i, y_j)).  The i = j self term is exactly zero.
    """
    x = batch.generated
    pull = kernel_grad_mean(x, batch.real, spec)
    push = kernel_grad_mean(x, x, spec)
    return (push - pull) / batch.n_generated


def sim_step(state: SimState) -> SimState:
    """Advance one step: descend the energy, record it, bump the counter."""
    grad = energy_gradient(state.batch, state.spec)
    new_x = state.batch.generated - state.step_size * grad
    bad = ~np.all(np.isfinite(new_x), axis=1)
    if bad.any():
        raise SimulationDiverged(state.step_count + 1, np.flatnonzero(bad))
    state.batch = Batch(real=state.batch.real, generated=new_x)
    state.step_count += 1
    state.energy_history.append(energy_hat(state.batch, state.spec))
    return state


@dataclass(frozen=True)
class Snapshot:
    step: int
    energy: float
    generated: np.ndarray


def run_sim(initial: SimState, n_steps: int, snapshot_every: int = 0):
    """Apply ``sim_step`` ``n_steps`` times.

    Returns the final state and a list of snapshots: the initial state,
    every ``snapshot_every``-th step (if > 0), and the final step.
    """
    if n_steps < 0:
        raise InputError("n_steps must be >= 0")
    state = initial
    trajectory = [_snapshot(state)]
    for _ in range(n_steps):
        state = sim_step(state)
        if snapshot_every > 0 and state.step_count % snapshot_every == 0:
            trajectory.append(_snapshot(state))
    if trajectory[-1].step != state.step_count:
        trajectory.append(_snapshot(state))
    return state, trajectory


def _snapshot(state: SimState) -> Snapshot:
    return Snapshot(
        step=state.step_count,
        energy=state.energy_history[-1],
        generated=state.batch.generated.copy(),
    )


def two_mode_escape_state(seed: int, step_size: float = 0.05) -> SimState:
    """Two real clusters at (-5, 0) and (+5, 0), all generated mass starting
    on the left one.  The repulsion among generated samples plus the pull of
    the uncovered right cluster should move about half of them across."""
    rng = np.random.default_rng(seed)
    left = rng.normal(loc=(-5.0, 0.0), size=(50, 2))
    right = rng.normal(loc=(5.0, 0.0), size=(50, 2))
    real = np.vstack([left, right])
    generated = rng.normal(loc=(-5.0, 0.0), size=(100, 2))
    return make_state(real, generated, KernelSpec(family="plummer", d=2.0, epsilon=1.0), step_size)


def matched_gaussian_state(seed: int, n: int = 64, step_size: float = 1.0) -> SimState:
    """N_x = N_y points drawn from the same 2-D standard Gaussian; the
    energy should decay toward zero as the clouds equalize.

    The default step is far above the generic ``stable_step_size`` bound
    on purpose: each particle feels the field scaled by 1/N_x, so the
    per-particle curvature shrinks with n and descent stays monotone.
    """
    rng = np.random.default_rng(seed)
    spec = KernelSpec(family="plummer", d=2.0, epsilon=1.0)
    real = rng.standard_normal((n, 2))
    generated = rng.standard_normal((n, 2))
    return make_state(real, generated, spec, step_size)


SCENARIOS = {
    "two-mode-escape": two_mode_escape_state,
    "matched-gaussian": matched_gaussian_state,
}


def scenario_state(name: str, seed: int, step_size: float | None = None) -> SimState:
    """Look up a named scenario and build its initial state."""
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise InputError(f"unknown scenario {name!r}; available: {sorted(SCENARIOS)}") from None
    if step_size is None:
        return builder(seed)
    return builder(seed, step_size=step_size)
