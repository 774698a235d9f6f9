"""Gaussian-grid target distributions and sample-quality metrics.

The standard stress test for mode-seeking behavior: a 5 x 5 grid of unit
Gaussians, widely separated, equal weight.  A trainer that collapses lands
on a few of the 25 islands; the metrics here count islands actually covered
and how cleanly the samples sit on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic Gaussian mixture: component k is N(centers[k], std^2 I)."""

    centers: np.ndarray
    std: float
    weights: np.ndarray

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise InputError(f"centers must be nonempty (K, m), got shape {centers.shape}")
        if weights.shape != (centers.shape[0],):
            raise InputError("need one weight per center")
        if not self.std > 0:
            raise InputError(f"std must be > 0, got {self.std}")
        if weights.min() < 0 or not np.isclose(weights.sum(), 1.0):
            raise InputError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)

    @property
    def n_components(self) -> int:
        return self.centers.shape[0]

    @property
    def m(self) -> int:
        return self.centers.shape[1]


def grid_mixture_25() -> MixtureSpec:
    """25 unit Gaussians on a 5 x 5 grid over [-21, 21]^2, equal weight."""
    ticks = np.linspace(-21.0, 21.0, 5)
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    return MixtureSpec(centers=centers, std=1.0, weights=np.full(25, 1.0 / 25.0))


def sample_mixture(spec: MixtureSpec, n: int, rng) -> np.ndarray:
    """Draw n points; ``rng`` is a Generator or an int seed."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    idx = rng.choice(spec.n_components, size=n, p=spec.weights)
    return spec.centers[idx] + spec.std * rng.standard_normal((n, spec.m))


def mixture_sampler(spec: MixtureSpec):
    """Adapt a mixture to the (rng, n) -> points sampler convention."""
    return lambda rng, n: sample_mixture(spec, n, rng)


@dataclass(frozen=True)
class ModeReport:
    """Where samples landed relative to the mixture's components.

    assignments[i] is the index of the nearest center when that center is
    within ``radius_sigmas`` stds, else -1.  A mode counts as covered when
    at least 1% of all samples are assigned to it.  Always:
    per_mode_count.sum() + unassigned count = total samples, and
    high_quality_fraction = 1 - unassigned_fraction.
    """

    assignments: np.ndarray
    per_mode_count: np.ndarray
    per_mode_std: np.ndarray
    unassigned_fraction: float
    modes_covered: int
    high_quality_fraction: float


COVERED_FRACTION = 0.01


def assign_modes(samples, spec: MixtureSpec, radius_sigmas: float = 3.0) -> ModeReport:
    """Classify samples by nearest mixture component.

    ``per_mode_std[k]`` is sqrt(mean ||x - c_k||^2 / m) over the samples
    assigned to k: the per-coordinate spread, directly comparable to the
    component std (NaN for modes with no samples).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != spec.m:
        raise InputError(f"samples must be (n, {spec.m}), got shape {samples.shape}")
    if not radius_sigmas > 0:
        raise InputError(f"radius_sigmas must be > 0, got {radius_sigmas}")
    diffs = samples[:, None, :] - spec.centers[None, :, :]
    dists = np.sqrt(np.einsum("nkm,nkm->nk", diffs, diffs))
    nearest = np.argmin(dists, axis=1)
    nearest_dist = dists[np.arange(samples.shape[0]), nearest]
    within = nearest_dist <= radius_sigmas * spec.std
    assignments = np.where(within, nearest, -1)

    counts = np.bincount(assignments[within], minlength=spec.n_components)
    covered = int(np.sum(counts >= COVERED_FRACTION * samples.shape[0]))

    per_mode_std = np.full(spec.n_components, np.nan)
    for k in np.flatnonzero(counts):
        sq = nearest_dist[assignments == k] ** 2
        per_mode_std[k] = np.sqrt(sq.mean() / spec.m)

    return ModeReport(
        assignments=assignments,
        per_mode_count=counts,
        per_mode_std=per_mode_std,
        unassigned_fraction=float(1.0 - within.mean()),
        modes_covered=covered,
        high_quality_fraction=float(within.mean()),
    )


def report_summary(report: ModeReport) -> dict:
    """Scalar digest of a ModeReport, convenient for metric logs."""
    occupied = report.per_mode_count > 0
    return {
        "modes_covered": report.modes_covered,
        "high_quality_fraction": report.high_quality_fraction,
        "unassigned_fraction": report.unassigned_fraction,
        "assigned_samples": int(report.per_mode_count.sum()),
        "mean_mode_std": float(np.nanmean(report.per_mode_std)) if occupied.any() else float("nan"),
    }


def hist2d_jsd(a, b, bins: int = 50, lo: float = -25.0, hi: float = 25.0) -> float:
    """Jensen-Shannon divergence (base 2, in [0, 1]) between 2-D histograms.

    Both sample sets are binned on the same [lo, hi]^2 grid; mass outside
    the range is clipped into the boundary bins rather than dropped, so
    badly scattered samples still count against the score.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2 or b.ndim != 2 or b.shape[1] != 2:
        raise InputError("hist2d_jsd needs two (n, 2) sample sets")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise InputError("hist2d_jsd needs nonempty sample sets")
    if not (bins >= 2 and hi > lo):
        raise InputError("need bins >= 2 and hi > lo")

    def hist(x):
        clipped = np.clip(x, lo, hi)  # histogram2d puts hi itself in the last bin
        h, _, _ = np.histogram2d(clipped[:, 0], clipped[:, 1], bins=bins,
                                 range=[[lo, hi], [lo, hi]])
        return h.ravel() / x.shape[0]

    p, q = hist(a), hist(b)
    mid = 0.5 * (p + q)

    def kl_bits(p_, m_):
        mask = p_ > 0
        return float(np.sum(p_[mask] * np.log2(p_[mask] / m_[mask])))

    return 0.5 * kl_bits(p, mid) + 0.5 * kl_bits(q, mid)
