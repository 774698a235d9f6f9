"""How the mixture metrics respond to increasingly damaged sample sets.

Starts from clean draws of the 5x5 grid target, then knocks out modes and
inflates the noise, printing mode coverage, high-quality fraction, and the
histogram JSD after each change.
"""

import numpy as np

from fieldgan.mixtures import (
    assign_modes,
    grid_mixture_25,
    hist2d_jsd,
    report_summary,
    sample_mixture,
)


def describe(label: str, samples, reference) -> None:
    spec = grid_mixture_25()
    summary = report_summary(assign_modes(samples, spec))
    jsd = hist2d_jsd(samples, reference)
    print(f"{label:24s} modes {summary['modes_covered']:2d}/25  "
          f"hq {summary['high_quality_fraction']:.3f}  jsd {jsd:.3f}")


def main() -> None:
    spec = grid_mixture_25()
    rng = np.random.default_rng(7)
    reference = sample_mixture(spec, 20000, rng)
    clean = sample_mixture(spec, 10000, rng)

    describe("clean draw", clean, reference)

    # Drop all but the center 3x3 block of modes.
    keep = np.all(np.abs(clean) <= 10.5 + 5.0, axis=1)
    describe("center 9 modes only", clean[keep], reference)

    # Single collapsed mode.
    collapsed = rng.normal([0.0, 0.0], 1.0, size=(10000, 2))
    describe("single mode", collapsed, reference)

    # Right scale and placement, triple the per-mode spread.  A huge radius
    # makes every sample assigned, so the indexing below never sees -1.
    blurred = sample_mixture(spec, 10000, rng)
    centers = spec.centers[assign_modes(blurred, spec, radius_sigmas=100.0).assignments]
    describe("3x blurred modes", centers + 3.0 * (blurred - centers), reference)

    # Everything shifted off the grid.
    describe("shifted by (4, 4)", clean + 4.0, reference)


if __name__ == "__main__":
    main()
