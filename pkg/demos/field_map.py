"""ASCII map of the potential between two sample clouds.

Real samples sit on the right, generated samples on the left.  The
potential is positive (shown with glyphs) where real mass dominates and
negative (shown '-') where generated mass dominates.  The field points
from '+' toward '-'; generated samples climb the potential, moving
against the field toward the real cloud.
"""

import numpy as np

from fieldgan import Batch, KernelSpec, potential_grid

GLYPHS = " .:-=+*#%@"


def render(phi, steps: int) -> str:
    grid = np.asarray(phi).reshape(steps + 1, steps + 1)
    span = max(abs(grid.min()), abs(grid.max())) or 1.0
    lines = []
    for row in grid.T[::-1]:  # y decreasing downward
        chars = []
        for v in row:
            if abs(v) < 0.02 * span:
                chars.append(" ")
            else:
                level = min(int(abs(v) / span * (len(GLYPHS) - 1)), len(GLYPHS) - 1)
                chars.append(GLYPHS[level] if v > 0 else "-")
        lines.append("".join(chars))
    return "\n".join(lines)


def main() -> None:
    rng = np.random.default_rng(7)
    real = rng.normal([4.0, 0.0], 0.8, size=(40, 2))
    generated = rng.normal([-4.0, 0.0], 0.8, size=(40, 2))
    batch = Batch(real=real, generated=generated)
    spec = KernelSpec(family="plummer", d=2.0, epsilon=1.0)

    steps = 60
    gx, gy, phi, ex, ey = potential_grid(batch, spec, -8, 8, -5, 5, steps)
    print(render(phi, steps))

    # Between the clouds the field points from the real side toward the
    # generated side (negative x-component); particles move the other way.
    mid = np.argmin(gx ** 2 + gy ** 2)
    print(f"\nfield at (0, 0): ({ex[mid]:+.4f}, {ey[mid]:+.4f})")
    print("generated samples step against the field, so they drift toward "
          "the real cloud on the right")


if __name__ == "__main__":
    main()
