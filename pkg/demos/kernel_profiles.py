"""Radial profiles of the interaction kernels.

Prints value, gradient magnitude, and (for the plummer family) the
laplacian along a ray, for a few parameter choices.  The interesting
feature: with dimension exponent d at most m - 2 the laplacian stays
negative everywhere, which is what makes the induced potential free of
spurious local optima.
"""

import numpy as np

from fieldgan import KernelSpec, kernel_grad, kernel_laplacian, kernel_value


def profile(spec: KernelSpec, m: int, radii) -> None:
    print(f"\n{spec.family} kernel, d={spec.d}, epsilon={spec.epsilon}, ambient m={m}")
    print(f"{'r':>6} {'k(r)':>12} {'|grad|':>12} {'laplacian':>12}")
    origin = np.zeros(m)
    for r in radii:
        a = origin.copy()
        a[0] = r
        k = kernel_value(a, origin, spec)
        g = np.linalg.norm(kernel_grad(a, origin, spec))
        if spec.family == "plummer":
            lap = f"{kernel_laplacian(a, origin, spec, m):12.6f}"
        else:
            lap = "         n/a"
        print(f"{r:6.2f} {k:12.6f} {g:12.6f} {lap}")


def main() -> None:
    radii = np.linspace(0.0, 6.0, 13)

    # negative-laplacian regime: d <= m - 2
    profile(KernelSpec(family="plummer", d=1.0, epsilon=1.0), m=3, radii=radii)

    # the 2-D mixture setting runs outside that regime (d=3 > m-2=0);
    # the laplacian changes sign along the ray
    profile(KernelSpec(family="plummer", d=3.0, epsilon=3.0), m=2, radii=radii)

    # the gaussian family decays much faster and has no analytic laplacian here
    profile(KernelSpec(family="gaussian", d=2.0, epsilon=1.0), m=2, radii=radii)

    spec = KernelSpec(family="plummer", d=1.0, epsilon=1.0)
    lap0 = kernel_laplacian(np.zeros(3), np.zeros(3), spec, 3)
    print(f"\nlaplacian minimum at r=0 for (d=1, eps=1, m=3): {lap0} "
          f"(closed form -m*d*eps^-(d+2) = -3)")


if __name__ == "__main__":
    main()
