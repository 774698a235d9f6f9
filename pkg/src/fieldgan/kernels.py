"""Radial interaction kernels and their exact derivatives.

The workhorse is the softened inverse-power ("Plummer") kernel

    k(a, b) = (||a - b||^2 + epsilon^2) ** (-d / 2)

with softening length ``epsilon > 0`` and dimension exponent ``d > 0``.
A Gaussian kernel ``exp(-||a - b||^2 / (2 epsilon^2))`` is provided as an
ablation alternative; its Laplacian is intentionally not implemented.

All math is plain float64.  Functions are stateless and thread-safe.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError

PLUMMER = "plummer"
GAUSSIAN = "gaussian"

_FAMILIES = (PLUMMER, GAUSSIAN)

# One-shot flag for the d <= m - 2 advisory (see KernelSpec docstring).
_theory_warned = False


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its two shape parameters.

    For the Plummer family, gradient-descent convergence guarantees hold
    when ``d <= m - 2`` with ``m`` the data dimension.  Larger ``d`` is
    allowed (and useful in practice, e.g. d=3 on 2-D data) but triggers a
    one-time warning the first time such a configuration is evaluated.
    """

    family: str = PLUMMER
    d: float = 3.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InputError(f"unknown kernel family {self.family!r}; expected one of {_FAMILIES}")
        if not self.d > 0:
            raise InputError(f"kernel dimension exponent d must be > 0, got {self.d}")
        if not self.epsilon > 0:
            raise InputError(f"softening epsilon must be > 0, got {self.epsilon}")


def _check_theory_regime(spec: KernelSpec, m: int) -> None:
    global _theory_warned
    if _theory_warned or spec.family != PLUMMER:
        return
    if spec.d > m - 2:
        _theory_warned = True
        warnings.warn(
            f"Plummer kernel with d={spec.d} on {m}-dimensional data: convergence "
            f"guarantees require d <= m - 2; evaluation proceeds regardless",
            UserWarning,
            stacklevel=3,
        )


def _as_points(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise InputError(f"points must be equal-length 1-D vectors, got shapes {a.shape} and {b.shape}")
    return a, b


def kernel_value(a, b, spec: KernelSpec) -> float:
    """Evaluate k(a, b).  Symmetric in its arguments and always positive."""
    a, b = _as_points(a, b)
    _check_theory_regime(spec, a.size)
    r2 = float(np.dot(a - b, a - b))
    if spec.family == PLUMMER:
        return (r2 + spec.epsilon**2) ** (-spec.d / 2.0)
    return float(np.exp(-r2 / (2.0 * spec.epsilon**2)))


def kernel_grad(a, b, spec: KernelSpec) -> np.ndarray:
    """Gradient of k with respect to its first argument.

    For the Plummer family this is -d (a - b) (||a-b||^2 + eps^2)^(-(d+2)/2),
    which points from a toward b (k increases toward the other point).
    Antisymmetric: kernel_grad(a, b) == -kernel_grad(b, a).
    """
    a, b = _as_points(a, b)
    _check_theory_regime(spec, a.size)
    diff = a - b
    r2 = float(np.dot(diff, diff))
    if spec.family == PLUMMER:
        coef = -spec.d * (r2 + spec.epsilon**2) ** (-(spec.d + 2.0) / 2.0)
    else:
        coef = -np.exp(-r2 / (2.0 * spec.epsilon**2)) / spec.epsilon**2
    return coef * diff


def kernel_laplacian(a, b, spec: KernelSpec, m: int) -> float:
    """Closed-form Laplacian (trace of the Hessian in m dimensions) of the
    Plummer kernel:

        d (-eps^2 m + (2 + d - m) r^2) (eps^2 + r^2)^(-2 - d/2)

    with r = ||a - b||.  Strictly negative whenever d <= m - 2, with its
    minimum -m d eps^(-(d+2)) attained at r = 0.
    """
    if spec.family != PLUMMER:
        raise InputError("kernel_laplacian is only defined for the Plummer family")
    a, b = _as_points(a, b)
    if m != a.size:
        raise InputError(f"m={m} does not match point dimension {a.size}")
    _check_theory_regime(spec, m)
    r2 = float(np.dot(a - b, a - b))
    eps2 = spec.epsilon**2
    return spec.d * (-eps2 * m + (2.0 + spec.d - m) * r2) * (eps2 + r2) ** (-2.0 - spec.d / 2.0)


def kernel_matrix(A, B, spec: KernelSpec) -> np.ndarray:
    """Pairwise kernel values: result[i, j] = k(A[i], B[j]).

    Dense O(len(A) * len(B)) evaluation; batch sizes in this package stay
    small enough that no spatial acceleration structure is warranted.
    """
    A, B = _as_point_sets(A, B)
    _check_theory_regime(spec, A.shape[1])
    r2 = _pairwise_sq_dists(A, B)
    if spec.family == PLUMMER:
        return (r2 + spec.epsilon**2) ** (-spec.d / 2.0)
    return np.exp(-r2 / (2.0 * spec.epsilon**2))


def kernel_grad_mean(A, B, spec: KernelSpec) -> np.ndarray:
    """Mean over B of the gradient of k at each point of A:

        result[i] = (1 / len(B)) sum_j grad_a k(A[i], B[j])

    This is the building block of sample-field evaluation; shape (len(A), m).
    """
    A, B = _as_point_sets(A, B)
    _check_theory_regime(spec, A.shape[1])
    diff = A[:, None, :] - B[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    if spec.family == PLUMMER:
        coef = -spec.d * (r2 + spec.epsilon**2) ** (-(spec.d + 2.0) / 2.0)
    else:
        coef = -np.exp(-r2 / (2.0 * spec.epsilon**2)) / spec.epsilon**2
    return np.mean(coef[:, :, None] * diff, axis=1)


def _as_point_sets(A, B):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise InputError(f"point sets must be 2-D with equal width, got shapes {A.shape} and {B.shape}")
    return A, B


def _pairwise_sq_dists(A, B):
    # (a - b)^2 expansion is faster but less accurate; the direct form keeps
    # exact Euclidean distances, which the derivative identities rely on.
    diff = A[:, None, :] - B[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)
