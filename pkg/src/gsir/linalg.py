"""Spectral functional calculus for symmetric positive semidefinite matrices.

Every regularized inverse, square root, and pseudo-inverse square root in the
package is produced by applying a scalar function to the eigenvalues of one
symmetric eigendecomposition.  Routing all of them through `spectral_apply`
keeps a single numerical pathway: one symmetry check, one clamping rule for
tiny negative eigenvalues, one post-symmetrization.
"""

import numpy as np
from dataclasses import dataclass

# Relative threshold below which an eigenvalue counts as zero for
# pseudo-inverses and rank decisions.
DEFAULT_CLAMP = 1e-12

# Allowed asymmetry and allowed negative-eigenvalue mass, both relative.
SYMMETRY_TOL = 1e-8
EIGENVALUE_TOL = 1e-8

_KINDS = ("inv_shift", "inv_sqrt_shift", "sqrt", "pinv_sqrt")


class NumericalError(RuntimeError):
    """An eigensolve failed or a matrix violated a numerical precondition."""


@dataclass(frozen=True)
class SpectralFn:
    """Scalar function applied to the (clamped) eigenvalues of a PSD matrix."""

    kind: str
    eps: float = 0.0
    clamp: float = DEFAULT_CLAMP

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown spectral function kind {self.kind!r}; "
                             f"expected one of {_KINDS}")
        if self.kind in ("inv_shift", "inv_sqrt_shift") and not self.eps > 0:
            raise ValueError(f"{self.kind} requires a positive shift, got eps={self.eps}")
        if self.kind == "pinv_sqrt" and not 0 < self.clamp < 1:
            raise ValueError(f"pinv_sqrt clamp must lie in (0, 1), got {self.clamp}")

    def apply_to_eigenvalues(self, d):
        """Evaluate the scalar function on a vector of clamped eigenvalues."""
        d = np.asarray(d, dtype=float)
        if self.kind == "inv_shift":
            return 1.0 / (d + self.eps)
        if self.kind == "inv_sqrt_shift":
            return (d + self.eps) ** -0.5
        if self.kind == "sqrt":
            return np.sqrt(d)
        # pinv_sqrt: invert the square root above a relative threshold,
        # zero out everything below it.
        top = d.max(initial=0.0)
        out = np.zeros_like(d)
        keep = d > self.clamp * top
        out[keep] = d[keep] ** -0.5
        return out


def inv_shift(eps):
    """d -> 1 / (d + eps), the regularized inverse."""
    return SpectralFn("inv_shift", eps=eps)


def inv_sqrt_shift(eps):
    """d -> (d + eps)^(-1/2), the regularized inverse square root."""
    return SpectralFn("inv_sqrt_shift", eps=eps)


def sqrt():
    """d -> sqrt(d)."""
    return SpectralFn("sqrt")


def pinv_sqrt(clamp=DEFAULT_CLAMP):
    """d -> d^(-1/2) on eigenvalues above clamp * max, else 0."""
    return SpectralFn("pinv_sqrt", clamp=clamp)


def symmetric_eigh(m):
    """Eigendecomposition of a nominally symmetric PSD matrix.

    Validates symmetry (relative to the largest entry) and that no eigenvalue
    is more negative than rounding allows, then clamps the remaining small
    negatives to zero.  Returns eigenvalues in ascending order.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError("matrix contains non-finite entries")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NumericalError(f"matrix is not symmetric: max|M - M^T| = {asym:.3e} "
                             f"exceeds {SYMMETRY_TOL:.0e} * max|M| = "
                             f"{SYMMETRY_TOL * scale:.3e}")
    try:
        d, v = np.linalg.eigh((m + m.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigendecomposition failed: {exc}") from exc
    top = float(d[-1]) if d.size else 0.0
    floor = -EIGENVALUE_TOL * max(top, 0.0)
    if d.size and float(d[0]) < floor:
        raise NumericalError(f"matrix has a negative eigenvalue {d[0]:.3e} below "
                             f"the tolerance {floor:.3e}; not positive semidefinite")
    return np.maximum(d, 0.0), v


def spectral_apply(m, fn):
    """Apply a `SpectralFn` to a symmetric PSD matrix via one eigendecomposition."""
    d, v = symmetric_eigh(m)
    fd = fn.apply_to_eigenvalues(d)
    out = (v * fd) @ v.T
    return (out + out.T) / 2.0


def operator_norm(a):
    """Largest singular value of a (not necessarily square) matrix."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    if not np.all(np.isfinite(a)):
        raise NumericalError("matrix contains non-finite entries")
    if a.ndim == 1:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a, 2))
