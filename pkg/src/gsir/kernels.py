"""Kernel evaluation, centered Gram matrices, and the median bandwidth rule.

The centered Gram G = Q K Q (Q = I - 11^T/n) represents the covariance
geometry of the feature maps after removing the constant function; every
estimator downstream consumes G, never the raw K.
"""

import numpy as np
from dataclasses import dataclass
from scipy.spatial.distance import cdist, pdist

FAMILIES = ("gaussian", "laplace", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its scale parameter (ignored for linear).

    gaussian : k(x, y) = exp(-gamma * ||x - y||^2)
    laplace  : k(x, y) = exp(-gamma * ||x - y||_1)
    linear   : k(x, y) = <x, y>
    """

    family: str
    gamma: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; "
                             f"expected one of {FAMILIES}")
        if self.family != "linear" and not self.gamma > 0:
            raise ValueError(f"{self.family} kernel requires gamma > 0, got {self.gamma}")


@dataclass(frozen=True)
class GramBundle:
    """Raw and centered Gram matrices for one point set."""

    n: int
    K: np.ndarray
    G: np.ndarray


def _as_points(x, name="points"):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of shape (n, p), got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def eval_kernel(spec, x, y):
    """Evaluate k(x, y) for two single points of equal dimension."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"point dimensions differ: {x.shape} vs {y.shape}")
    if spec.family == "gaussian":
        return float(np.exp(-spec.gamma * np.sum((x - y) ** 2)))
    if spec.family == "laplace":
        return float(np.exp(-spec.gamma * np.sum(np.abs(x - y))))
    return float(x @ y)


def gram_matrix(spec, x, z=None):
    """Gram matrix k(x_i, z_j); z defaults to x."""
    x = _as_points(x)
    z = x if z is None else _as_points(z, "second point set")
    if x.shape[1] != z.shape[1]:
        raise ValueError(f"point dimensions differ: {x.shape[1]} vs {z.shape[1]}")
    if spec.family == "gaussian":
        return np.exp(-spec.gamma * cdist(x, z, "sqeuclidean"))
    if spec.family == "laplace":
        return np.exp(-spec.gamma * cdist(x, z, "cityblock"))
    return x @ z.T


def centered_gram(spec, x):
    """Centered Gram bundle for one point set (needs n >= 2)."""
    x = _as_points(x)
    n = x.shape[0]
    if n < 2:
        raise ValueError(f"centering needs at least 2 points, got {n}")
    k = gram_matrix(spec, x)
    q = np.eye(n) - np.full((n, n), 1.0 / n)
    g = q @ k @ q
    g = (g + g.T) / 2.0
    return GramBundle(n=n, K=k, G=g)


def median_bandwidth(x):
    """gamma = 1 / (2 m^2) where m is the median pairwise Euclidean distance."""
    x = _as_points(x)
    if x.shape[0] < 2:
        raise ValueError(f"median bandwidth needs at least 2 points, got {x.shape[0]}")
    dists = pdist(x)
    m = float(np.median(dists))
    if m == 0.0:
        raise ValueError("median pairwise distance is zero (degenerate point set); "
                         "cannot form a bandwidth")
    return 1.0 / (2.0 * m * m)
