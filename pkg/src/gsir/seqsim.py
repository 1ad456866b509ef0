"""Sequence-space simulator for the regression-operator convergence theory.

Works directly with Karhunen-Loeve coordinates instead of kernels: the X
feature has independent coordinates zeta_j with variance lambda_j = j^-alpha,
and the Y feature is an exact linear image Zy = Zx R + Zu with a residual
whose covariance with Zx is exactly zero.  R = Lambda^beta S encodes the
smoothness coupling, so the population regression operators and their
eigenstructure are known in closed form and empirical estimates can be
compared against them at any (n, epsilon).
"""

import numpy as np
from dataclasses import dataclass
from scipy.special import zeta

from .linalg import (DEFAULT_CLAMP, inv_shift, inv_sqrt_shift, operator_norm,
                     spectral_apply)

S_KINDS = ("identity", "random")
RESIDUAL_KINDS = ("independent", "heteroscedastic")

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class SpectralModel:
    """Population model: spectra, coupling, and the regression operators."""

    j_dim: int
    y_dim: int
    alpha: float
    beta: float
    alpha_u: float
    s_kind: str
    lambdas: np.ndarray      # (j_dim,) eigenvalues j^-alpha
    S: np.ndarray            # (j_dim, y_dim), operator norm 1
    R: np.ndarray            # Lambda^beta S
    Rprime: np.ndarray       # Lambda^(beta + 1/2) S
    noise_scales: np.ndarray  # (y_dim,) residual scales k^-alpha_u


@dataclass(frozen=True)
class SpectralSample:
    """One simulated draw of n rows of coordinates."""

    n: int
    Zx: np.ndarray
    Zu: np.ndarray
    Zy: np.ndarray
    residual_kind: str


@dataclass(frozen=True)
class EmpiricalOps:
    """Column-centered second-moment estimates from one sample."""

    n: int
    sxx: np.ndarray
    sxy: np.ndarray
    sxu: np.ndarray


@dataclass(frozen=True)
class RegressionOps:
    """Regularized sample regression operators at one epsilon."""

    epsilon: float
    sxx: np.ndarray
    sxy: np.ndarray
    r1: np.ndarray        # (sxx + eps)^-1 sxy
    r2: np.ndarray        # (sxx + eps)^-1/2 sxy
    m: np.ndarray         # r1 r1^T
    m_prime: np.ndarray   # r2 r2^T
    q: np.ndarray         # the (sxx + eps)^-1/2 factor itself


@dataclass(frozen=True)
class ErrorRecord:
    """Operator-norm errors of one estimate against the population model."""

    epsilon: float
    err_r1: float
    err_r2: float
    err_m: float
    d: int
    proj_err: np.ndarray          # (d,) eigenprojection errors of m
    gap: np.ndarray               # (d,) population eigenvalue gaps delta_j
    bound_ok: np.ndarray          # (d,) proj_err_j <= 4 err_m / delta_j
    bound_applicable: np.ndarray  # (d,) False where delta_j == 0
    eta_span_err: float           # variant-2 predictor-span projection error


def build_model(j_dim, y_dim, alpha, beta, seed=0, s_kind="identity", alpha_u=2.0):
    """Construct the population model.

    s_kind 'identity' places an identity block in S (rank min(j_dim, y_dim));
    'random' draws a seeded Gaussian matrix rescaled to operator norm 1.
    """
    if j_dim < 1 or y_dim < 1:
        raise ValueError(f"dimensions must be positive, got j_dim={j_dim}, y_dim={y_dim}")
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1 for a summable spectrum, got {alpha}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not alpha_u > 1:
        raise ValueError(f"alpha_u must exceed 1, got {alpha_u}")
    if s_kind not in S_KINDS:
        raise ValueError(f"unknown s_kind {s_kind!r}; expected one of {S_KINDS}")
    lambdas = power_spectrum(alpha, j_dim)
    if s_kind == "identity":
        s = np.zeros((j_dim, y_dim))
        r = min(j_dim, y_dim)
        s[:r, :r] = np.eye(r)
    else:
        rng = np.random.default_rng(seed)
        s = rng.standard_normal((j_dim, y_dim))
        s = s / operator_norm(s)
    r_op = (lambdas ** beta)[:, None] * s
    # Chained so that Rprime == sqrt(Lambda) R holds bitwise, not just in
    # exact arithmetic.
    rprime_op = np.sqrt(lambdas)[:, None] * r_op
    k = np.arange(1, y_dim + 1, dtype=float)
    return SpectralModel(j_dim=j_dim, y_dim=y_dim, alpha=float(alpha),
                         beta=float(beta), alpha_u=float(alpha_u), s_kind=s_kind,
                         lambdas=lambdas, S=s, R=r_op, Rprime=rprime_op,
                         noise_scales=k ** -alpha_u)


def simulate_sample(model, n, seed, residual_kind="independent"):
    """Draw n rows: Zx from the spectrum, Zy = Zx R + Zu exactly.

    Draw order is fixed (coordinate noise first, residual noise second) so a
    seed determines the sample bit-for-bit.  Coordinates are sqrt(lambda_j)
    times uniform [-sqrt(3), sqrt(3)] scores: unit-variance, bounded.
    The 'heteroscedastic' residual multiplies each row's noise by
    (1 + e_1)/2, keeping the X-residual covariance exactly zero while making
    the residual variance depend on the first coordinate's score e_1.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if residual_kind not in RESIDUAL_KINDS:
        raise ValueError(f"unknown residual_kind {residual_kind!r}; "
                         f"expected one of {RESIDUAL_KINDS}")
    rng = np.random.default_rng(seed)
    e = rng.uniform(-_SQRT3, _SQRT3, size=(n, model.j_dim))
    zx = e * np.sqrt(model.lambdas)
    w = rng.uniform(-_SQRT3, _SQRT3, size=(n, model.y_dim))
    zu = w * model.noise_scales
    if residual_kind == "heteroscedastic":
        zu = zu * (1.0 + e[:, :1]) / 2.0
    zy = zx @ model.R + zu
    return SpectralSample(n=n, Zx=zx, Zu=zu, Zy=zy, residual_kind=residual_kind)


def empirical_operators(sample):
    """Column-centered covariance estimates Sxx, Sxy, Sxu from one sample."""
    if sample.n < 2:
        raise ValueError(f"need n >= 2 to center columns, got {sample.n}")
    zx = sample.Zx - sample.Zx.mean(axis=0)
    zy = sample.Zy - sample.Zy.mean(axis=0)
    zu = sample.Zu - sample.Zu.mean(axis=0)
    n = sample.n
    sxx = zx.T @ zx / n
    return EmpiricalOps(n=n, sxx=(sxx + sxx.T) / 2.0,
                        sxy=zx.T @ zy / n, sxu=zx.T @ zu / n)


def estimate_regression_ops(sample, epsilon):
    """Regularized regression-operator estimates at one epsilon."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    ops = empirical_operators(sample)
    b = spectral_apply(ops.sxx, inv_shift(epsilon))
    q = spectral_apply(ops.sxx, inv_sqrt_shift(epsilon))
    r1 = b @ ops.sxy
    r2 = q @ ops.sxy
    m = r1 @ r1.T
    mp = r2 @ r2.T
    return RegressionOps(epsilon=float(epsilon), sxx=ops.sxx, sxy=ops.sxy,
                         r1=r1, r2=r2, m=(m + m.T) / 2.0,
                         m_prime=(mp + mp.T) / 2.0, q=q)


def _descending_eig(m):
    d, v = np.linalg.eigh((m + m.T) / 2.0)
    return d[::-1], v[:, ::-1]


def _orth_columns(a, d):
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size < d or not s[d - 1] > DEFAULT_CLAMP * s[0]:
        raise ValueError(f"matrix has numerical rank below {d}")
    return u[:, :d]


def span_projection_error(a, b, d):
    """Operator-norm distance between the rank-d column-span projectors.

    Equals the sine of the largest principal angle between the spans.
    """
    ua = _orth_columns(np.asarray(a, float), d)
    ub = _orth_columns(np.asarray(b, float), d)
    svals = np.linalg.svd(ua.T @ ub, compute_uv=False)
    smin = min(1.0, float(svals[-1]))
    return float(np.sqrt(max(0.0, 1.0 - smin * smin)))


def top_eigenvectors(m, d):
    """Top-d eigenvectors of a symmetric matrix, descending eigenvalue order."""
    _, v = _descending_eig(m)
    return v[:, :d]


def error_report(model, ops, epsilon=None):
    """Compare one estimate to the population operators.

    Eigenprojection errors are reported for j up to d = rank(R); gaps use
    the population spectrum of M = R R^T padded with its zero eigenvalue.
    bound_ok checks the perturbation inequality
    ||Phat_j - P_j|| <= 4 ||Mhat - M|| / delta_j, skipped where delta_j = 0.
    epsilon defaults to the one recorded in ops.
    """
    epsilon = ops.epsilon if epsilon is None else float(epsilon)
    m_pop = model.R @ model.R.T
    err_r1 = operator_norm(ops.r1 - model.R)
    err_r2 = operator_norm(ops.r2 - model.Rprime)
    err_m = operator_norm(ops.m - m_pop)

    svals = np.linalg.svd(model.R, compute_uv=False)
    d = int(np.count_nonzero(svals > DEFAULT_CLAMP * svals[0])) if svals.size else 0

    mu, vecs = _descending_eig(m_pop)
    mu = np.maximum(mu, 0.0)
    mu_ext = np.concatenate([mu, [0.0]])  # spectrum includes 0 beyond rank
    mu_hat, vecs_hat = _descending_eig(ops.m)

    proj_err = np.zeros(d)
    gap = np.zeros(d)
    bound_ok = np.zeros(d, dtype=bool)
    applicable = np.zeros(d, dtype=bool)
    for j in range(d):
        if j == 0:
            gap[j] = mu_ext[0] - mu_ext[1]
        else:
            gap[j] = min(mu_ext[j - 1] - mu_ext[j], mu_ext[j] - mu_ext[j + 1])
        # Rank-one projector difference: ||vh vh^T - v v^T|| = sin(angle).
        c = min(1.0, abs(float(vecs_hat[:, j] @ vecs[:, j])))
        proj_err[j] = np.sqrt(max(0.0, 1.0 - c * c))
        if gap[j] > 0.0:
            applicable[j] = True
            bound_ok[j] = proj_err[j] <= 4.0 * err_m / gap[j]

    # Variant-2 sample predictor span: the half-inverted weighting applied to
    # the leading eigenvectors of m_prime, compared to the columns of R.
    eta_err = 0.0
    if d > 0:
        eta_hat = ops.q @ top_eigenvectors(ops.m_prime, d)
        eta_err = span_projection_error(eta_hat, model.R, d)

    return ErrorRecord(epsilon=epsilon, err_r1=err_r1, err_r2=err_r2,
                       err_m=err_m, d=d, proj_err=proj_err, gap=gap,
                       bound_ok=bound_ok, bound_applicable=applicable,
                       eta_span_err=eta_err)


def power_spectrum(alpha, j_dim):
    """The truncated spectrum lambda_j = j^-alpha, j = 1..j_dim."""
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1 for a summable spectrum, got {alpha}")
    if j_dim < 1:
        raise ValueError(f"j_dim must be positive, got {j_dim}")
    return np.arange(1, j_dim + 1, dtype=float) ** -alpha


def lemma_alpha_sum(lambdas, epsilon):
    """sum_j lambda_j / (lambda_j + epsilon), the effective dimension.

    For lambda_j = j^-alpha this grows like epsilon^(-1/alpha) as epsilon
    decreases.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambdas must be a nonempty 1-d sequence")
    if np.any(lam < 0):
        raise ValueError("lambdas must be nonnegative")
    return float(np.sum(lam / (lam + epsilon)))


def truncation_tail_fraction(alpha, j_dim):
    """Fraction of total spectrum mass sum j^-alpha lost beyond j_dim."""
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    return float(zeta(alpha, j_dim + 1) / zeta(alpha, 1))
