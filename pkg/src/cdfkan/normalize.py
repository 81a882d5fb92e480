"""Feature normalization: Gaussian-CDF quantiles, EDF ranks, MinMax, LayerNorm.

The quantile route standardizes with batch statistics and pushes values
through the standard normal CDF, landing in (0, 1) nearly uniformly.  The
EDF route maps the i-th order statistic of an n-sample to (i - 1/2) / n,
which is exactly uniform on its grid but has zero derivative almost
everywhere; a Gaussian KDE evaluated at the input serves as its gradient
surrogate.  MinMax rescaling is kept as the baseline.  LayerNorm comes with
an explicit backward pass and an option to freeze its affine parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.stats import rankdata

__all__ = [
    "BatchStats",
    "RunningStats",
    "LayerNormParams",
    "batch_stats",
    "feature_stats",
    "gaussian_cdf",
    "gaussian_cdf_deriv",
    "cdf_normalize",
    "edf_transform",
    "kde_density",
    "silverman_bandwidth",
    "minmax_normalize",
    "minmax_forward",
    "minmax_backward",
    "layernorm_forward",
    "layernorm_backward",
]

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
# Tightest open-interval bounds representable in float64.
_U_LO = np.nextafter(0.0, 1.0)
_U_HI = np.nextafter(1.0, 0.0)


@dataclass
class BatchStats:
    """Per-feature mean and guarded standard deviation.

    `mu` and `sigma` are scalars for a single column or arrays of length f
    for a feature matrix; `sigma = sqrt(epsilon + var)` never vanishes.
    """

    mu: np.ndarray | float
    sigma: np.ndarray | float
    epsilon: float = 1e-5


def batch_stats(column: np.ndarray, epsilon: float = 1e-5) -> BatchStats:
    """Mean and sqrt(epsilon + unbiased variance) of one feature column."""
    column = np.asarray(column, dtype=float)
    if column.size == 0:
        raise ValueError("cannot compute batch statistics of an empty column")
    mu = float(column.mean())
    # A single observation carries no spread information: variance 0, the
    # epsilon guard keeps sigma positive.
    var = float(column.var(ddof=1)) if column.size > 1 else 0.0
    return BatchStats(mu=mu, sigma=float(np.sqrt(epsilon + var)), epsilon=epsilon)


def feature_stats(batch: np.ndarray, epsilon: float = 1e-5) -> BatchStats:
    """Column-wise batch_stats for an n x f matrix, vectorized."""
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ValueError(f"expected a non-empty n x f matrix, got shape {batch.shape}")
    mu = batch.mean(axis=0)
    var = batch.var(axis=0, ddof=1) if batch.shape[0] > 1 else np.zeros(batch.shape[1])
    return BatchStats(mu=mu, sigma=np.sqrt(epsilon + var), epsilon=epsilon)


class RunningStats:
    """Exponential moving average of batch statistics.

    Training updates feed per-batch statistics; evaluation reads the frozen
    averages, mirroring batch-normalization practice.
    """

    def __init__(self, momentum: float = 0.9):
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        self.momentum = momentum
        self.mu: np.ndarray | float | None = None
        self.sigma: np.ndarray | float | None = None
        self.epsilon: float = 1e-5

    def update(self, stats: BatchStats) -> None:
        self.epsilon = stats.epsilon
        if self.mu is None:
            self.mu = stats.mu
            self.sigma = stats.sigma
        else:
            m = self.momentum
            self.mu = m * self.mu + (1.0 - m) * stats.mu
            self.sigma = m * self.sigma + (1.0 - m) * stats.sigma

    def frozen(self) -> BatchStats:
        if self.mu is None:
            raise ValueError("no batches seen; running statistics are undefined")
        return BatchStats(mu=self.mu, sigma=self.sigma, epsilon=self.epsilon)


def gaussian_cdf(z):
    """Standard normal CDF, strictly monotone, accurate to ~1e-16."""
    z = np.asarray(z, dtype=float)
    u = 0.5 * (1.0 + special.erf(z / _SQRT2))
    u = np.clip(u, _U_LO, _U_HI)
    return u if u.ndim else float(u)


def gaussian_cdf_deriv(z):
    """Standard normal pdf exp(-z^2/2) / sqrt(2 pi)."""
    z = np.asarray(z, dtype=float)
    d = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return d if d.ndim else float(d)


def cdf_normalize(batch: np.ndarray, stats: BatchStats) -> np.ndarray:
    """Standardize with the given statistics, then map through the normal CDF."""
    batch = np.asarray(batch, dtype=float)
    if not np.all(np.isfinite(batch)):
        raise ValueError("cdf_normalize requires finite inputs")
    return gaussian_cdf((batch - stats.mu) / stats.sigma)


def edf_transform(sample: np.ndarray) -> np.ndarray:
    """Rank-based quantiles: the i-th order statistic maps to (i - 1/2) / n.

    Tied values share the mean of their tied positions, so the output
    depends only on the rank structure of the input.
    """
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValueError("cannot rank an empty sample")
    ranks = rankdata(sample, method="average")
    return (ranks - 0.5) / sample.size


def kde_density(sample: np.ndarray, x, bandwidth: float):
    """Gaussian kernel density estimate (1/(n h)) sum phi((x - x_i)/h)."""
    if bandwidth <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise ValueError("kde_density requires a non-empty sample")
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - sample) / bandwidth
    dens = gaussian_cdf_deriv(z).mean(axis=-1) / bandwidth
    return dens if dens.ndim else float(dens)


def silverman_bandwidth(sample: np.ndarray) -> float:
    """Rule-of-thumb bandwidth 1.06 * std * n^(-1/5)."""
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size < 2:
        raise ValueError("Silverman bandwidth needs at least 2 points")
    sigma = float(sample.std(ddof=1))
    if sigma == 0.0:
        raise ValueError("sample has zero spread; bandwidth undefined")
    return 1.06 * sigma * sample.size ** (-0.2)


def minmax_normalize(batch: np.ndarray, axis: int = 0) -> np.ndarray:
    """Affine rescale of each feature to [0, 1]; constant features map to 0.5."""
    u, _ = minmax_forward(batch, axis=axis)
    return u


def minmax_forward(batch: np.ndarray, axis: int = 0):
    """MinMax rescale with a cache for exact backpropagation.

    The gradient is routed through the extreme entries as well (the batch
    min/max move with their argmin/argmax elements), so finite-difference
    checks agree with the backward pass.
    """
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2:
        raise ValueError(f"expected a 2-D batch, got shape {batch.shape}")
    mn = batch.min(axis=axis, keepdims=True)
    mx = batch.max(axis=axis, keepdims=True)
    span = mx - mn
    degenerate = span == 0.0
    safe_span = np.where(degenerate, 1.0, span)
    u = np.where(degenerate, 0.5, (batch - mn) / safe_span)
    cache = {
        "u": u,
        "span": safe_span,
        "degenerate": degenerate,
        "argmin": batch.argmin(axis=axis),
        "argmax": batch.argmax(axis=axis),
        "axis": axis,
        "shape": batch.shape,
    }
    return u, cache


def minmax_backward(grad_u: np.ndarray, cache) -> np.ndarray:
    """Exact gradient of minmax_forward, including the min/max paths."""
    grad_u = np.asarray(grad_u, dtype=float)
    if grad_u.shape != cache["shape"]:
        raise ValueError(f"gradient shape {grad_u.shape} != input shape {cache['shape']}")
    u, span = cache["u"], cache["span"]
    live = ~cache["degenerate"]
    grad = np.where(live, grad_u / span, 0.0)
    # d u_b / d min = (u_b - 1)/span and d u_b / d max = -u_b / span; these
    # accumulate onto the rows (or columns) holding the extremes.
    g_min = np.where(live, (grad_u * (u - 1.0) / span), 0.0).sum(axis=cache["axis"])
    g_max = np.where(live, (-grad_u * u / span), 0.0).sum(axis=cache["axis"])
    if cache["axis"] == 0:
        cols = np.arange(grad.shape[1])
        np.add.at(grad, (cache["argmin"], cols), g_min)
        np.add.at(grad, (cache["argmax"], cols), g_max)
    else:
        rows = np.arange(grad.shape[0])
        np.add.at(grad, (rows, cache["argmin"]), g_min)
        np.add.at(grad, (rows, cache["argmax"]), g_max)
    return grad


@dataclass
class LayerNormParams:
    """Scale/shift parameters for LayerNorm; frozen pins scale=1, shift=0."""

    gamma: np.ndarray
    beta: np.ndarray
    frozen: bool = False
    epsilon: float = 1e-5

    @classmethod
    def create(cls, dim: int, frozen: bool = False, epsilon: float = 1e-5) -> "LayerNormParams":
        return cls(gamma=np.ones(dim), beta=np.zeros(dim), frozen=frozen, epsilon=epsilon)


def layernorm_forward(x: np.ndarray, params: LayerNormParams):
    """Standardize each example over its feature axis, then scale and shift."""
    x = np.asarray(x, dtype=float)
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + params.epsilon)
    x_hat = (x - mean) * inv_std
    if params.frozen:
        y = x_hat
    else:
        y = x_hat * params.gamma + params.beta
    cache = {"x_hat": x_hat, "inv_std": inv_std, "params": params}
    return y, cache


def layernorm_backward(grad_y: np.ndarray, cache):
    """Gradients of layernorm_forward; frozen params receive zeros."""
    grad_y = np.asarray(grad_y, dtype=float)
    x_hat = cache["x_hat"]
    if grad_y.shape != x_hat.shape:
        raise ValueError(f"gradient shape {grad_y.shape} != activation shape {x_hat.shape}")
    params: LayerNormParams = cache["params"]
    inv_std = cache["inv_std"]
    f = x_hat.shape[-1]
    if params.frozen:
        grad_gamma = np.zeros_like(params.gamma)
        grad_beta = np.zeros_like(params.beta)
        g = grad_y
    else:
        sum_axes = tuple(range(grad_y.ndim - 1))
        grad_gamma = (grad_y * x_hat).sum(axis=sum_axes)
        grad_beta = grad_y.sum(axis=sum_axes)
        g = grad_y * params.gamma
    grad_x = (inv_std / f) * (
        f * g
        - g.sum(axis=-1, keepdims=True)
        - x_hat * (g * x_hat).sum(axis=-1, keepdims=True)
    )
    return grad_x, grad_gamma, grad_beta
