"""Orthonormal Legendre polynomial basis on [0, 1].

Legendre polynomials P_k live on [-1, 1] and are evaluated by the stable
three-term upward recurrence.  The rescaled family

    f_k(u) = sqrt(2k + 1) * P_k(2u - 1)

is orthonormal with unit weight on [0, 1]:  int_0^1 f_j f_k = delta_jk.
Derivatives use the recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k, which is
well behaved at the interval endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BasisSpec",
    "legendre_p",
    "legendre_p_deriv",
    "orthonormal_f",
    "orthonormal_f_deriv",
    "eval_basis_vector",
    "eval_basis_matrix",
    "eval_basis_deriv_matrix",
]


@dataclass(frozen=True)
class BasisSpec:
    """Maximum degree and the orthonormalization constants sqrt(2k+1)."""

    degree_max: int
    norm_consts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.degree_max < 0:
            raise ValueError(f"degree_max must be >= 0, got {self.degree_max}")
        consts = np.sqrt(2.0 * np.arange(self.degree_max + 1) + 1.0)
        object.__setattr__(self, "norm_consts", consts)

    @property
    def size(self) -> int:
        return self.degree_max + 1


def legendre_p(k: int, x):
    """P_k(x) by upward recurrence from P_0 = 1, P_1 = x."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for j in range(1, k):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    return p if p.ndim else float(p)


def legendre_p_deriv(k: int, x):
    """P'_k(x) via P'_{j+1} = P'_{j-1} + (2j+1) P_j."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    x = np.asarray(x, dtype=float)
    if k == 0:
        d = np.zeros_like(x)
        return d if d.ndim else float(d)
    p_prev = np.ones_like(x)
    p = x.copy()
    d_prev = np.zeros_like(x)
    d = np.ones_like(x)
    for j in range(1, k):
        d_prev, d = d, d_prev + (2 * j + 1) * p
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    return d if d.ndim else float(d)


def _check_unit_interval(u: np.ndarray) -> None:
    if np.any(u < 0.0) or np.any(u > 1.0):
        bad = np.asarray(u)[(u < 0.0) | (u > 1.0)]
        raise ValueError(
            f"basis input outside [0, 1] (e.g. {bad.flat[0]!r}); "
            "normalize inputs before evaluating the orthonormal basis"
        )


def orthonormal_f(k: int, u):
    """Orthonormal basis function f_k(u) = sqrt(2k+1) P_k(2u-1) on [0, 1]."""
    u = np.asarray(u, dtype=float)
    _check_unit_interval(u)
    return np.sqrt(2.0 * k + 1.0) * legendre_p(k, 2.0 * u - 1.0)


def orthonormal_f_deriv(k: int, u):
    """d/du f_k(u); the inner map u -> 2u-1 contributes a factor 2."""
    u = np.asarray(u, dtype=float)
    _check_unit_interval(u)
    return 2.0 * np.sqrt(2.0 * k + 1.0) * legendre_p_deriv(k, 2.0 * u - 1.0)


def eval_basis_vector(spec: BasisSpec, u: float) -> np.ndarray:
    """All of f_0(u) .. f_d(u) in one recurrence pass, shape (d+1,)."""
    return eval_basis_matrix(spec, np.asarray([u], dtype=float))[0]


def eval_basis_matrix(spec: BasisSpec, u: np.ndarray) -> np.ndarray:
    """f_k(u_i) for a batch of points: shape (*u.shape, d+1)."""
    u = np.asarray(u, dtype=float)
    _check_unit_interval(u)
    t = 2.0 * u - 1.0
    d = spec.degree_max
    out = np.empty(u.shape + (d + 1,))
    out[..., 0] = 1.0
    if d >= 1:
        out[..., 1] = t
    for k in range(1, d):
        out[..., k + 1] = ((2 * k + 1) * t * out[..., k] - k * out[..., k - 1]) / (k + 1)
    out *= spec.norm_consts
    return out


def eval_basis_deriv_matrix(spec: BasisSpec, u: np.ndarray) -> np.ndarray:
    """f'_k(u_i) for a batch of points: shape (*u.shape, d+1)."""
    u = np.asarray(u, dtype=float)
    _check_unit_interval(u)
    t = 2.0 * u - 1.0
    d = spec.degree_max
    p = np.empty(u.shape + (d + 1,))
    dp = np.empty(u.shape + (d + 1,))
    p[..., 0] = 1.0
    dp[..., 0] = 0.0
    if d >= 1:
        p[..., 1] = t
        dp[..., 1] = 1.0
    for k in range(1, d):
        p[..., k + 1] = ((2 * k + 1) * t * p[..., k] - k * p[..., k - 1]) / (k + 1)
        dp[..., k + 1] = dp[..., k - 1] + (2 * k + 1) * p[..., k]
    dp *= 2.0 * spec.norm_consts
    return dp
