"""Closed-form tracing risk: statistic moments, power/AUC bounds, GDP caps.

For a released network with complexity C learned from n records, the
log-likelihood-ratio tracing statistic is asymptotically normal with

    non-members: mean  C/(2n), variance C/n
    members:     mean -C/(2n), variance C/n

which pins the attack's operating curve: at false-positive rate alpha the
power is at most Phi(sqrt(C/n) - PhiInv(1-alpha)), and the area under the
full curve is Phi(sqrt(C/(2n))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "log_normal_cdf",
    "TheoryProfile",
    "BoundCurve",
    "lr_moments",
    "bound_power",
    "bound_auc",
    "bound_curve",
    "default_alpha_grid",
    "naive_bayes_variance",
    "gdp_power_cap",
    "gdp_delta",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc; accurate over the full double range."""
    return 0.5 * math.erfc(-x / _SQRT2)


# Rational approximation of the normal quantile (Acklam's coefficients),
# polished with one Newton step against normal_cdf.  Absolute error is below
# 1e-13 on (1e-300, 1-1e-16) — comfortably inside the 1e-7 contract.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse of normal_cdf on the open interval (0, 1).

    Raises:
        ValidationError: for p outside (0, 1), including the endpoints.
    """
    if not 0.0 < p < 1.0:
        raise ValidationError(f"quantile level must lie strictly in (0, 1), got {p}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    if abs(x) < 37.0:  # one Newton step; skip where exp(x^2/2) would overflow
        err = normal_cdf(x) - p
        x -= err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x


def log_normal_cdf(x: float) -> float:
    """log(Phi(x)), stable far into the lower tail."""
    if x > -37.0:
        return math.log(normal_cdf(x))
    # Asymptotic expansion of the Mills ratio for large negative x.
    inv2 = 1.0 / (x * x)
    series = 1.0 - inv2 + 3.0 * inv2 * inv2
    return -0.5 * x * x - _LOG_SQRT_2PI - math.log(-x) + math.log(series)


@dataclass(frozen=True)
class TheoryProfile:
    """Predicted tracing-statistic moments for one (complexity, pool size).

    mu0/var0 describe non-members (null hypothesis), mu1/var1 members.
    """

    complexity: float
    pool_size: int
    mu0: float
    var0: float
    mu1: float
    var1: float
    gdp_mu: float | None = None


def _check_cn(complexity: float, pool_size: int) -> tuple[float, int]:
    if complexity < 0:
        raise ValidationError(f"complexity must be non-negative, got {complexity}")
    if pool_size < 1:
        raise ValidationError(f"pool_size must be at least 1, got {pool_size}")
    return float(complexity), int(pool_size)


def lr_moments(complexity: float, pool_size: int) -> TheoryProfile:
    """Normal-approximation moments of the tracing statistic."""
    c, n = _check_cn(complexity, pool_size)
    half = c / (2.0 * n)
    return TheoryProfile(
        complexity=c,
        pool_size=n,
        mu0=half,
        var0=c / n,
        mu1=-half,
        var1=c / n,
    )


def bound_power(complexity: float, pool_size: int, alpha: float) -> float:
    """Max attainable power at false-positive rate alpha: Phi(sqrt(C/n) - PhiInv(1-alpha))."""
    c, n = _check_cn(complexity, pool_size)
    return normal_cdf(math.sqrt(c / n) - normal_quantile(1.0 - alpha))


def bound_auc(complexity: float, pool_size: int) -> float:
    """Area under the full power/error trade-off: Phi(sqrt(C/(2n)))."""
    c, n = _check_cn(complexity, pool_size)
    return normal_cdf(math.sqrt(c / (2.0 * n)))


def gdp_power_cap(mu: float, alpha: float) -> float:
    """Power ceiling for a mu-GDP-trained release: Phi(mu - PhiInv(1-alpha))."""
    if mu < 0:
        raise ValidationError(f"mu must be non-negative, got {mu}")
    return normal_cdf(mu - normal_quantile(1.0 - alpha))


def gdp_delta(epsilon: float, mu: float) -> float:
    """delta(epsilon) for mu-GDP: Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2).

    The second term is evaluated as exp(eps + logPhi(...)) so huge epsilon does
    not overflow into inf * 0.
    """
    if mu <= 0:
        raise ValidationError(f"mu must be positive, got {mu}")
    if epsilon < 0:
        raise ValidationError(f"epsilon must be non-negative, got {epsilon}")
    first = normal_cdf(-epsilon / mu + mu / 2.0)
    second = math.exp(epsilon + log_normal_cdf(-epsilon / mu - mu / 2.0))
    return max(0.0, first - second)


def default_alpha_grid(points: int = 200, start: float = 1e-3) -> np.ndarray:
    """Logarithmic false-positive-rate grid from `start` up to 1."""
    if points < 2:
        raise ValidationError(f"grid needs at least 2 points, got {points}")
    if not 0.0 < start < 1.0:
        raise ValidationError(f"grid start must lie in (0, 1), got {start}")
    return np.geomspace(start, 1.0, points)


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """A power-vs-error bound evaluated on an alpha grid.

    betas are non-decreasing with beta(alpha) >= alpha, reaching 1 at alpha=1.
    When gdp_mu is set the curve is the pointwise minimum of the model-leakage
    bound and the GDP cap.
    """

    alphas: np.ndarray
    betas: np.ndarray
    auc: float
    complexity: float
    pool_size: int
    gdp_mu: float | None = None


def bound_curve(
    complexity: float,
    pool_size: int,
    alphas: np.ndarray | None = None,
    gdp_mu: float | None = None,
) -> BoundCurve:
    """Evaluate the power bound (optionally capped by mu-GDP) on a grid.

    Endpoints are closed by continuity: beta(0) = 0 and beta(1) = 1.  Both the
    bound and the cap are normal trade-off curves, so their pointwise minimum
    is the curve with separation min(sqrt(C/n), mu) and the AUC stays in
    closed form: Phi(separation / sqrt(2)).
    """
    c, n = _check_cn(complexity, pool_size)
    if alphas is None:
        alphas = default_alpha_grid()
    grid = np.asarray(alphas, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError("alpha grid must be a 1-D array with >= 2 points")
    if np.any(grid < 0) or np.any(grid > 1) or np.any(np.diff(grid) <= 0):
        raise ValidationError("alpha grid must be strictly increasing within [0, 1]")

    separation = math.sqrt(c / n)
    if gdp_mu is not None:
        if gdp_mu < 0:
            raise ValidationError(f"gdp_mu must be non-negative, got {gdp_mu}")
        separation = min(separation, float(gdp_mu))

    betas = np.empty_like(grid)
    for idx, a in enumerate(grid):
        if a == 0.0:
            betas[idx] = 0.0
        elif a == 1.0:
            betas[idx] = 1.0
        else:
            betas[idx] = normal_cdf(separation - normal_quantile(1.0 - a))
    auc = normal_cdf(separation / _SQRT2)
    return BoundCurve(
        alphas=grid,
        betas=betas,
        auc=auc,
        complexity=c,
        pool_size=n,
        gdp_mu=gdp_mu,
    )


def naive_bayes_variance(attributes: int, pool_size: int, p1: float) -> float:
    """Exact statistic variance for the star-shaped (naive Bayes) binary model.

    With m attributes hanging off a binary root with marginal p1 and pool size
    n, the complexity is C = 2m - 1 and

        variance = C/n + (m^2 / (4 n^2)) * (1 / (p1 (1 - p1)) - 4).

    The correction vanishes at p1 = 1/2, where the variance is exactly C/n.
    """
    if attributes < 1:
        raise ValidationError(f"attributes must be at least 1, got {attributes}")
    if pool_size < 1:
        raise ValidationError(f"pool_size must be at least 1, got {pool_size}")
    if not 0.0 < p1 < 1.0:
        raise ValidationError(f"p1 must lie strictly in (0, 1), got {p1}")
    m = float(attributes)
    n = float(pool_size)
    c = 2.0 * m - 1.0
    correction = (m * m) / (4.0 * n * n) * (1.0 / (p1 * (1.0 - p1)) - 4.0)
    return c / n + correction
