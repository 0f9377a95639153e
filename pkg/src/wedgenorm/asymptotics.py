"""Bound functions for injective norms of Gaussian antisymmetric tensors.

Everything here is a closed form or a one-dimensional root.  ``omega`` is the
log-potential of the radius-2 semicircle; ``sigma_p`` is the annealed
complexity of critical points at normalized level ``u``; its last
nonnegative point ``e0`` gives the asymptotic bound
``injnorm(T) / sqrt(d - p) -> alpha_p(p) = sqrt(p) * e0(p)`` for fixed ``p``.
In the double-scaling regime ``p = floor(alpha d)`` the level is governed by
``gamma_alpha``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import gammaln

from .errors import InvalidArgument, NumericError

ROOT_TOL = 1e-10
# Sigma_2 vanishes identically on [0, sqrt 2]; the root is the end of that
# plateau, so zero is tested with a small round-off allowance.
PLATEAU_TOL = 1e-12


def omega(u):
    """``int log|u - x| dmu(x)`` for the semicircle on ``[-2, 2]``."""
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    inner = a * a / 4 - 0.5
    s = np.sqrt(np.maximum(a * a - 4, 0.0))
    with np.errstate(divide="ignore"):
        outer = inner - a * s / 4 + np.log((a + s) / 2)
    out = np.where(a <= 2, inner, outer)
    return float(out) if out.ndim == 0 else out


def omega_quadrature(u, nodes: int = 10_000):
    """Gauss-Chebyshev (second kind) evaluation of :func:`omega`.

    With ``x = 2 cos t`` the semicircle weight becomes ``(2/pi) sin(t)^2 dt``.
    Accurate to ~1e-10 off the support; inside, the log singularity limits it
    to a few 1e-4 at the default node count.
    """
    k = np.arange(1, nodes + 1)
    t = k * np.pi / (nodes + 1)
    w = 2.0 / (nodes + 1) * np.sin(t) ** 2
    x = 2 * np.cos(t)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    with np.errstate(divide="ignore"):
        vals = np.log(np.abs(u[:, None] - x[None, :])) @ w
    return vals if vals.size > 1 else float(vals[0])


def semicircle_radius(p: int) -> float:
    """Edge ``2 sqrt((p-1)/p)`` of the limiting block-ensemble spectrum."""
    return 2 * math.sqrt((p - 1) / p)


def sigma_p(u, p: int):
    """Annealed complexity at normalized level ``u`` for order ``p``.

    ``(1 + log p)/2 - u^2/2 + Omega_p(u)`` with ``Omega_p`` the log-potential of
    the semicircle of radius ``2 sqrt((p-1)/p)``.
    """
    if p < 2:
        raise InvalidArgument("sigma_p needs p >= 2")
    u = np.asarray(u, dtype=float)
    scale = math.sqrt(p / (p - 1))
    out = (1 + math.log(p)) / 2 - u * u / 2 + omega(u * scale) + 0.5 * math.log((p - 1) / p)
    return float(out) if np.ndim(out) == 0 else out


def e0(p: int) -> float:
    """Last nonnegative point of ``sigma_p`` on ``(0, 10]`` (bisection)."""
    if p < 2:
        raise InvalidArgument("e0 needs p >= 2")
    lo, hi = 0.0, 10.0
    if sigma_p(hi, p) >= -PLATEAU_TOL:
        raise NumericError(f"sigma_p(10, {p}) is not negative; root not bracketed")
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        if sigma_p(mid, p) >= -PLATEAU_TOL:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def alpha_p(p: int) -> float:
    """Asymptotic bound on ``injnorm / sqrt(d - p)`` at fixed ``p``."""
    return math.sqrt(p) * e0(p)


def beta(alpha):
    """Double-scaling volume constant; symmetric under ``alpha -> 1 - alpha``."""
    a = np.asarray(alpha, dtype=float)
    if np.any((a <= 0) | (a >= 1)):
        raise InvalidArgument("beta needs 0 < alpha < 1")
    # evaluate on the ordered pair so the mirror symmetry holds bit for bit
    a, b = np.minimum(a, 1 - a), np.maximum(a, 1 - a)
    out = 0.75 + a / (4 * b) * np.log(a) + b / (4 * a) * np.log(b) + 0.5 * np.log(a * b)
    return float(out) if out.ndim == 0 else out


def _gamma_equation(g, d, alpha):
    return 0.5 * math.log(d) + beta(alpha) + omega(g) - g * g / 2


def gamma_alpha(d: float, alpha: float) -> float:
    """Root in ``gamma >= 0`` of ``log(d)/2 + beta(alpha) + Omega(gamma) - gamma^2/2``."""
    if d < 3:
        raise InvalidArgument("gamma_alpha needs d >= 3")
    f0 = _gamma_equation(0.0, d, alpha)
    if f0 <= 0:
        raise NumericError(f"no sign change for d={d}, alpha={alpha}: f(0)={f0:.3e}")
    hi = 4.0
    while _gamma_equation(hi, d, alpha) > 0:
        hi *= 2
        if hi > 1e6:
            raise NumericError(f"bracket search failed for d={d}, alpha={alpha}")
    return bisect(_gamma_equation, 0.0, hi, args=(d, alpha), xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps)


def gamma_expansion(d: float, alpha: float) -> float:
    """Large-``d`` expansion ``sqrt L + log L / (2 sqrt L) + beta / sqrt L``, ``L = log d``."""
    L = math.log(d)
    s = math.sqrt(L)
    return s + math.log(L) / (2 * s) + beta(alpha) / s


# --------------------------------------------------------------------------
# volume factors


def _check_pd(p, d):
    if not (1 <= p <= d - 1):
        raise InvalidArgument(f"need 1 <= p <= d-1, got p={p}, d={d}")


def _sum_gammaln(lo, hi, scale):
    """``sum_{i=lo}^{hi} log Gamma(i * scale)``."""
    if hi < lo:
        return 0.0
    return float(gammaln(np.arange(lo, hi + 1) * scale).sum())


def log_vol_grassmann(p: int, d: int, field: str = "real") -> float:
    """Log-volume of the real or complex Grassmannian of ``p``-planes in dimension ``d``."""
    _check_pd(p, d)
    n = p * (d - p)
    if field == "real":
        return 0.5 * n * math.log(math.pi) + _sum_gammaln(1, d - p, 0.5) - _sum_gammaln(p + 1, d, 0.5)
    if field == "complex":
        return n * math.log(math.pi) + _sum_gammaln(1, d - p, 1.0) - _sum_gammaln(p + 1, d, 1.0)
    raise InvalidArgument(f"unknown field {field!r}")


def log_k(p: int, d: int) -> float:
    """Log of the real Kac-Rice prefactor (Grassmannian volume times Gaussian normalizations)."""
    _check_pd(p, d)
    n = p * (d - p)
    return (0.5 * n * math.log(math.pi)
            + _sum_gammaln(1, p, 0.5) + _sum_gammaln(1, d - p, 0.5) - _sum_gammaln(1, d, 0.5)
            + 0.5 * (n + 1) * math.log(n / (2 * math.pi)))


def log_l(p: int, d: int) -> float:
    """Complex counterpart of :func:`log_k`."""
    _check_pd(p, d)
    n = p * (d - p)
    return (n * math.log(math.pi)
            + _sum_gammaln(1, p, 1.0) + _sum_gammaln(1, d - p, 1.0) - _sum_gammaln(1, d, 1.0)
            + (n + 1) * math.log(n / (2 * math.pi)))


@dataclass(frozen=True)
class HSMean:
    asymptotic: float
    exact: float
    relative_error: float


def hs_mean_asymptotics(d: int, p_or_alpha, regime: str = "fixed") -> HSMean:
    """Log of ``E||T||^2 = d!/(d-p)!`` against its large-``d`` form.

    ``regime="fixed"``: ``p`` fixed, asymptotic ``p log d``.
    ``regime="double"``: ``p = floor(alpha d)``, asymptotic
    ``alpha d log d - (alpha + (1-alpha) log(1-alpha)) d``.
    """
    if regime == "fixed":
        p = int(p_or_alpha)
        _check_pd(p, d + 1)
        asym = p * math.log(d)
    elif regime == "double":
        a = float(p_or_alpha)
        if not 0 < a < 1:
            raise InvalidArgument("alpha must lie in (0, 1)")
        p = math.floor(a * d)
        asym = a * d * math.log(d) - (a + (1 - a) * math.log(1 - a)) * d
    else:
        raise InvalidArgument(f"unknown regime {regime!r}")
    exact = float(gammaln(d + 1) - gammaln(d - p + 1))
    rel = abs(asym - exact) / abs(exact) if exact != 0 else abs(asym)
    return HSMean(asym, exact, rel)


# --------------------------------------------------------------------------
# tables


@dataclass
class BoundTable:
    columns: tuple[str, ...]
    rows: list[tuple]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def alpha_table(ps=(2, 3, 4)) -> BoundTable:
    rows = [(p, e0(p), alpha_p(p)) for p in ps]
    return BoundTable(("p", "E0", "alpha"), rows)


def beta_table(n: int = 99) -> BoundTable:
    """``beta`` on an even grid of ``[0.01, 0.99]`` with the mirrored value alongside."""
    grid = np.linspace(0.01, 0.99, n)
    rows = [(float(a), beta(a), beta(1 - a)) for a in grid]
    return BoundTable(("alpha", "beta", "beta_mirror"), rows)


def gamma_table(ds=(1e2, 1e4, 1e6, 1e8), alpha: float = 0.5) -> BoundTable:
    rows = []
    for d in ds:
        g, e = gamma_alpha(d, alpha), gamma_expansion(d, alpha)
        rows.append((float(d), alpha, g, e, abs(g - e) * math.sqrt(math.log(d))))
    return BoundTable(("d", "alpha", "gamma", "gamma_expansion", "scaled_residual"), rows)
