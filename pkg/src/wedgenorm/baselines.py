"""Power-iteration baselines for order-3 tensors without antisymmetry.

Both routines return the best value over random restarts; like the ascent in
:mod:`wedgenorm.grassmann` they give lower bounds on the injective norm.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .rng import make_rng


def sample_asymmetric(d: int, rng) -> np.ndarray:
    return make_rng(rng).standard_normal((d, d, d))


def sample_symmetric(d: int, rng) -> np.ndarray:
    """Symmetrization of an i.i.d. Gaussian cube (mean over the six index orders)."""
    G = make_rng(rng).standard_normal((d, d, d))
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    return sum(G.transpose(q) for q in perms) / 6.0


def _unit(v):
    return v / np.linalg.norm(v)


def _last_two(T, y, z):
    """``T(., y, z)`` as two BLAS contractions."""
    return (T @ z) @ y


def asymmetric_power(T: np.ndarray, restarts: int = 10, max_iters: int = 2000, tol: float = 1e-12,
                     rng=None) -> tuple[float, list[np.ndarray]]:
    """Alternating maximization of ``T(x, y, z)`` over unit vectors.

    Each update is the exact maximizer in one factor, so the objective never
    decreases.  Returns the best value and the per-restart value traces.
    """
    if T.ndim != 3:
        raise InvalidArgument("asymmetric_power expects an order-3 array")
    gen = make_rng(rng)
    best = -np.inf
    traces = []
    for _ in range(restarts):
        y = _unit(gen.standard_normal(T.shape[1]))
        z = _unit(gen.standard_normal(T.shape[2]))
        x = _unit(_last_two(T, y, z))
        vals = []
        for _ in range(max_iters):
            y = _unit(x @ (T @ z))
            z = _unit(np.tensordot(x, T, 1).T @ y)
            g = _last_two(T, y, z)
            val = float(np.linalg.norm(g))
            x = g / val
            vals.append(val)
            if len(vals) > 1 and vals[-1] - vals[-2] <= tol * val:
                break
        traces.append(np.array(vals))
        best = max(best, vals[-1])
    return float(best), traces


def symmetric_power(S: np.ndarray, restarts: int = 10, max_iters: int = 5000, tol: float = 1e-12,
                    rng=None) -> tuple[float, list[np.ndarray]]:
    """Shifted symmetric power iteration for ``max |S(x, x, x)|`` over unit ``x``.

    The unshifted step ``x <- S(., x, x)/|.|`` is tried first; if it fails to
    increase ``S(x, x, x)`` the convexifying shift ``2 ||S_(1)||_2 x`` is added,
    which makes every step monotone.  ``S(x,x,x)`` is odd in ``x`` so the
    maximum of the signed value equals the maximum modulus.
    """
    if S.ndim != 3:
        raise InvalidArgument("symmetric_power expects an order-3 array")
    d = S.shape[0]
    shift = 2 * np.linalg.norm(S.reshape(d, -1), 2)
    gen = make_rng(rng)
    best = -np.inf
    traces = []
    for _ in range(restarts):
        x = _unit(gen.standard_normal(d))
        g = _last_two(S, x, x)
        f = float(x @ g)
        if f < 0:
            x, g, f = -x, g, -f
        vals = [f]
        for _ in range(max_iters):
            y = _unit(g)
            gy = _last_two(S, y, y)
            fy = float(y @ gy)
            if fy < f:
                y = _unit(g + shift * x)
                gy = _last_two(S, y, y)
                fy = float(y @ gy)
            done = fy - f <= tol * abs(fy)
            x, g, f = y, gy, fy
            vals.append(f)
            if done:
                break
        traces.append(np.array(vals))
        best = max(best, f)
    return float(best), traces
