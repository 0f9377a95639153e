"""The random score in the affine chart around a coordinate subspace.

A chart point ``B`` of shape ``(d - p, p)`` stands for the span of the columns
of ``[I_p; B]`` (the *north* chart, around span(e_1..e_p)).  The *south* chart
lifts a ``(p', d - p')`` matrix to ``[B; I_{d-p'}]`` and is centred on the last
coordinates; it is where the Hodge dual of a north-chart point lands.

Coordinates are flattened row-major, so entry ``(i, a)`` of ``B`` has flat
index ``i * p + a``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .exterior import COMPLEX, AntisymTensor, combinations_table
from .errors import InvalidArgument

NORTH = "north"
SOUTH = "south"


def lift(B: np.ndarray, pole: str = NORTH) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B))
    if pole == NORTH:
        return np.vstack([np.eye(B.shape[1], dtype=B.dtype), B])
    if pole == SOUTH:
        return np.vstack([B, np.eye(B.shape[1], dtype=B.dtype)])
    raise InvalidArgument(f"unknown pole {pole!r}")


def _chart_values(coeffs: np.ndarray, d: int, p: int, frames: np.ndarray) -> np.ndarray:
    """Normalized real-part score for every (coefficient row, frame) pair.

    ``coeffs`` is ``(n_tensors, C(d,p))`` and ``frames`` is ``(n_frames, d, p)``.
    """
    combos = combinations_table(d, p)
    minors = np.linalg.det(frames[:, combos])  # (n_frames, C)
    gram = np.linalg.det(np.conj(np.swapaxes(frames, 1, 2)) @ frames).real
    raw = np.conj(coeffs) @ minors.T  # (n_tensors, n_frames)
    return raw.real / np.sqrt(gram) / math.sqrt(p * (d - p))


def chart_score(T: AntisymTensor, B, pole: str = NORTH) -> float:
    """Normalized score of the chart point ``B`` with its sign/phase kept.

    Real field: the signed value ``<T, B~> / sqrt(det(B~^T B~) p (d-p))``.
    Complex field: its real part.
    """
    frame = lift(B, pole)
    if frame.shape != (T.d, T.p):
        raise InvalidArgument(f"chart point lifts to {frame.shape}, tensor needs {(T.d, T.p)}")
    return float(_chart_values(T.coeffs[None, :], T.d, T.p, frame[None])[0, 0])


@lru_cache(maxsize=16)
def _gradient_stencil(d: int, p: int, step: float) -> np.ndarray:
    n = (d - p) * p
    frames = np.zeros((2 * n, d, p))
    frames[:, :p, :] = np.eye(p)
    for k in range(n):
        i, a = divmod(k, p)
        frames[2 * k, p + i, a] = step
        frames[2 * k + 1, p + i, a] = -step
    return frames


@lru_cache(maxsize=16)
def _hessian_stencil(d: int, p: int, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Frames for the central-difference Hessian at ``B = 0`` plus their index map.

    Returns ``(frames, layout)`` where ``layout[k, l]`` lists the four frame
    indices ``(++, +-, -+, --)`` used for entry ``(k, l)``; on the diagonal the
    pattern is ``(+2, 0, 0, -2)`` with ``0`` the centre point.
    """
    n = (d - p) * p
    coords = [divmod(k, p) for k in range(n)]
    points = {(): 0}
    frames = [np.zeros(n)]

    def point(offsets):
        key = tuple(sorted(offsets.items()))
        if key not in points:
            v = np.zeros(n)
            for idx, val in offsets.items():
                v[idx] = val
            points[key] = len(frames)
            frames.append(v)
        return points[key]

    layout = np.zeros((n, n, 4), dtype=np.intp)
    for k in range(n):
        for l in range(n):
            if k == l:
                layout[k, k] = (point({k: 2 * step}), 0, 0, point({k: -2 * step}))
            else:
                layout[k, l] = (point({k: step, l: step}), point({k: step, l: -step}),
                                point({k: -step, l: step}), point({k: -step, l: -step}))
    flat = np.array(frames)
    lifted = np.zeros((len(flat), d, p))
    lifted[:, :p, :] = np.eye(p)
    for k, (i, a) in enumerate(coords):
        lifted[:, p + i, a] = flat[:, k]
    return lifted, layout


def _as_coeff_stack(T_or_coeffs, d, p):
    if isinstance(T_or_coeffs, AntisymTensor):
        return T_or_coeffs.coeffs[None, :], T_or_coeffs.d, T_or_coeffs.p, True
    c = np.atleast_2d(np.asarray(T_or_coeffs))
    if d is None or p is None:
        raise InvalidArgument("d and p are required with a raw coefficient stack")
    return c, d, p, False


def chart_gradient_fd(T, step: float = 1e-6, *, d: int | None = None, p: int | None = None) -> np.ndarray:
    """Central-difference gradient of :func:`chart_score` at ``B = 0``.

    Accepts a tensor (returns shape ``(n,)``) or a stack of coefficient rows with
    explicit ``d, p`` (returns ``(n_tensors, n)``), ``n = p (d - p)``.
    """
    coeffs, d, p, single = _as_coeff_stack(T, d, p)
    vals = _chart_values(coeffs, d, p, _gradient_stencil(d, p, float(step)))
    grad = (vals[:, 0::2] - vals[:, 1::2]) / (2 * step)
    return grad[0] if single else grad


def chart_hessian_fd(T, step: float = 1e-4, *, d: int | None = None, p: int | None = None) -> np.ndarray:
    """Central-difference Hessian of :func:`chart_score` at ``B = 0``.

    Same calling conventions as :func:`chart_gradient_fd`; output is ``(n, n)``
    or ``(n_tensors, n, n)``.
    """
    if step <= 0:
        raise InvalidArgument("step must be positive")
    coeffs, d, p, single = _as_coeff_stack(T, d, p)
    frames, layout = _hessian_stencil(d, p, float(step))
    vals = _chart_values(coeffs, d, p, frames)
    v = vals[:, layout]  # (n_tensors, n, n, 4)
    hess = (v[..., 0] - v[..., 1] - v[..., 2] + v[..., 3]) / (4 * step * step)
    return hess[0] if single else hess


# --------------------------------------------------------------------------
# closed-form covariances of the Gaussian field (used as oracles)


def expected_score_covariance(X: np.ndarray, Y: np.ndarray, field: str = "real") -> float:
    """``E[f(X) f(Y)]`` for chart points ``X, Y`` over unit-variance Gaussian tensors.

    Real: ``det(X~^T Y~) / sqrt(det(X~^T X~) det(Y~^T Y~)) / (p (d - p))``.
    Complex (real parts): half of the real part of the same expression.
    """
    Xt, Yt = lift(X), lift(Y)
    d, p = Xt.shape
    num = np.linalg.det(np.conj(Xt).T @ Yt)
    den = math.sqrt(np.linalg.det(np.conj(Xt).T @ Xt).real * np.linalg.det(np.conj(Yt).T @ Yt).real)
    val = num / den / (p * (d - p))
    return float(0.5 * val.real) if field == COMPLEX else float(val.real)


def expected_gradient_covariance(d: int, p: int) -> np.ndarray:
    n = p * (d - p)
    return np.eye(n) / n


def expected_hessian_covariance(d: int, p: int) -> np.ndarray:
    """``E[H_{(i,a),(j,b)} H_{(k,c),(l,e)}]`` at ``B = 0`` for a real tensor.

    Returned with shape ``(n, n, n, n)`` on flat indices ``(i a), (j b), (k c), (l e)``.
    """
    m = d - p
    n = m * p
    dr = np.eye(m)
    dc = np.eye(p)
    # axes: i a j b k c l e
    t = (np.einsum("ac,be,ik,jl->iajbkcle", dc, dc, dr, dr)
         + np.einsum("ae,bc,il,jk->iajbkcle", dc, dc, dr, dr)
         - np.einsum("ac,be,il,jk->iajbkcle", dc, dc, dr, dr)
         - np.einsum("ae,bc,ik,jl->iajbkcle", dc, dc, dr, dr)
         + np.einsum("ab,ce,ij,kl->iajbkcle", dc, dc, dr, dr))
    return t.reshape(n, n, n, n) / n
