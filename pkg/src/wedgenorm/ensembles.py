"""Block Gaussian ensembles with zeroed diagonal blocks.

An ``N x N`` matrix with ``N = p * m`` is viewed as a ``p x p`` grid of
``m x m`` blocks.  ``bhgoe`` is a GOE matrix with the diagonal blocks removed;
``bhgae`` antisymmetrizes each block via the partial transpose, which is the
Hessian law of the random score on the Grassmannian; ``cbhgae`` is the real
``2N x 2N`` form ``[[A, B], [B, -A]]`` of the complex case.

With entry variance ``1/(p m)`` (real) or ``1/(2 p m)`` (complex form) the
spectrum converges to the semicircle of radius ``2 sqrt((p-1)/p)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .asymptotics import semicircle_radius
from .errors import InvalidArgument
from .rng import make_rng

BHGOE = "BHGOE"
BHGAE = "BHGAE"
CBHGAE = "cBHGAE"
KINDS = (BHGOE, BHGAE, CBHGAE)

HIST_BINS = 100
HIST_RANGE = (-2.5, 2.5)


@dataclass(frozen=True)
class EnsembleMatrix:
    kind: str
    p: int
    m: int
    sigma_sq: float
    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def blocks(self) -> np.ndarray:
        """View as ``(nb, m, nb, m)``; ``nb = 2p`` for the complex form."""
        nb = self.n // self.m
        return self.data.reshape(nb, self.m, nb, self.m)

    def check(self) -> None:
        """Raise ``AssertionError`` if a structural invariant fails."""
        M = self.data
        assert np.array_equal(M, M.T), "not symmetric"
        if self.kind == CBHGAE:
            N = self.p * self.m
            A, B = M[:N, :N], M[:N, N:]
            assert np.array_equal(M[N:, N:], -A) and np.array_equal(M[N:, :N], B)
            parts = [A, B]
        else:
            parts = [M]
        for part in parts:
            blk = part.reshape(self.p, self.m, self.p, self.m)
            for i in range(self.p):
                assert not np.any(blk[i, :, i, :]), "nonzero diagonal block"
            if self.kind != BHGOE:
                assert np.array_equal(blk, -blk.transpose(0, 3, 2, 1)), "blocks not skew"


def default_sigma_sq(kind: str, p: int, m: int) -> float:
    return 1.0 / (2 * p * m) if kind == CBHGAE else 1.0 / (p * m)


def _check_pm(m, p):
    if m < 1 or p < 1:
        raise InvalidArgument("need m, p >= 1")


def _bhgoe_data(m, p, sigma_sq, rng):
    n = p * m
    G = rng.standard_normal((n, n)) * math.sqrt(sigma_sq)
    A = np.triu(G, 1)
    A = A + A.T
    blk = A.reshape(p, m, p, m)
    for i in range(p):
        blk[i, :, i, :] = 0.0
    return A


def _partial_transpose_data(M, m):
    nb = M.shape[0] // m
    return M.reshape(nb, m, nb, m).transpose(0, 3, 2, 1).reshape(M.shape)


def sample_bhgoe(m: int, p: int, sigma_sq: float | None = None, seed=None) -> EnsembleMatrix:
    _check_pm(m, p)
    s2 = default_sigma_sq(BHGOE, p, m) if sigma_sq is None else sigma_sq
    return EnsembleMatrix(BHGOE, p, m, s2, _bhgoe_data(m, p, s2, make_rng(seed)))


def partial_transpose(M: EnsembleMatrix) -> EnsembleMatrix:
    """Transpose every ``m x m`` block in place of the block grid."""
    return EnsembleMatrix(M.kind, M.p, M.m, M.sigma_sq, _partial_transpose_data(M.data, M.m))


def _bhgae_data(m, p, sigma_sq, rng):
    A = _bhgoe_data(m, p, sigma_sq, rng)
    return (A - _partial_transpose_data(A, m)) / math.sqrt(2)


def sample_bhgae(m: int, p: int, sigma_sq: float | None = None, seed=None) -> EnsembleMatrix:
    _check_pm(m, p)
    s2 = default_sigma_sq(BHGAE, p, m) if sigma_sq is None else sigma_sq
    return EnsembleMatrix(BHGAE, p, m, s2, _bhgae_data(m, p, s2, make_rng(seed)))


def sample_cbhgae(m: int, p: int, sigma_sq: float | None = None, seed=None) -> EnsembleMatrix:
    _check_pm(m, p)
    s2 = default_sigma_sq(CBHGAE, p, m) if sigma_sq is None else sigma_sq
    rng = make_rng(seed)
    A = _bhgae_data(m, p, s2, rng)
    B = _bhgae_data(m, p, s2, rng)
    return EnsembleMatrix(CBHGAE, p, m, s2, np.block([[A, B], [B, -A]]))


def sample(kind: str, m: int, p: int, sigma_sq: float | None = None, seed=None) -> EnsembleMatrix:
    samplers = {BHGOE: sample_bhgoe, BHGAE: sample_bhgae, CBHGAE: sample_cbhgae}
    if kind not in samplers:
        raise InvalidArgument(f"unknown ensemble {kind!r}")
    return samplers[kind](m, p, sigma_sq, seed)


def spectrum(M) -> np.ndarray:
    data = M.data if isinstance(M, EnsembleMatrix) else np.asarray(M)
    return np.linalg.eigvalsh(data)


def operator_norm(M) -> float:
    ev = spectrum(M)
    return float(max(abs(ev[0]), abs(ev[-1]))) if ev.size else 0.0


# --------------------------------------------------------------------------
# limiting law


def rho_p(x, p: int):
    """Semicircle density of radius ``2 sqrt((p-1)/p)``."""
    if p < 2:
        raise InvalidArgument("rho_p needs p >= 2")
    r2 = (p - 1) / p
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.maximum(4 * r2 - x * x, 0.0)) / (2 * math.pi * r2)
    return float(out) if out.ndim == 0 else out


def semicircle_cdf(x, p: int):
    R = semicircle_radius(p)
    t = np.clip(np.asarray(x, dtype=float) / R, -1.0, 1.0)
    out = 0.5 + (t * np.sqrt(1 - t * t) + np.arcsin(t)) / math.pi
    return float(out) if out.ndim == 0 else out


def stieltjes_m_p(z, p: int) -> complex:
    """``int rho_p(x) / (x - z) dx`` (so ``m ~ -1/z`` at infinity).

    Defined for ``Im z > 0`` and for real ``z`` outside the support; a real
    ``z`` inside the support is ambiguous between the two boundary values.
    """
    if p < 2:
        raise InvalidArgument("stieltjes_m_p needs p >= 2")
    z = complex(z)
    r2 = (p - 1) / p
    edge = 2 * math.sqrt(r2)
    if z.imag == 0 and abs(z.real) <= edge:
        raise InvalidArgument(f"z={z.real} lies on the support [-{edge:.6g}, {edge:.6g}]")
    if z.imag < 0:
        return stieltjes_m_p(z.conjugate(), p).conjugate()
    root = np.sqrt(z - edge) * np.sqrt(z + edge)
    return complex((-z + root) / (2 * r2))


def mde_residual(z, p: int) -> float:
    """``|1 + (z + ((p-1)/p) m) m|`` at ``m = stieltjes_m_p(z, p)``."""
    m = stieltjes_m_p(z, p)
    return abs(1 + (z + (p - 1) / p * m) * m)


def histogram(eigs, p: int, bins: int = HIST_BINS, lim=HIST_RANGE):
    """Empirical density and bin-averaged limiting density on a fixed grid."""
    edges = np.linspace(lim[0], lim[1], bins + 1)
    emp, _ = np.histogram(eigs, bins=edges, density=False)
    width = np.diff(edges)
    emp = emp / (len(eigs) * width)
    theory = np.diff(semicircle_cdf(edges, p)) / width
    return edges, emp, theory


def spectral_distance(M, p: int | None = None) -> float:
    """L1 distance between the eigenvalue histogram and the limiting density."""
    if isinstance(M, EnsembleMatrix):
        p = M.p if p is None else p
    if p is None:
        raise InvalidArgument("p is required for a raw matrix")
    edges, emp, theory = histogram(spectrum(M), p)
    return float(np.sum(np.abs(emp - theory) * np.diff(edges)))


def mean_abs_det(u: float, m: int, p: int, field: str = "real", n_samples: int = 10, seed=None) -> float:
    """``(1/N) log`` of the sample mean of ``|det(u - W)|`` over block-antisymmetric ``W``."""
    if n_samples < 1:
        raise InvalidArgument("n_samples must be >= 1")
    kind = CBHGAE if field == "complex" else BHGAE
    logdets = np.empty(n_samples)
    n = None
    for k in range(n_samples):
        W = sample(kind, m, p, seed=make_rng(seed, k))
        ev = spectrum(W)
        n = ev.size
        with np.errstate(divide="ignore"):
            logdets[k] = np.sum(np.log(np.abs(u - ev)))
    return float((logsumexp(logdets) - math.log(n_samples)) / n)


# --------------------------------------------------------------------------
# dumps


def write_spectrum_csv(path, eigs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "eigenvalue"])
        for i, v in enumerate(eigs):
            w.writerow([i, f"{v:.12g}"])


def write_histogram_csv(path, edges, emp, theory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "emp_density", "theory_density"])
        for lo, hi, e, t in zip(edges[:-1], edges[1:], emp, theory):
            w.writerow([f"{lo:.6g}", f"{hi:.6g}", f"{e:.10g}", f"{t:.10g}"])
