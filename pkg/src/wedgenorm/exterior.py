"""Antisymmetric tensors stored by their sorted-index coefficients.

A tensor ``T`` in the p-th exterior power of K^d (K real or complex) is kept as
the vector of its entries ``c[rank(sigma)] = T[sigma]`` over strictly increasing
index tuples ``sigma``, in lexicographic order.  The full tensor has
``||T||_2^2 = p! * sum |c|^2``.

Index tuples are 1-based in the public tuple API (``rank_tuple``, ``entry``)
and 0-based in the array tables used internally.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .errors import DegenerateFrame, InvalidArgument
from .rng import make_rng

REAL = "real"
COMPLEX = "complex"
FIELDS = (REAL, COMPLEX)

DEGENERATE_GRAM_TOL = 1e-12
ORTHONORMAL_TOL = 1e-8


# --------------------------------------------------------------------------
# index bookkeeping


@lru_cache(maxsize=32)
def combinations_table(d: int, p: int) -> np.ndarray:
    """All sorted 0-based p-subsets of range(d), one per row, in rank order."""
    if not 0 <= p <= d:
        raise InvalidArgument(f"need 0 <= p <= d, got p={p}, d={d}")
    n = math.comb(d, p)
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(d), p)),
                       dtype=np.intp, count=n * p)
    table = flat.reshape(n, p)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=32)
def _binom_table(d: int) -> np.ndarray:
    n = np.arange(d + 1)
    out = np.zeros((d + 1, d + 1), dtype=np.int64)
    for k in range(d + 1):
        out[:, k] = [math.comb(int(m), k) for m in n]
    return out


def rank_tuple(t, d: int) -> int:
    """Lexicographic rank of the sorted 1-based tuple ``t`` among p-subsets of {1..d}."""
    t = tuple(int(x) for x in t)
    p = len(t)
    if any(a >= b for a, b in zip(t, t[1:])):
        raise InvalidArgument(f"tuple {t} is not strictly increasing")
    if p and (t[0] < 1 or t[-1] > d):
        raise InvalidArgument(f"tuple {t} has entries outside [1, {d}]")
    r = 0
    prev = 0
    for k, v in enumerate(t, start=1):
        for skipped in range(prev + 1, v):
            r += math.comb(d - skipped, p - k)
        prev = v
    return r


def unrank_tuple(r: int, d: int, p: int) -> tuple[int, ...]:
    """Inverse of :func:`rank_tuple`."""
    total = math.comb(d, p)
    if not 0 <= r < total:
        raise InvalidArgument(f"rank {r} outside [0, {total})")
    out = []
    v = 1
    for k in range(p, 0, -1):
        while True:
            block = math.comb(d - v, k - 1)
            if r < block:
                break
            r -= block
            v += 1
        out.append(v)
        v += 1
    return tuple(out)


def rank_array(tuples: np.ndarray, d: int) -> np.ndarray:
    """Vectorised rank of 0-based sorted rows (shape ``(n, p)``)."""
    tuples = np.asarray(tuples, dtype=np.int64)
    n, p = tuples.shape
    binom = _binom_table(d)
    ranks = np.zeros(n, dtype=np.int64)
    prev = np.full(n, -1, dtype=np.int64)
    # sum_{v=prev+1}^{t-1} C(d-1-v, k') = C(d-1-prev, k'+1) - C(d-1-(t-1), k'+1) by hockey stick
    for k in range(p):
        rest = p - k - 1
        t = tuples[:, k]
        ranks += binom[d - 1 - prev, rest + 1] - binom[d - t, rest + 1]
        prev = t
    return ranks


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (0 if an entry repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    seen = [False] * len(seq)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# --------------------------------------------------------------------------
# the tensor type


@dataclass(frozen=True, eq=False)
class AntisymTensor:
    """Antisymmetric p-tensor on K^d given by its sorted-tuple coefficients."""

    d: int
    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.p <= self.d:
            raise InvalidArgument(f"need 1 <= p <= d, got p={self.p}, d={self.d}")
        c = np.array(self.coeffs)
        if c.dtype.kind == "c":
            c = c.astype(np.complex128)
        else:
            c = c.astype(np.float64)
        if c.shape != (math.comb(self.d, self.p),):
            raise InvalidArgument(f"expected {math.comb(self.d, self.p)} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def field(self) -> str:
        return COMPLEX if self.coeffs.dtype.kind == "c" else REAL

    @property
    def combos(self) -> np.ndarray:
        return combinations_table(self.d, self.p)

    @classmethod
    def zeros(cls, d: int, p: int, field: str = REAL) -> "AntisymTensor":
        dtype = np.complex128 if field == COMPLEX else np.float64
        return cls(d, p, np.zeros(math.comb(d, p), dtype=dtype))

    @classmethod
    def basis(cls, d: int, sigma, value=1.0) -> "AntisymTensor":
        """``value * e_sigma`` for a sorted 1-based tuple ``sigma``."""
        p = len(sigma)
        c = np.zeros(math.comb(d, p), dtype=np.result_type(value, np.float64))
        c[rank_tuple(sigma, d)] = value
        return cls(d, p, c)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "AntisymTensor":
        """Order-2 tensor from the upper triangle of a square matrix."""
        m = np.asarray(m)
        d = m.shape[0]
        iu = np.triu_indices(d, 1)
        return cls(d, 2, m[iu])

    def scaled(self, lam) -> "AntisymTensor":
        return AntisymTensor(self.d, self.p, self.coeffs * lam)

    def matrix(self) -> np.ndarray:
        """The d x d antisymmetric matrix M with M[i, j] = c_(i,j) for i < j (p = 2 only)."""
        if self.p != 2:
            raise InvalidArgument("matrix() needs p = 2")
        m = np.zeros((self.d, self.d), dtype=self.coeffs.dtype)
        iu = np.triu_indices(self.d, 1)
        m[iu] = self.coeffs
        return m - m.T

    @cached_property
    def dense(self) -> np.ndarray:
        """Full d^p array; memory grows as d**p, so use only for moderate sizes."""
        full = np.zeros((self.d,) * self.p, dtype=self.coeffs.dtype)
        combos = self.combos
        for perm in itertools.permutations(range(self.p)):
            full[tuple(combos[:, perm].T)] = permutation_sign(perm) * self.coeffs
        full.setflags(write=False)
        return full


# --------------------------------------------------------------------------
# construction and basic quantities


def entry(T: AntisymTensor, idx) -> complex | float:
    """Full-tensor entry at an arbitrary 1-based index tuple."""
    idx = tuple(int(i) for i in idx)
    if len(idx) != T.p:
        raise InvalidArgument(f"expected {T.p} indices, got {len(idx)}")
    if any(i < 1 or i > T.d for i in idx):
        raise InvalidArgument(f"index tuple {idx} outside [1, {T.d}]")
    sign = permutation_sign(idx)
    if sign == 0:
        return T.coeffs.dtype.type(0)
    return sign * T.coeffs[rank_tuple(sorted(idx), T.d)]


def sample_gaussian(d: int, p: int, field: str = REAL, rng_seed=None) -> AntisymTensor:
    """Gaussian tensor with independent coefficients of unit mean square.

    Real: N(0, 1).  Complex: real and imaginary parts each N(0, 1/2).
    """
    if p > d or p < 1:
        raise InvalidArgument(f"need 1 <= p <= d, got p={p}, d={d}")
    if field not in FIELDS:
        raise InvalidArgument(f"unknown field {field!r}")
    rng = make_rng(rng_seed)
    n = math.comb(d, p)
    if field == REAL:
        c = rng.standard_normal(n)
    else:
        c = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return AntisymTensor(d, p, c)


def hs_norm_sq(T: AntisymTensor) -> float:
    """Squared Hilbert-Schmidt norm of the full tensor, ``p! * sum |c|^2``."""
    return float(math.factorial(T.p) * np.sum(np.abs(T.coeffs) ** 2))


@lru_cache(maxsize=32)
def _hodge_plan(d: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    combos = combinations_table(d, p)
    member = np.zeros((len(combos), d), dtype=bool)
    member[np.arange(len(combos))[:, None], combos] = True
    complements = np.nonzero(~member)[1].reshape(len(combos), d - p)
    target = rank_array(complements, d) if d > p else np.zeros(len(combos), dtype=np.int64)
    # sign of (sigma, sorted complement): count pairs (s in sigma, c in complement) with s > c
    inversions = (combos[:, :, None] > complements[:, None, :]).sum(axis=(1, 2))
    signs = np.where(inversions % 2 == 0, 1.0, -1.0)
    return target, signs


def hodge(T: AntisymTensor) -> AntisymTensor:
    """Hodge dual: ``e_sigma -> e_{sigma^c}`` with ``(sigma, sigma^c)`` an even arrangement.

    The output coefficient on the sorted complement is ``sign(sigma, sorted(sigma^c)) * c_sigma``.
    Applying it twice multiplies by ``(-1)**(p * (d - p))``.
    """
    if T.p == T.d:
        raise InvalidArgument("the dual of a top-degree tensor is a scalar")
    target, signs = _hodge_plan(T.d, T.p)
    out = np.zeros(math.comb(T.d, T.d - T.p), dtype=T.coeffs.dtype)
    out[target] = signs * T.coeffs
    return AntisymTensor(T.d, T.d - T.p, out)


def rotate(T: AntisymTensor, Q: np.ndarray) -> AntisymTensor:
    """Apply ``Q`` to every tensor factor, ``T -> Q^{(x)p} T`` (dense, moderate d only)."""
    Q = np.asarray(Q)
    F = np.asarray(T.dense, dtype=np.result_type(T.coeffs, Q))
    for _ in range(T.p):
        F = np.tensordot(F, Q, axes=([0], [1]))
    coeffs = F[tuple(T.combos.T)]
    if T.field == REAL and np.iscomplexobj(coeffs):
        coeffs = coeffs.astype(np.complex128)
    return AntisymTensor(T.d, T.p, coeffs)


# --------------------------------------------------------------------------
# pairing with simple wedges and the score


def _check_frame(T: AntisymTensor, X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape != (T.d, T.p):
        raise InvalidArgument(f"frame must have shape {(T.d, T.p)}, got {X.shape}")
    return X


def frame_minors(X: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Determinants of the p x p row-submatrices ``X[sigma, :]`` for every row of ``combos``."""
    return np.linalg.det(X[combos])


def pairing(T: AntisymTensor, X) -> complex | float:
    """``<T, x_1 ^ ... ^ x_p> = sum_sigma conj(c_sigma) * det(X[sigma, :])``."""
    X = _check_frame(T, X)
    return np.vdot(T.coeffs, frame_minors(X, T.combos))[()]


def gram_det(X: np.ndarray) -> float:
    return float(np.real(np.linalg.det(np.conj(X).T @ X)))


def score(T: AntisymTensor, X, tol: float = DEGENERATE_GRAM_TOL) -> float:
    """``|<T, x_1 ^ ... ^ x_p>| / sqrt(det(X^H X))``; its maximum is the injective norm."""
    X = _check_frame(T, X)
    g = gram_det(X)
    if g < tol:
        raise DegenerateFrame(f"Gram determinant {g:.3e} below {tol:.1e}")
    return float(abs(pairing(T, X)) / math.sqrt(g))


def normalized_score(T: AntisymTensor, X, tol: float = DEGENERATE_GRAM_TOL) -> float:
    return score(T, X, tol) / math.sqrt(T.p * (T.d - T.p))


def _cofactors(blocks: np.ndarray) -> np.ndarray:
    """Cofactor matrices of a stack of p x p matrices (shape ``(n, p, p)``)."""
    n, p, _ = blocks.shape
    if p == 1:
        return np.ones_like(blocks)
    out = np.empty_like(blocks)
    rows = np.arange(p)
    for k in range(p):
        keep_r = rows[rows != k]
        for a in range(p):
            keep_c = rows[rows != a]
            sub = blocks[:, keep_r][:, :, keep_c]
            out[:, k, a] = (-1) ** (k + a) * np.linalg.det(sub)
    return out


def pairing_gradient(T: AntisymTensor, X) -> np.ndarray:
    """Holomorphic derivative ``dP/dX[r, a]`` of the pairing, by cofactor expansion."""
    X = _check_frame(T, X)
    combos = T.combos
    cof = _cofactors(X[combos])
    weights = np.conj(T.coeffs)
    grad = np.zeros((T.d, T.p), dtype=np.result_type(weights, X))
    for k in range(T.p):
        contrib = weights[:, None] * cof[:, k, :]
        for a in range(T.p):
            grad[:, a] += np.bincount(combos[:, k], weights=contrib[:, a].real, minlength=T.d)
            if np.iscomplexobj(contrib):
                grad[:, a] += 1j * np.bincount(combos[:, k], weights=contrib[:, a].imag, minlength=T.d)
    return grad


def score_gradient(T: AntisymTensor, X, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    """Euclidean gradient of ``Re(exp(-i theta) <T, X>)`` at an orthonormal frame.

    ``theta`` is the phase of the pairing at ``X`` (0 or pi in the real case),
    so the objective equals ``|<T, X>|`` at ``X``.  For complex frames the
    result is ``d/dRe(X) + i d/dIm(X)``.
    """
    X = _check_frame(T, X)
    dev = np.abs(np.conj(X).T @ X - np.eye(T.p)).max()
    if dev > tol:
        raise InvalidArgument(f"frame is not orthonormal (deviation {dev:.2e} > {tol:.0e})")
    value = pairing(T, X)
    phase = value / abs(value) if value != 0 else 1.0
    return np.conj(np.conj(phase) * pairing_gradient(T, X))


def gme(inj_norm_of_normalized_state: float) -> float:
    """Geometric measure of entanglement ``-2 log ||psi||_inj``."""
    x = float(inj_norm_of_normalized_state)
    if not 0.0 < x <= 1.0 + 1e-9:
        raise InvalidArgument(f"injective norm of a unit state must lie in (0, 1], got {x}")
    return -2.0 * math.log(x)


# --------------------------------------------------------------------------
# serialization


def save_tensor(T: AntisymTensor, path) -> None:
    """Write ``T`` as CSV (or ``.npz`` when the suffix says so).

    CSV layout: a ``d,p,field`` header row and its values, then ``rank,re,im``
    rows in rank order.
    """
    path = Path(path)
    if path.suffix == ".npz":
        np.savez(path, d=T.d, p=T.p, field=T.field, coeffs=T.coeffs)
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "p", "field"])
        w.writerow([T.d, T.p, T.field])
        w.writerow(["rank", "re", "im"])
        c = T.coeffs.astype(np.complex128)
        for r, v in enumerate(c):
            w.writerow([r, repr(float(v.real)), repr(float(v.imag))])


def load_tensor(path) -> AntisymTensor:
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as z:
            return AntisymTensor(int(z["d"]), int(z["p"]), z["coeffs"])
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["d", "p", "field"] or rows[2] != ["rank", "re", "im"]:
        raise InvalidArgument(f"{path}: not a tensor dump")
    d, p, field = int(rows[1][0]), int(rows[1][1]), rows[1][2]
    body = np.array([[float(r[1]), float(r[2])] for r in rows[3:]])
    coeffs = body[:, 0] + 1j * body[:, 1] if field == COMPLEX else body[:, 0]
    return AntisymTensor(d, p, coeffs)
