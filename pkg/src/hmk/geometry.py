"""Chordal Grassmannian distance between bases and random-basis statistics.

A basis maps to the (N-1)-plane spanned by the Bloch vectors of its
elements.  The squared chordal distance between two such planes depends
only on the overlaps |<e_a|f_b>|^2 and equals 1 exactly for unbiased bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import BasisMatrix, MatrixLike, as_array, identity


def _overlap_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # |a^dagger b|^2; the product order makes the result for (b, a) the exact transpose
    o = (a.conj()[:, :, None] * b[:, None, :]).sum(axis=0)
    return o.real * o.real + o.imag * o.imag


def chordal_distance_sq(b1: MatrixLike, b2: MatrixLike) -> float:
    a, b = as_array(b1), as_array(b2)
    if a.shape != b.shape:
        raise ValueError("bases must have equal dimension")
    n = a.shape[0]
    # averaging both product orders makes the overlap table exactly swap-symmetric,
    # and fsum is exactly rounded, so the argument order cannot matter
    s = 0.5 * (_overlap_sq(a, b) + _overlap_sq(b, a).T)
    dev = s - 1.0 / n
    d = 1.0 - math.fsum((dev * dev).ravel().tolist()) / (n - 1)
    return min(1.0, max(0.0, d))


@lru_cache(maxsize=None)
def gell_mann(n: int) -> np.ndarray:
    """Generalized Gell-Mann matrices, shape (n*n-1, n, n), with Tr(l_i l_j) = 2 delta_ij."""
    mats = []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), complex)
            s[j, k] = s[k, j] = 1
            mats.append(s)
            a = np.zeros((n, n), complex)
            a[j, k], a[k, j] = -1j, 1j
            mats.append(a)
    for l in range(1, n):
        d = np.zeros((n, n), complex)
        d[np.arange(l), np.arange(l)] = 1
        d[l, l] = -l
        mats.append(d * math.sqrt(2 / (l * (l + 1))))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def bloch_vectors(basis: MatrixLike) -> np.ndarray:
    """Columns are the real unit Bloch vectors of the basis elements, shape (n*n-1, n)."""
    a = as_array(basis)
    n = a.shape[0]
    lam = gell_mann(n)
    # (1/2) Tr(e lambda_i) with e = sqrt(2n/(n-1)) (|v><v| - 1/n); the identity part is traceless against lambda
    expect = np.einsum("ja,ijk,ka->ia", a.conj(), lam, a).real
    return math.sqrt(2 * n / (n - 1)) * 0.5 * expect


@dataclass(frozen=True)
class GrassmannFrame:
    frame: np.ndarray
    projector: np.ndarray

    @property
    def embedding_dimension(self) -> int:
        n2 = self.frame.shape[0] + 1
        return (n2 * n2 - n2 - 2) // 2


def grassmann_frame(basis: MatrixLike) -> GrassmannFrame:
    a = as_array(basis)
    n = a.shape[0]
    B = math.sqrt((n - 1) / n) * bloch_vectors(a)
    return GrassmannFrame(B, B @ B.T)


def chordal_distance_via_projectors(b1: MatrixLike, b2: MatrixLike) -> float:
    p1, p2 = grassmann_frame(b1).projector, grassmann_frame(b2).projector
    n = as_array(b1).shape[0]
    d = p1 - p2
    return float(np.trace(d @ d)) / (2 * (n - 1))


def principal_angles(b1: MatrixLike, b2: MatrixLike) -> np.ndarray:
    """The n-1 principal angles between the two Bloch planes."""
    n = as_array(b1).shape[0]
    q = []
    for b in (b1, b2):
        u, s, _ = np.linalg.svd(grassmann_frame(b).frame, full_matrices=False)
        q.append(u[:, : n - 1])
    sv = np.linalg.svd(q[0].T @ q[1], compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


def chordal_distance_from_angles(angles: np.ndarray) -> float:
    return float(np.mean(np.sin(angles) ** 2))


def distance_table(bases: Sequence[MatrixLike]) -> np.ndarray:
    k = len(bases)
    t = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            t[i, j] = t[j, i] = chordal_distance_sq(bases[i], bases[j])
    return t


def mub_quality_f(bases: Sequence[MatrixLike]) -> float:
    """Sum of squared chordal distances over ordered pairs of distinct bases."""
    if len(bases) < 2:
        raise ValueError("need at least two bases")
    t = distance_table(bases)
    return float(2 * t[np.triu_indices(len(bases), 1)].sum())


# --- random bases ----------------------------------------------------------------

def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar unitaries via QR of complex Ginibre matrices with phase fix."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def random_basis(n: int, seed) -> BasisMatrix:
    if n < 2:
        raise ValueError("dimension must be at least 2")
    rng = np.random.default_rng(seed)
    return BasisMatrix(haar_unitaries(n, 1, rng)[0], None, f"haar(seed={seed})")


def _dist_to_identity(u: np.ndarray) -> np.ndarray:
    n = u.shape[-1]
    dev = np.abs(u) ** 2 - 1.0 / n
    return 1.0 - (dev * dev).sum(axis=(-2, -1)) / (n - 1)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int
    expected: float

    def within(self, k: float = 4.0) -> bool:
        return abs(self.mean - self.expected) <= k * self.stderr

    def to_json(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "expected": self.expected,
                "z": (self.mean - self.expected) / self.stderr if self.stderr else 0.0}


def average_distance_estimate(n: int, samples: int, seed, batch: int = 20000) -> Estimate:
    """Monte-Carlo mean of D^2 between 1 and a Haar-random basis; expected n/(n+1)."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    vals = []
    left = samples
    while left:
        c = min(batch, left)
        vals.append(_dist_to_identity(haar_unitaries(n, c, rng)))
        left -= c
    v = np.concatenate(vals)
    return Estimate(float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)), samples, n / (n + 1))


def _pairwise_min(us: np.ndarray) -> np.ndarray:
    """us: (sets, k, n, n) -> min pairwise D^2 within each set."""
    s, k, n, _ = us.shape
    best = np.full(s, np.inf)
    for i in range(k):
        for j in range(i + 1, k):
            o = np.einsum("sab,sac->sbc", us[:, i].conj(), us[:, j])
            dev = o.real ** 2 + o.imag ** 2 - 1.0 / n
            best = np.minimum(best, 1.0 - (dev * dev).sum(axis=(1, 2)) / (n - 1))
    return best


def random_scan(n: int, total: int, k: int, seed, batch: int = 70000) -> dict:
    """Split ``total`` Haar bases into disjoint k-sets; best (largest) min pairwise D^2."""
    rng = np.random.default_rng(seed)
    sets = total // k
    best, done = -1.0, 0
    per = max(1, batch // k)
    while done < sets:
        c = min(per, sets - done)
        us = haar_unitaries(n, c * k, rng).reshape(c, k, n, n)
        best = max(best, float(_pairwise_min(us).max()))
        done += c
    return {"n": n, "bases": sets * k, "set_size": k, "sets": sets, "best_min_distance": best}
