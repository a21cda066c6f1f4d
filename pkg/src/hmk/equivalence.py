"""Dephasing, Hadamard equivalence with witnesses, and the Fourier-family fundamental region.

Two Hadamard matrices are equivalent when H1 = D1 P1 H2 P2 D2 for diagonal
unitaries D and permutations P.  Witnesses are stored entrywise:

    H1[i, j] = row_phases[i] * H2[row_permutation[i], col_permutation[j]] * col_phases[j]
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import (
    BasisMatrix,
    FloatPhase,
    MatrixLike,
    RationalRoot,
    SpecialProduct,
    as_array,
    divide,
    multiply,
)


def _unimodular(m: MatrixLike) -> np.ndarray:
    a = as_array(m)
    return a * math.sqrt(a.shape[0])


def _dephase_array(a: np.ndarray, r: int = 0, c: int = 0) -> np.ndarray:
    """Rephase rows and columns so that row r and column c become all ones (unimodular scale)."""
    u = a / np.abs(a)
    return u * u[r, c] / (u[:, c:c + 1] * u[r:r + 1, :])


def dephase(h: MatrixLike) -> BasisMatrix:
    """Rephase rows and columns so the first row and column are 1/sqrt(N)."""
    hm = h if isinstance(h, BasisMatrix) else BasisMatrix(as_array(h))
    n = hm.dimension
    out = _dephase_array(_unimodular(hm)) / math.sqrt(n)
    out[0, :] = 1 / math.sqrt(n)
    out[:, 0] = 1 / math.sqrt(n)
    exact = None
    if hm.exact_entries is not None:
        g = hm.exact_entries
        exact = [[divide(multiply(g[a][b], g[0][0]), multiply(g[a][0], g[0][b])) for b in range(n)]
                 for a in range(n)]
        if any(isinstance(p, FloatPhase) for row in exact for p in row):
            exact = None
    return BasisMatrix(out, exact, hm.label)


@dataclass(frozen=True)
class EquivalenceWitness:
    row_permutation: tuple
    col_permutation: tuple
    row_phases: tuple
    col_phases: tuple

    def apply(self, h2: MatrixLike) -> np.ndarray:
        a = as_array(h2)
        rp, cp = list(self.row_permutation), list(self.col_permutation)
        return np.asarray(self.row_phases)[:, None] * a[np.ix_(rp, cp)] * np.asarray(self.col_phases)[None, :]

    def residual(self, h1: MatrixLike, h2: MatrixLike) -> float:
        return float(np.max(np.abs(as_array(h1) - self.apply(h2))))

    def inverse(self) -> "EquivalenceWitness":
        rp, cp = np.argsort(self.row_permutation), np.argsort(self.col_permutation)
        rph = np.conj(np.asarray(self.row_phases))[rp]
        cph = np.conj(np.asarray(self.col_phases))[cp]
        return EquivalenceWitness(tuple(int(i) for i in rp), tuple(int(i) for i in cp),
                                  tuple(complex(z) for z in rph), tuple(complex(z) for z in cph))

    def to_json(self) -> dict:
        return {
            "row_permutation": list(self.row_permutation),
            "col_permutation": list(self.col_permutation),
            "row_phases_turns": [math.atan2(z.imag, z.real) / (2 * math.pi) for z in self.row_phases],
            "col_phases_turns": [math.atan2(z.imag, z.real) / (2 * math.pi) for z in self.col_phases],
        }


@dataclass(frozen=True)
class HaagerupInvariant:
    """Sorted multiset of H_ij H_kl conj(H_il) conj(H_kj), unimodular scale."""

    values: np.ndarray

    def matches(self, other: "HaagerupInvariant", atol: float = 1e-6) -> bool:
        if self.values.shape != other.values.shape:
            return False
        # sorted real and imaginary parts are stable under rounding noise
        a, b = self.values, other.values
        return bool(np.allclose(np.sort(a.real), np.sort(b.real), atol=atol, rtol=0)
                    and np.allclose(np.sort(a.imag), np.sort(b.imag), atol=atol, rtol=0))

    def __eq__(self, other):
        return isinstance(other, HaagerupInvariant) and self.matches(other)

    __hash__ = None


def haagerup_invariant(h: MatrixLike) -> HaagerupInvariant:
    u = _unimodular(h)
    u = u / np.abs(u)
    # [i,j,k,l] -> H_ij H_kl conj(H_il) conj(H_kj)
    vals = (u[:, :, None, None] * u[None, None, :, :]
            * np.conj(u)[:, None, None, :] * np.conj(u).T[None, :, :, None])
    vals = np.round(vals.ravel(), 8) + 0.0
    order = np.lexsort((vals.imag, vals.real))
    return HaagerupInvariant(vals[order])


def _sorted_parts(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.sort(rows.real, axis=-1), np.sort(rows.imag, axis=-1)


def _perfect_matching(cand: np.ndarray) -> list[int] | None:
    n = cand.shape[0]
    match_r = [-1] * n

    def augment(j, seen):
        for k in np.flatnonzero(cand[j]):
            if not seen[k]:
                seen[k] = True
                if match_r[k] < 0 or augment(match_r[k], seen):
                    match_r[k] = j
                    return True
        return False

    for j in range(n):
        if not augment(j, [False] * n):
            return None
    out = [0] * n
    for k, j in enumerate(match_r):
        out[j] = k
    return out


def _witness_from_perms(a1: np.ndarray, a2: np.ndarray, rp, cp) -> EquivalenceWitness:
    m = a2[np.ix_(rp, cp)]
    col = a1[0, :] / m[0, :]
    row = a1[:, 0] / (m[:, 0] * col[0])
    return EquivalenceWitness(tuple(int(i) for i in rp), tuple(int(j) for j in cp),
                              tuple(complex(z) for z in row), tuple(complex(z) for z in col))


def are_equivalent(h1: MatrixLike, h2: MatrixLike, atol: float = 1e-8,
                   prefilter: bool = True) -> EquivalenceWitness | None:
    """Search for (D1, P1, P2, D2) with H1 = D1 P1 H2 P2 D2.

    Exhaustive over the (row, column) pivot used for dephasing H2 and over row
    assignments, pruned by row multisets and per-column consistency; the
    column permutation is recovered as a bipartite matching.  ``atol`` is
    the entrywise tolerance on the unimodular scale.
    """
    a1, a2 = as_array(h1), as_array(h2)
    if a1.shape != a2.shape:
        return None
    n = a1.shape[0]
    if prefilter and not haagerup_invariant(a1).matches(haagerup_invariant(a2), atol=max(1e-6, 10 * atol)):
        return None
    A = _dephase_array(a1 * math.sqrt(n))
    a_re, a_im = _sorted_parts(A)
    all_re, all_im = np.sort(A.real.ravel()), np.sort(A.imag.ravel())
    scale = math.sqrt(n)
    for r in range(n):
        for c in range(n):
            K = _dephase_array(a2 * scale, r, c)
            if not (np.allclose(np.sort(K.real.ravel()), all_re, atol=atol, rtol=0)
                    and np.allclose(np.sort(K.imag.ravel()), all_im, atol=atol, rtol=0)):
                continue
            k_re, k_im = _sorted_parts(K)
            compat = (np.all(np.abs(a_re[:, None, :] - k_re[None, :, :]) <= atol, axis=-1)
                      & np.all(np.abs(a_im[:, None, :] - k_im[None, :, :]) <= atol, axis=-1))
            close = [np.abs(A[i][:, None, None] - K[None, :, :]) <= atol for i in range(n)]  # [i][j, k, l]
            rows = [r]
            used = {r}
            cand0 = np.ones((n, n), dtype=bool)
            cand0[0, :] = False
            cand0[:, c] = False
            cand0[0, c] = True

            def extend(i, cand):
                if i == n:
                    cols = _perfect_matching(cand)
                    if cols is None:
                        return None
                    w = _witness_from_perms(a1, a2, rows, cols)
                    if w.residual(a1, a2) <= atol:
                        return w
                    return None
                for k in range(n):
                    if k in used or not compat[i, k]:
                        continue
                    nc = cand & close[i][:, k, :]
                    if not nc.any(axis=1).all():
                        continue
                    rows.append(k)
                    used.add(k)
                    w = extend(i + 1, nc)
                    rows.pop()
                    used.discard(k)
                    if w is not None:
                        return w
                return None

            w = extend(1, cand0)
            if w is not None:
                return w
    return None


def unordered_pair_equivalent(h1: MatrixLike, h2: MatrixLike, atol: float = 1e-8) -> bool:
    """Equivalence of the unordered MUB pairs {1, H1} and {1, H2}."""
    if are_equivalent(h1, h2, atol) is not None:
        return True
    return are_equivalent(h1, as_array(h2).conj().T, atol) is not None


# --- exact phase codes -------------------------------------------------------

@dataclass(frozen=True)
class PhaseCodes:
    """Entries as root exponents k (mod n) times special**e for one special constant."""

    k: np.ndarray
    e: np.ndarray
    n: int
    special: str | None = None


def phase_codes(h: BasisMatrix) -> PhaseCodes | None:
    """Integer codes of an exact grid, or None if the grid is not expressible."""
    if h.exact_entries is None:
        return None
    dens, base = [1], None
    for row in h.exact_entries:
        for p in row:
            if isinstance(p, FloatPhase):
                return None
            dens.append(p.root.denominator)
            if isinstance(p, SpecialProduct):
                b = p.constant.base
                if base not in (None, b):
                    return None
                base = b
    n = math.lcm(*dens)
    N = h.dimension
    k = np.zeros((N, N), dtype=np.int64)
    e = np.zeros((N, N), dtype=np.int64)
    for a, row in enumerate(h.exact_entries):
        for b, p in enumerate(row):
            k[a, b] = p.root.numerator * (n // p.root.denominator)
            if isinstance(p, SpecialProduct):
                e[a, b] = p.exponent
    return PhaseCodes(k, e, n, base)


def codes_from_float(h: MatrixLike, n: int, tol: float = 1e-9) -> PhaseCodes | None:
    """Read a matrix with entries in n-th roots (times 1/sqrt N) as codes."""
    u = _unimodular(h)
    k = np.rint(np.angle(u) / (2 * math.pi) * n).astype(np.int64) % n
    if np.max(np.abs(u - np.exp(2j * math.pi * k / n))) > tol:
        return None
    return PhaseCodes(k, np.zeros_like(k), n, None)


@lru_cache(maxsize=None)
def _row_orders(n: int) -> np.ndarray:
    """For each pivot row r, all orderings (r, others permuted)."""
    out = []
    for r in range(n):
        others = [i for i in range(n) if i != r]
        out.append([[r, *p] for p in itertools.permutations(others)])
    return np.array(out, dtype=np.int64)  # (n, (n-1)!, n)


def canonical_keys(k: np.ndarray, e: np.ndarray, n: int) -> list[tuple]:
    """Exact canonical form under D1 P1 . H . P2 D2 for a batch of code matrices.

    ``k`` and ``e`` have shape (B, N, N).  The key is the lexicographically
    least column-sorted matrix over every dephasing pivot and every ordering
    of the non-pivot rows; two exact matrices are equivalent iff their keys
    agree.
    """
    k = np.asarray(k, dtype=np.int64)
    e = np.asarray(e, dtype=np.int64)
    B, N, _ = k.shape
    # dephased codes for every pivot (r, c): [b, r, c, i, j]
    kk = k[:, None, None]  # b,1,1,i,j
    kd = (kk - k.transpose(0, 2, 1)[:, None, :, :, None] - k[:, :, None, None, :]
          + k[:, :, :, None, None]) % n
    ee = e[:, None, None]
    ed = ee - e.transpose(0, 2, 1)[:, None, :, :, None] - e[:, :, None, None, :] + e[:, :, :, None, None]
    emin = int(ed.min()) if ed.size else 0
    span = int(ed.max()) - emin + 1 if ed.size else 1
    codes = kd + n * (ed - emin)  # [b, r, c, i, j]
    base = n * span
    orders = _row_orders(N)  # (N, P, N)
    P = orders.shape[1]
    # gather rows: [b, r, c, p, i, j]
    g = np.empty((B, N, N, P, N - 1, N), dtype=np.int64)
    for r in range(N):
        g[:, r] = codes[:, r][:, :, orders[r][:, 1:], :]
    if base ** (N - 1) < 2 ** 62:
        weights = base ** np.arange(N - 2, -1, -1, dtype=np.int64)
        colcodes = np.einsum("brcpij,i->brcpj", g, weights)
        colcodes.sort(axis=-1)
        flat = colcodes.reshape(B, N * N * P, N)
        keys = []
        for b in range(B):
            m = flat[b]
            idx = np.lexsort(m.T[::-1])[0]
            keys.append((n, emin, span) + tuple(int(x) for x in m[idx]))
        return keys
    keys = []
    for b in range(B):
        best = None
        for r in range(N):
            for c in range(N):
                for p in range(P):
                    mat = g[b, r, c, p]
                    cand = tuple(sorted(tuple(int(v) for v in mat[:, j]) for j in range(N)))
                    if best is None or cand < best:
                        best = cand
        keys.append((n, emin, span) + best)
    return keys


def canonical_key(codes: PhaseCodes) -> tuple:
    return canonical_keys(codes.k[None], codes.e[None], codes.n)[0]


# --- Fourier family fundamental region ----------------------------------------

def _as_turn(x):
    if isinstance(x, float):
        return x % 1.0
    return Fraction(x) % 1


def _fourier_generators():
    s6 = Fraction(1, 6)
    return (
        lambda a, b: (a + 2 * s6, b + s6),
        lambda a, b: (a + s6, b + 2 * s6),
        lambda a, b: (b, a),
        lambda a, b: (-a, -b),
        lambda a, b: (b - a, -a),
    )


def _norm_point(p, exact):
    if exact:
        return (p[0] % 1, p[1] % 1)
    # canonical float rounding so orbit points merge
    return (round(p[0] % 1.0, 12) % 1.0, round(p[1] % 1.0, 12) % 1.0)


def _orbit_exact(start) -> set:
    gens = _fourier_generators()
    seen = {start}
    todo = [start]
    while todo:
        p = todo.pop()
        for g in gens:
            q = _norm_point(g(*p), True)
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def _affine_maps() -> list:
    """Group elements as (M, t): p -> M p + t, enumerated exactly.

    Floats are pushed through these maps directly; iterating the generators on
    a float point would let rounding drift grow the orbit without bound.
    """
    s6 = Fraction(1, 6)
    gens = (
        ((1, 0, 0, 1), (2 * s6, s6)),
        ((1, 0, 0, 1), (s6, 2 * s6)),
        ((0, 1, 1, 0), (0, 0)),
        ((-1, 0, 0, -1), (0, 0)),
        ((-1, 1, -1, 0), (0, 0)),
    )

    def compose(g, h):  # g after h
        (a, b, c, d), (t1, t2) = g
        (e, f, k, l), (u1, u2) = h
        return ((a * e + b * k, a * f + b * l, c * e + d * k, c * f + d * l),
                ((a * u1 + b * u2 + t1) % 1, (c * u1 + d * u2 + t2) % 1))

    start = ((1, 0, 0, 1), (Fraction(0), Fraction(0)))
    seen = {start}
    todo = [start]
    while todo:
        h = todo.pop()
        for g in gens:
            q = compose(g, h)
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return sorted(seen)


def fourier_orbit(x1, x2) -> set:
    """Orbit of (x1, x2) under the group generated by the Fourier-family equivalences."""
    exact = not isinstance(x1, float) and not isinstance(x2, float)
    if exact:
        return _orbit_exact(_norm_point((_as_turn(x1), _as_turn(x2)), True))
    x1, x2 = float(x1), float(x2)
    return {_norm_point((a * x1 + b * x2 + float(t1), c * x1 + d * x2 + float(t2)), False)
            for (a, b, c, d), (t1, t2) in _affine_maps()}


def in_fundamental_triangle(x1, x2, eps: float = 1e-12) -> bool:
    """Closed triangle with corners (0,0), (1/6,0), (1/6,1/12)."""
    return -eps <= x2 <= x1 / 2 + eps and x1 <= Fraction(1, 6) + eps


def reduce_fourier_params(x1, x2):
    """Representative of F(x1, x2) inside the fundamental triangle."""
    orbit = fourier_orbit(x1, x2)
    inside = [p for p in orbit if in_fundamental_triangle(*p)]
    if not inside:
        # boundary points can sit a rounding step outside after reduction mod 1
        inside = [p for p in orbit if in_fundamental_triangle(*p, eps=1e-9)]
    return min(inside)
