"""Exhaustive MUB searches over finite phase alphabets.

Vectors have their first entry fixed to 1 (column-phase gauge).  The last
entry is solved in closed form from one unbiasedness constraint and looked up
in the alphabet, so a search over m symbols costs m**(N-2) prefix
evaluations instead of m**(N-1).  Orthonormal bases are the N-cliques of the
orthogonality graph; Hadamard matrices are the cliques through the all-ones
vector.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels as K
from .core import (
    DEFAULT_TOL,
    SPECIAL_SYMBOLS,
    BasisMatrix,
    HMKError,
    PhaseValue,
    RationalRoot,
    SpecialConstant,
    SpecialProduct,
    Tolerances,
    TurnFraction,
    as_array,
    identity,
    is_hadamard,
    root,
)
from .equivalence import canonical_keys, phase_codes

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


class SearchTooLarge(HMKError):
    pass


# --- alphabets -----------------------------------------------------------------

_PAIR = {"d": ("d", "dbar"), "b1": ("b1", "b1bar"), "b2": ("b2", "b2bar")}


@dataclass(frozen=True)
class SearchAlphabet:
    """All n-th roots of unity, optionally times each of a set of special constants.

    ``extras`` accepts symbols such as ``"d"`` and ``"dbar"``; a bare base name
    in :meth:`parse` expands to the conjugate pair.  Symbol 0 is always 1.
    """

    n: int
    extras: tuple = ()
    max_power: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("root order must be positive")
        if self.max_power < 1:
            raise ValueError("max_power must be positive")
        ex = tuple(self.extras)
        for s in ex:
            if s not in SPECIAL_SYMBOLS:
                raise ValueError(f"unknown extra {s!r}")
        if len(set(ex)) != len(ex):
            raise ValueError("duplicate extras")
        if len({SpecialConstant(s).base for s in ex}) > 1:
            raise ValueError("at most one special base per alphabet")
        object.__setattr__(self, "extras", ex)

    @classmethod
    def parse(cls, text: str) -> "SearchAlphabet":
        """'roots:12', 'roots:12,d', '24+b2', 'roots:12,d^2' (powers up to 2) ..."""
        t = text.strip().lower().replace("roots:", "").replace("+", ",")
        parts = [p.strip() for p in t.split(",") if p.strip()]
        try:
            n = int(parts[0])
        except (IndexError, ValueError):
            raise ValueError(f"bad alphabet {text!r}; expected e.g. 'roots:12,d'") from None
        extras: list[str] = []
        power = 1
        for p in parts[1:]:
            if "^" in p:
                p, pw = p.split("^", 1)
                power = max(power, int(pw))
            extras.extend(_PAIR.get(p, (p,)))
        return cls(n, tuple(dict.fromkeys(extras)), power)

    @property
    def special_base(self) -> str | None:
        return SpecialConstant(self.extras[0]).base if self.extras else None

    @cached_property
    def symbols(self) -> tuple:
        out: list[PhaseValue] = [root(k, self.n) for k in range(self.n)]
        for pw in range(1, self.max_power + 1):
            for s in self.extras:
                out.extend(SpecialProduct(SpecialConstant(s), TurnFraction(k, self.n), pw) for k in range(self.n))
        return tuple(out)

    @cached_property
    def values(self) -> np.ndarray:
        v = np.array([p.realize() for p in self.symbols])
        v.setflags(write=False)
        return v

    @cached_property
    def codes(self) -> tuple[np.ndarray, np.ndarray]:
        """(k mod n, special exponent) per symbol."""
        k = np.array([p.root.numerator * (self.n // p.root.denominator) for p in self.symbols], dtype=np.int64)
        e = np.zeros(len(self.symbols), dtype=np.int64)
        for i, p in enumerate(self.symbols):
            if isinstance(p, SpecialProduct):
                e[i] = p.exponent
        return k, e

    def __len__(self):
        return len(self.symbols)

    def describe(self) -> str:
        pw = f"^{self.max_power}" if self.max_power > 1 else ""
        return f"roots:{self.n}" + "".join("," + e + pw for e in self.extras)

    def check_distinct(self, tol: float = 1e-9) -> None:
        v = self.values
        d = np.abs(v[:, None] - v[None, :]) + np.eye(len(v)) * 10
        if d.min() <= tol:
            raise ValueError("alphabet symbols coincide numerically")


@dataclass(frozen=True)
class PhaseVector:
    alphabet: SearchAlphabet
    symbols: tuple

    @property
    def phases(self) -> list[PhaseValue]:
        return [self.alphabet.symbols[i] for i in self.symbols]

    @property
    def values(self) -> np.ndarray:
        return self.alphabet.values[list(self.symbols)]


@dataclass
class VectorSet:
    """Search output: symbol rows in lexicographic order."""

    alphabet: SearchAlphabet
    rows: np.ndarray
    evaluated: int = 0

    def __len__(self):
        return self.rows.shape[0]

    def __getitem__(self, i) -> PhaseVector:
        return PhaseVector(self.alphabet, tuple(int(x) for x in self.rows[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def values(self) -> np.ndarray:
        """Unimodular entries, shape (M, N)."""
        return self.alphabet.values[self.rows]

    @property
    def normalized(self) -> np.ndarray:
        return self.values / math.sqrt(self.rows.shape[1]) if len(self) else np.zeros((0, self.rows.shape[1]), complex)

    def subset(self, idx) -> "VectorSet":
        return VectorSet(self.alphabet, self.rows[np.asarray(idx, dtype=np.int64)], self.evaluated)


# --- constraint setup ----------------------------------------------------------

def _constraints(references: Sequence, N: int, orthogonal_to: Sequence = ()):
    """Rows of conj(reference columns) with targets |sum|^2 (1 unbiased, 0 orthogonal).

    Standard basis columns impose nothing on unimodular vectors and are dropped.
    """
    rows, targets = [], []
    for ref in references:
        a = as_array(ref)
        if a.shape != (N, N):
            raise ValueError("reference dimension mismatch")
        for j in range(N):
            col = a[:, j]
            if np.count_nonzero(np.abs(col) > 1e-12) == 1:
                continue
            rows.append(np.conj(col) / np.linalg.norm(col))
            targets.append(1.0)
    for v in orthogonal_to:
        v = np.asarray(v, dtype=complex)
        rows.append(np.conj(v) / np.linalg.norm(v))
        targets.append(0.0)
    W = np.array(rows, dtype=complex).reshape(len(rows), N)
    return np.ascontiguousarray(W), np.array(targets, dtype=float)


def _fingerprint(alphabet: SearchAlphabet, W, T, N, method) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([alphabet.describe(), N, method]).encode())
    h.update(np.round(W, 12).tobytes())
    h.update(T.tobytes())
    return h.hexdigest()[:16]


def _chunks(total: int, nchunks: int):
    nchunks = max(1, min(nchunks, total)) if total else 1
    edges = np.linspace(0, total, nchunks + 1).astype(np.int64)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(nchunks)]


def _run_chunk(kind, args, N, start, stop):
    cap = 1024
    while True:
        out = np.empty((cap, N), dtype=np.int64)
        if kind == "closed":
            cnt = K.scan_closed(*args[:6], N, start, stop, *args[6:], out)
        else:
            cnt = K.scan_brute(args[0], args[1], args[2], N, start, stop, args[3], out)
        if cnt >= 0:
            return out[:cnt].copy()
        cap *= 4


def enumerate_unbiased_vectors(references: Sequence, alphabet: SearchAlphabet, *, N: int | None = None,
                               orthogonal_to: Sequence = (), tol: Tolerances = DEFAULT_TOL,
                               budget: int = DEFAULT_BUDGET, workers: int = 1, method: str = "closed",
                               checkpoint=None, progress: bool = False) -> VectorSet:
    """All alphabet vectors (first entry 1) unbiased to every reference basis.

    ``orthogonal_to`` adds vectors the result must be orthogonal to.  The
    budget bounds the number of evaluated index tuples: m**(N-2) prefixes for
    the closed form, m**(N-1) for ``method="brute"``.  With ``checkpoint`` set
    to a file path, finished chunks are saved and a rerun resumes from them.
    """
    if N is None:
        N = as_array(references[0]).shape[0] if references else len(orthogonal_to[0])
    if N < 2:
        raise ValueError("dimension must be at least 2")
    if method not in ("closed", "brute"):
        raise ValueError(f"unknown method {method!r}")
    m = len(alphabet)
    W, T = _constraints(references, N, orthogonal_to)
    vals = np.ascontiguousarray(alphabet.values, dtype=complex)
    if W.shape[0] == 0:
        method = "brute"
    total = m ** (N - 1) if method == "brute" else m ** (N - 2)
    if total > budget:
        raise SearchTooLarge(f"{total} index tuples exceed the budget {budget}")
    utol = tol.unbiasedness_tolerance
    if method == "closed":
        angles = np.mod(np.angle(vals), 2 * math.pi)
        order = np.argsort(angles, kind="stable").astype(np.int64)
        piv = 0
        args = (vals, angles[order].copy(), order, W, T, piv, utol, 1e-6)
    elif method == "brute":
        args = (vals, W, T, utol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if W.shape[0] == 0:
        rows = np.array(list(itertools.product(range(m), repeat=N - 1)), dtype=np.int64).reshape(-1, N - 1)
        rows = np.hstack([np.zeros((rows.shape[0], 1), dtype=np.int64), rows])
        return VectorSet(alphabet, rows, total)

    chunks = _chunks(total, 64 if total > 10**5 else 1)
    done: dict[int, np.ndarray] = {}
    fp = _fingerprint(alphabet, W, T, N, method)
    ck = Path(checkpoint) if checkpoint else None
    if ck is not None and ck.exists():
        with np.load(ck) as z:
            if str(z["fingerprint"]) == fp and int(z["nchunks"]) == len(chunks):
                for i in range(int(z["next"])):
                    done[i] = z[f"c{i}"]
                log.info("resuming from chunk %d of %d", len(done), len(chunks))

    def save():
        if ck is None:
            return
        nxt = 0
        while nxt in done:
            nxt += 1
        tmp = ck.with_suffix(".tmp.npz")
        np.savez(tmp, fingerprint=fp, nchunks=len(chunks), next=nxt, **{f"c{i}": done[i] for i in range(nxt)})
        os.replace(tmp, ck)

    todo = [i for i in range(len(chunks)) if i not in done]
    t0 = time.time()
    if workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futs = {i: ex.submit(_run_chunk, method, args, N, *chunks[i]) for i in todo}
            for i in todo:
                done[i] = futs[i].result()
                save()
                if progress:
                    log.info("chunk %d/%d done (%.1fs)", i + 1, len(chunks), time.time() - t0)
    else:
        for i in todo:
            done[i] = _run_chunk(method, args, N, *chunks[i])
            save()
            if progress:
                log.info("chunk %d/%d done (%.1fs)", i + 1, len(chunks), time.time() - t0)
    rows = np.vstack([done[i] for i in range(len(chunks))]) if chunks else np.zeros((0, N), np.int64)
    if method == "brute":
        rows = rows.reshape(-1, N)
    return VectorSet(alphabet, rows.astype(np.int64), total)


# --- cliques --------------------------------------------------------------------

def _clique_indices(V: np.ndarray, k: int, tol: float) -> np.ndarray:
    n = V.shape[0]
    if n < k or k < 1:
        return np.zeros((0, max(k, 0)), dtype=np.int64)
    bits = K.orthogonality_bits(np.ascontiguousarray(V), tol)
    cap = 1024
    while True:
        out = np.empty((cap, k), dtype=np.int64)
        cnt = K.k_cliques(bits, n, k, out)
        if cnt >= 0:
            return out[:cnt].copy()
        cap *= 4


def _matrix_from_rows(alphabet: SearchAlphabet, rows: np.ndarray, label: str = "") -> BasisMatrix:
    """Columns are the given symbol rows."""
    syms = alphabet.symbols
    N = rows.shape[1]
    grid = [[syms[int(rows[j, a])] for j in range(rows.shape[0])] for a in range(N)]
    return BasisMatrix.from_phases(grid, label)


def assemble_bases(vectors: VectorSet, tol: Tolerances = DEFAULT_TOL) -> list[BasisMatrix]:
    """All orthonormal bases made of the given vectors, columns in input order."""
    N = vectors.rows.shape[1]
    cl = _clique_indices(vectors.normalized, N, tol.unbiasedness_tolerance)
    return [_matrix_from_rows(vectors.alphabet, vectors.rows[c]) for c in cl]


def basis_cliques(vectors: VectorSet, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    N = vectors.rows.shape[1]
    return _clique_indices(vectors.normalized, N, tol.unbiasedness_tolerance)


def _dephased_cliques(alphabet: SearchAlphabet, N: int, tol: Tolerances, budget: int, workers: int):
    ones = np.ones(N, dtype=complex)
    vs = enumerate_unbiased_vectors([], alphabet, N=N, orthogonal_to=[ones], tol=tol, budget=budget,
                                    workers=workers)
    cl = _clique_indices(vs.normalized, N - 1, tol.unbiasedness_tolerance)
    return vs, cl


def _clique_matrix_rows(vs: VectorSet, clique) -> np.ndarray:
    N = vs.rows.shape[1]
    return np.vstack([np.zeros((1, N), dtype=np.int64), vs.rows[np.asarray(clique)]])


def dephased_hadamard_cliques(alphabet: SearchAlphabet, N: int = 6, tol: Tolerances = DEFAULT_TOL,
                              budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[BasisMatrix]:
    """Every dephased Hadamard matrix over the alphabet, as a set of columns (all-ones first)."""
    vs, cl = _dephased_cliques(alphabet, N, tol, budget, workers)
    return [_matrix_from_rows(alphabet, _clique_matrix_rows(vs, c)) for c in cl]


def _codes_for(alphabet: SearchAlphabet, sym_rows: np.ndarray):
    """Code matrices (B, N, N) in matrix orientation from column symbol rows (B, N cols, N)."""
    k, e = alphabet.codes
    kk = np.transpose(k[sym_rows], (0, 2, 1))
    ee = np.transpose(e[sym_rows], (0, 2, 1))
    return kk, ee


def _batched_keys(alphabet: SearchAlphabet, sym_rows: np.ndarray, batch: int = 32) -> list[tuple]:
    keys: list[tuple] = []
    for s in range(0, sym_rows.shape[0], batch):
        kk, ee = _codes_for(alphabet, sym_rows[s:s + batch])
        keys.extend(canonical_keys(kk, ee, alphabet.n))
    return keys


@dataclass
class HadamardClass:
    representative: BasisMatrix
    size: int
    key: tuple
    label: str = ""


def enumerate_hadamard_bases(alphabet: SearchAlphabet, N: int = 6, tol: Tolerances = DEFAULT_TOL,
                             budget: int = DEFAULT_BUDGET, workers: int = 1,
                             labels: "LabelIndex | None" = None) -> list[HadamardClass]:
    """Hadamard matrices over the alphabet, one representative per equivalence class.

    ``size`` counts the dephased cliques in the class.  Cliques are first
    reduced modulo permutations of rows 1..N-1 (which map cliques to cliques),
    then classified by exact canonical keys.
    """
    vs, cl = _dephased_cliques(alphabet, N, tol, budget, workers)
    if cl.shape[0] == 0:
        return []
    m = len(alphabet)
    codes = np.zeros(len(vs), dtype=np.int64)
    for i in range(1, N):
        codes = codes * m + vs.rows[:, i]
    perms = np.array(list(itertools.permutations(range(N - 1))), dtype=np.int64)
    reps = K.row_orbit_min(cl, vs.rows, codes, perms, m)
    uniq, inverse = np.unique(reps, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    mult = np.bincount(inverse, minlength=uniq.shape[0])
    sym_rows = np.stack([_clique_matrix_rows(vs, u) for u in uniq])
    keys = _batched_keys(alphabet, sym_rows)
    classes: dict[tuple, list] = {}
    for i, key in enumerate(keys):
        if key in classes:
            classes[key][1] += int(mult[i])
        else:
            classes[key] = [i, int(mult[i])]
    out = []
    for key, (i, size) in classes.items():
        rep = _matrix_from_rows(alphabet, sym_rows[i])
        lab = labels.label_key(key) if labels is not None else ""
        out.append(HadamardClass(rep.relabel(lab), size, key, lab))
    out.sort(key=lambda c: (c.label == "", c.label, c.key))
    return out


# --- labels ---------------------------------------------------------------------

class LabelIndex:
    """Canonical keys of catalog matrices expressible over an alphabet."""

    def __init__(self, alphabet: SearchAlphabet, N: int = 6, pool=None):
        self.alphabet = alphabet
        self.N = N
        self.pool = list(pool) if pool is not None else default_label_pool(alphabet) if N == 6 else []
        self._keys: dict[tuple, str] = {}
        self._floats: list[tuple[str, BasisMatrix]] = []
        for lab, mat in self.pool:
            key = self.key_of(mat)
            if key is None:
                self._floats.append((lab, mat))
            elif key not in self._keys:
                self._keys[key] = lab

    def key_of(self, mat: BasisMatrix) -> tuple | None:
        pc = phase_codes(mat)
        if pc is None:
            return None
        n = self.alphabet.n
        if n % pc.n:
            return None
        if pc.special is not None and pc.special != self.alphabet.special_base:
            return None
        k = pc.k * (n // pc.n)
        return canonical_keys(k[None], pc.e[None], n)[0]

    def label_key(self, key: tuple) -> str:
        return self._keys.get(key, "")

    def label(self, mat: BasisMatrix) -> str:
        key = self.key_of(mat)
        if key is not None and key in self._keys:
            return self._keys[key]
        from .equivalence import are_equivalent

        for lab, ref in self._floats:
            if are_equivalent(mat, ref) is not None:
                return lab
        return ""


def _fr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def default_label_pool(alphabet: SearchAlphabet) -> list[tuple[str, BasisMatrix]]:
    """Catalog members whose entries could lie in the alphabet's group."""
    from . import catalog as cat

    n = alphabet.n
    pool: list[tuple[str, BasisMatrix]] = []
    if n % 6 == 0:
        pts = []
        for i in range(n // 6 + 1):
            for j in range(0, i // 2 + 1):
                pts.append((Fraction(i, n), Fraction(j, n)))
        for a, b in pts:
            pool.append((f"F({_fr(a)},{_fr(b)})", cat.fourier(a, b)))
        for a, b in pts:
            pool.append((f"F^T({_fr(a)},{_fr(b)})", cat.fourier_transposed(a, b)))
    if n % 4 == 0:
        # D(x) ~ D(x+1/2) ~ D(1/4-x) leaves x in [-1/8, 1/8]; D(x) and D(-x) differ
        for i in sorted(range(-(n // 8), n // 8 + 1), key=lambda i: (abs(i), i < 0)):
            x = Fraction(i, n)
            pool.append((f"D({_fr(x)})", cat.dita(x)))
    if n % 12 == 0 and alphabet.special_base == "d":
        pool.append(("C", cat.bjorck()))
        pool.append(("C*", cat.bjorck(True)))
    if n % 3 == 0 and alphabet.special_base is None:
        try:
            pool.append(("S", cat.tao()))
        except Exception:  # noqa: BLE001 - tao needs this module; skip during its own search
            pass
    base = alphabet.special_base
    if base in ("b1", "b2") and n % 6 == 0:
        c = "c" + base[1]
        for sign in ("+", "-"):
            for k in range(n):
                x = (f"{k}/{n}" if k else "") + (sign if k or sign == "-" else "") + c
                for tr, fam in (("F", cat.fourier), ("F^T", cat.fourier_transposed)):
                    pool.append((f"{tr}({x},0)", fam(x, 0)))
    return pool


# --- triplets ---------------------------------------------------------------------

@dataclass
class TripletReport:
    pair_label: str
    mub1: BasisMatrix
    alphabet: str
    vector_count: int
    candidates: list
    candidate_labels: list
    distance_table: np.ndarray
    max_offdiag: float
    quartet_found: bool
    vectors_used: int = 0
    residual: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.candidates)

    def to_json(self, digits: int = 2) -> dict:
        from .io import matrix_to_json

        return {
            "pair": ["1", self.pair_label],
            "alphabet": self.alphabet,
            "unbiased_vectors": self.vector_count,
            "candidates": self.count,
            "vectors_used": self.vectors_used,
            "candidate_labels": self.candidate_labels,
            "distance_table": np.round(self.distance_table, digits).tolist(),
            "distance_table_raw": self.distance_table.tolist(),
            "max_offdiag": self.max_offdiag,
            "quartet_found": self.quartet_found,
            "max_residual": self.residual,
            "mub1": matrix_to_json(self.mub1),
            "candidate_matrices": [matrix_to_json(c) for c in self.candidates],
        }


def triplet_search(mub1: BasisMatrix, alphabet: SearchAlphabet, tol: Tolerances = DEFAULT_TOL,
                   budget: int = DEFAULT_BUDGET, workers: int = 1, labels: LabelIndex | None = None,
                   pair_label: str | None = None, checkpoint=None, progress: bool = False) -> TripletReport:
    """Bases over the alphabet that are unbiased to both 1 and ``mub1``."""
    from .core import unbiasedness_residual
    from .geometry import distance_table

    N = mub1.dimension
    vs = enumerate_unbiased_vectors([identity(N), mub1], alphabet, tol=tol, budget=budget, workers=workers,
                                    checkpoint=checkpoint, progress=progress)
    cl = basis_cliques(vs, tol)
    cands = [_matrix_from_rows(alphabet, vs.rows[c]) for c in cl]
    if labels is None and N == 6:
        labels = LabelIndex(alphabet, N)
    labs = [labels.label(c) if labels is not None else "" for c in cands]
    cands = [c.relabel(lab) for c, lab in zip(cands, labs)]
    table = distance_table(cands) if cands else np.zeros((0, 0))
    off = table[~np.eye(len(cands), dtype=bool)] if len(cands) > 1 else np.zeros(0)
    max_off = float(off.max()) if off.size else 0.0
    res = 0.0
    for c in cands:
        res = max(res, unbiasedness_residual(identity(N), c), unbiasedness_residual(mub1, c),
                  float(np.max(np.abs(as_array(c).conj().T @ as_array(c) - np.eye(N)))))
    if pair_label is None:
        pair_label = mub1.label or (labels.label(mub1) if labels is not None else "")
    return TripletReport(pair_label, mub1, alphabet.describe(), len(vs), cands, labs, table, max_off,
                         bool(off.size and off.max() >= 1 - 1e-6), len(np.unique(cl)) if cl.size else 0, res)


@dataclass
class SurveyReport:
    alphabet: str
    classes: list
    reports: list

    def extendable(self) -> list[tuple[str, int]]:
        return [(r.pair_label, r.count) for r in self.reports if r.count > 0]

    def to_json(self, digits: int = 2) -> dict:
        return {
            "alphabet": self.alphabet,
            "hadamard_classes": [{"label": c.label, "dephased_cliques": c.size} for c in self.classes],
            "extendable": [{"pair": lab, "candidates": n} for lab, n in self.extendable()],
            "reports": [r.to_json(digits) for r in self.reports if r.count > 0],
            "max_offdiag": max((r.max_offdiag for r in self.reports), default=0.0),
            "quartet_found": any(r.quartet_found for r in self.reports),
        }


def survey(alphabet: SearchAlphabet, N: int = 6, tol: Tolerances = DEFAULT_TOL, budget: int = DEFAULT_BUDGET,
           workers: int = 1, progress: bool = False) -> SurveyReport:
    """Triplet search for every inequivalent Hadamard matrix over the alphabet."""
    labels = LabelIndex(alphabet, N) if N == 6 else None
    classes = enumerate_hadamard_bases(alphabet, N, tol, budget, workers, labels)
    if progress:
        log.info("%d Hadamard classes over %s", len(classes), alphabet.describe())
    reports = []
    for i, c in enumerate(classes):
        lab = c.label or f"class-{i}"
        reports.append(triplet_search(c.representative, alphabet, tol, budget, workers, labels, lab))
        if progress:
            log.info("%s: %d candidates", lab, reports[-1].count)
    return SurveyReport(alphabet.describe(), classes, reports)
