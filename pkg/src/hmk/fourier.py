"""Discrete Fourier transform, biunimodular sequences and circulant Hadamard matrices."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    BasisMatrix,
    HMKError,
    RationalRoot,
    Tolerances,
    ValidationError,
    as_array,
    identity,
    is_hadamard,
)
from .search import (
    DEFAULT_BUDGET,
    LabelIndex,
    SearchAlphabet,
    VectorSet,
    _matrix_from_rows,
    basis_cliques,
    enumerate_unbiased_vectors,
)


class NotCirculant(HMKError):
    pass


def dft(z) -> np.ndarray:
    """z~_a = N^{-1/2} sum_b q^{ab} z_b with q = exp(2 pi i/N)."""
    return np.fft.ifft(np.asarray(z, dtype=complex), norm="ortho")


def inverse_dft(zt) -> np.ndarray:
    return np.fft.fft(np.asarray(zt, dtype=complex), norm="ortho")


def autocorrelation(zt) -> np.ndarray:
    """gamma_b = (1/N) sum_a conj(z~_a) z~_{a+b}, cyclic."""
    zt = np.asarray(zt, dtype=complex)
    n = zt.size
    return np.array([np.vdot(zt, np.roll(zt, -b)) for b in range(n)]) / n


def circulant_from_sequence(zt, label: str = "") -> BasisMatrix:
    """C_ab = z~_{(a-b) mod N} / sqrt(N)."""
    zt = np.asarray(zt, dtype=complex)
    n = zt.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return BasisMatrix(zt[idx] / math.sqrt(n), None, label)


def is_circulant(m, atol: float = 1e-10) -> bool:
    a = as_array(m)
    n = a.shape[0]
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return bool(np.max(np.abs(a - a[:, 0][idx])) <= atol)


def is_biunimodular(z, tol: float = 1e-9) -> bool:
    z = np.asarray(z, dtype=complex)
    return bool(np.max(np.abs(np.abs(z) ** 2 - 1)) <= tol and np.max(np.abs(np.abs(dft(z)) ** 2 - 1)) <= tol)


def circulant_intertwiner(c: BasisMatrix, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Diagonal D with F^dagger C = D F^dagger for a circulant Hadamard C."""
    a = as_array(c)
    n = a.shape[0]
    if not is_circulant(a):
        raise NotCirculant("entries do not depend on (a - b) mod N only")
    if not is_hadamard(a, tol):
        raise ValidationError("circulant input is not Hadamard")
    d = inverse_dft(a[:, 0] * math.sqrt(n))
    f = as_array(_fourier(n))
    resid = np.max(np.abs(f.conj().T @ a - np.diag(d) @ f.conj().T))
    if resid > 1e-10:
        raise HMKError(f"intertwining relation fails (residual {resid:.3g})")
    return d


def _fourier(n: int) -> BasisMatrix:
    from .catalog import fourier_matrix

    return fourier_matrix(n)


@dataclass(frozen=True)
class BiunimodularRecord:
    z: tuple
    z_tilde: tuple
    alphabet: str
    classical: bool
    symbols: tuple = ()

    def to_json(self) -> dict:
        return {
            "z_turns": [round(math.atan2(v.imag, v.real) / (2 * math.pi) % 1.0, 12) for v in self.z],
            "z_tilde": [[v.real, v.imag] for v in self.z_tilde],
            "alphabet": self.alphabet,
            "classical": self.classical,
        }


def _as_alphabet(alphabet) -> SearchAlphabet:
    if isinstance(alphabet, SearchAlphabet):
        return alphabet
    return SearchAlphabet.parse(str(alphabet))


def enumerate_biunimodular(n: int, alphabet, fix_first: bool = True, tol: Tolerances = DEFAULT_TOL,
                           budget: int = DEFAULT_BUDGET, method: str = "closed",
                           workers: int = 1) -> list[BiunimodularRecord]:
    """Sequences z over the alphabet, z_0 = 1, whose transform is unimodular.

    |dft(z)_a| = |<f_a|z>| for the columns f_a of F^dagger, so these are the
    alphabet vectors unbiased to 1 and F^dagger.
    """
    if not fix_first:
        raise ValueError("only the z_0 = 1 gauge is supported")
    alpha = _as_alphabet(alphabet)
    vs = enumerate_unbiased_vectors([identity(n), _fourier(n).dagger()], alpha, tol=tol, budget=budget,
                                    method=method, workers=workers)
    out = []
    for row in vs.rows:
        z = alpha.values[row]
        classical = all(isinstance(alpha.symbols[i], RationalRoot) for i in row)
        out.append(BiunimodularRecord(tuple(complex(v) for v in z), tuple(complex(v) for v in dft(z)),
                                      alpha.describe(), classical, tuple(int(i) for i in row)))
    return out


# --- the 16 bases unbiased to 1 and F --------------------------------------------

CENSUS_ALPHABET = SearchAlphabet(12, ("d", "dbar"), 2)
GROUPS = ("i", "ii", "iii", "iv")


@dataclass
class Census:
    vectors: VectorSet
    bases: list
    groups: list
    labels: list
    distance_table: np.ndarray
    cliques: np.ndarray

    def group_sizes(self) -> dict:
        return {g: self.groups.count(g) for g in GROUPS}

    def vector_multiplicity(self) -> np.ndarray:
        return np.bincount(self.cliques.ravel(), minlength=len(self.vectors))

    @property
    def max_distance(self) -> float:
        t = self.distance_table
        return float(t[~np.eye(len(t), dtype=bool)].max())

    def to_json(self, digits: int = 2) -> dict:
        from .io import matrix_to_json

        return {
            "alphabet": self.vectors.alphabet.describe(),
            "vectors": len(self.vectors),
            "bases": len(self.bases),
            "group_sizes": self.group_sizes(),
            "groups": self.groups,
            "labels": self.labels,
            "vector_multiplicity": sorted(set(self.vector_multiplicity().tolist())),
            "distance_table": np.round(self.distance_table, digits).tolist(),
            "distance_table_raw": self.distance_table.tolist(),
            "max_distance": self.max_distance,
            "matrices": [matrix_to_json(b) for b in self.bases],
        }


def _classify(basis: BasisMatrix, labels: LabelIndex) -> tuple[str, str]:
    lab = labels.label(basis)
    classical = all(isinstance(p, RationalRoot) for row in basis.exact_entries for p in row)
    if lab == "F(0,0)":
        return ("i" if classical else "iv"), lab
    if lab == "F^T(1/6,0)":
        return "ii", lab
    if lab in ("C", "C*"):
        return "iii", lab
    return "?", lab


def grassl_census(alphabet: SearchAlphabet = CENSUS_ALPHABET, tol: Tolerances = DEFAULT_TOL,
                  budget: int = DEFAULT_BUDGET, workers: int = 1, cache: bool = True) -> Census:
    """All bases over the alphabet that are unbiased to both 1 and F, grouped by class."""
    from .catalog import cache_dir
    from .geometry import distance_table

    rows = None
    path = cache_dir() / f"census-{alphabet.describe().replace(':', '_').replace(',', '_')}.json" \
        if cache and cache_dir() else None
    if path is not None and path.exists():
        rows = np.array(json.loads(path.read_text())["rows"], dtype=np.int64)
        vs = VectorSet(alphabet, rows)
    else:
        vs = enumerate_unbiased_vectors([identity(6), _fourier(6)], alphabet, tol=tol, budget=budget,
                                        workers=workers)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps({"alphabet": alphabet.describe(), "rows": vs.rows.tolist()}))
    cl = basis_cliques(vs, tol)
    labels = LabelIndex(alphabet)
    bases, groups, labs = [], [], []
    for c in cl:
        b = _matrix_from_rows(alphabet, vs.rows[c])
        g, lab = _classify(b, labels)
        bases.append(b.relabel(lab))
        groups.append(g)
        labs.append(lab)
    order = sorted(range(len(bases)), key=lambda i: (GROUPS.index(groups[i]) if groups[i] in GROUPS else 9, i))
    bases = [bases[i] for i in order]
    groups = [groups[i] for i in order]
    labs = [labs[i] for i in order]
    cl = cl[order] if len(order) else cl
    return Census(vs, bases, groups, labs, distance_table(bases), cl)
