"""First-order defect and the order-by-order expansion around Dita's matrix.

Phases x_ab sit on the non-trivial entries (a, b >= 1) of a dephased matrix,
H_ab -> H_ab exp(i x_ab).  The orthogonality of rows a < b,

    G_ab = sum_c H_ac conj(H_bc) exp(i (x_ac - x_bc)) = 0,

is expanded in powers of the phases.  Every order gives the same linear map J
acting on the new unknowns, with an inhomogeneous term built from the lower
orders.  The defect is the dimension of ker J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import DEFAULT_TOL, BasisMatrix, HMKError, MatrixLike, Tolerances, ValidationError, as_array, \
    hadamard_residual, is_hadamard


class IllConditioned(HMKError):
    """Singular values too close to the rank threshold to call the rank."""


class Inconsistent(HMKError):
    """A stage of the expansion has no solution."""


CONSISTENCY_TOL = 1e-10
INCONSISTENT_TOL = 1e-8


def _unit_dephased(h: MatrixLike) -> np.ndarray:
    a = as_array(h)
    u = a / np.abs(a)
    return u * u[0, 0] / (u[:, :1] * u[:1, :])


def _pair_products(u: np.ndarray):
    n = u.shape[0]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    M = np.array([u[a] * u[b].conj() for a, b in pairs])
    return pairs, M


def _phase_diffs(theta: np.ndarray, pairs) -> np.ndarray:
    """theta: full n x n phase array (zero first row/column) -> (pairs, n) differences."""
    return np.array([theta[a] - theta[b] for a, b in pairs])


def _embed(v: np.ndarray, n: int) -> np.ndarray:
    t = np.zeros((n, n))
    t[1:, 1:] = v.reshape(n - 1, n - 1)
    return t


def _realify(g: np.ndarray, n: int) -> np.ndarray:
    """Stack real and imaginary parts, with n zero rows for the (phase-invariant) row norms."""
    return np.concatenate([g.real, g.imag, np.zeros(n)])


def jacobian(h: MatrixLike) -> np.ndarray:
    """Real Jacobian of the unitarity constraints in the (N-1)^2 phases, at x = 0.

    Rows: Re and Im of each row-pair product, then N norm rows (identically zero).
    """
    u = _unit_dephased(h)
    n = u.shape[0]
    pairs, M = _pair_products(u)
    cols = []
    for k in range((n - 1) ** 2):
        e = np.zeros((n - 1) ** 2)
        e[k] = 1.0
        d = _phase_diffs(_embed(e, n), pairs)
        cols.append(_realify(1j * (M * d).sum(axis=1), n))
    return np.array(cols).T


def _rank(s: np.ndarray, threshold: float, guard: bool = True) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    cut = threshold * s[0]
    if guard:
        near = s[(s > cut / 10) & (s < cut * 10)]
        if near.size:
            raise IllConditioned(f"singular values {near.tolist()} lie within a factor 10 of the cut {cut:.3g}")
    return int((s > cut).sum())


def defect(h: MatrixLike, tol: Tolerances = DEFAULT_TOL) -> int:
    if not is_hadamard(h, tol):
        raise ValidationError("defect needs a Hadamard matrix")
    J = jacobian(h)
    s = np.linalg.svd(J, compute_uv=False)
    return J.shape[1] - _rank(s, tol.rank_threshold)


# --- Dita's matrix --------------------------------------------------------------

def dita_matrix() -> np.ndarray:
    """Unimodular D(0)."""
    from .catalog import dita

    return as_array(dita(0)) * math.sqrt(6)


FREE = ((1, 2), (1, 3), (2, 4), (3, 4))
# dependent antisymmetric entries as integer combinations of the free ones
DEPENDENT = {
    (1, 4): (1, 0, 0, 1),
    (1, 5): (0, 1, 0, 1),
    (2, 3): (0, 1, 1, 0),
    (2, 5): (-1, 1, 0, 0),
    (3, 5): (0, 0, -1, 1),
    (4, 5): (-1, 0, -1, 0),
}
AFFINE_DIRECTIONS = {
    "i": (1, 0, 0, 0),
    "ii": (0, 1, 0, 0),
    "iii": (0, 0, 1, 0),
    "iv": (0, 0, 0, 1),
    "v": (1, 1, -1, -1),
}
HERMITIAN_DIRECTION = (-1, -1, 2, 1)


@dataclass(frozen=True)
class PhasePerturbation:
    """Phases on the 5 x 5 block, indexed 1..5 as in x[a-1, b-1]."""

    x: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(np.diag(self.x))

    @property
    def symmetric(self) -> np.ndarray:
        s = (self.x + self.x.T) / 2
        return s - np.diag(np.diag(s))

    @property
    def antisymmetric(self) -> np.ndarray:
        return (self.x - self.x.T) / 2

    def entry(self, a: int, b: int) -> float:
        return float(self.x[a - 1, b - 1])


def first_order(seed) -> np.ndarray:
    """The 5 x 5 first-order solution: antisymmetric, free entries from the seed."""
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (4,):
        raise ValueError("seed must hold four values")
    x = np.zeros((5, 5))
    for (a, b), v in zip(FREE, seed):
        x[a - 1, b - 1], x[b - 1, a - 1] = v, -v
    for (a, b), coeff in DEPENDENT.items():
        v = float(np.dot(coeff, seed))
        x[a - 1, b - 1], x[b - 1, a - 1] = v, -v
    return x


def _gauge_rows() -> np.ndarray:
    g = np.zeros((4, 25))
    for k, (a, b) in enumerate(FREE):
        g[k, (a - 1) * 5 + (b - 1)] = 0.5
        g[k, (b - 1) * 5 + (a - 1)] = -0.5
    return g


@dataclass
class ExpansionReport:
    free_params: tuple
    order: int
    x: np.ndarray
    y: np.ndarray | None = None
    z: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    gauge: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    y_scalar: float | None = None
    y_closed_form: float | None = None
    convergence_order: float | None = None

    @property
    def consistent(self) -> bool:
        return all(r < CONSISTENCY_TOL for r in self.residuals.values())

    def exponent(self, eps: float = 1.0) -> np.ndarray:
        t = eps * self.x
        if self.y is not None:
            t = t + eps ** 2 * self.y
        if self.z is not None:
            t = t + eps ** 3 * self.z
        return t

    def matrix(self, eps: float = 1.0) -> BasisMatrix:
        u = dita_matrix() * np.exp(1j * _embed(self.exponent(eps).ravel(), 6))
        return BasisMatrix(u / math.sqrt(6), None, f"D exp(i(x+y+z)) seed={list(self.free_params)}")

    def to_json(self) -> dict:
        def arr(a):
            return None if a is None else a.tolist()

        co = self.convergence_order
        return {
            "free_params": list(self.free_params),
            "order": self.order,
            "x": arr(self.x),
            "y": arr(self.y),
            "z": arr(self.z),
            "residuals": self.residuals,
            "gauge": self.gauge,
            "checks": self.checks,
            "y_scalar": self.y_scalar,
            "y_closed_form": self.y_closed_form,
            "consistent": self.consistent,
            "convergence_order": None if co is None else ("inf" if math.isinf(co) else co),
        }


class _DitaSystem:
    def __init__(self):
        self.u = dita_matrix()
        self.pairs, self.M = _pair_products(self.u)
        self.J = jacobian(self.u / math.sqrt(6))
        self.G = _gauge_rows()
        self.A = np.vstack([self.J, self.G])

    def diffs(self, v5: np.ndarray) -> np.ndarray:
        return _phase_diffs(_embed(v5.ravel(), 6), self.pairs)

    def apply(self, v5: np.ndarray) -> np.ndarray:
        return _realify(1j * (self.M * self.diffs(v5)).sum(axis=1), 6)

    def solve(self, rhs: np.ndarray):
        b = np.concatenate([rhs, np.zeros(4)])
        v, *_ = np.linalg.lstsq(self.A, b, rcond=None)
        resid = float(np.linalg.norm(self.A @ v - b))
        return v.reshape(5, 5), resid


_SYSTEM: _DitaSystem | None = None


def _system() -> _DitaSystem:
    global _SYSTEM
    if _SYSTEM is None:
        _SYSTEM = _DitaSystem()
    return _SYSTEM


def _check(value: float) -> float:
    return float(abs(value))


def dita_expand(seed, order: int = 3, fit_order: bool = True) -> ExpansionReport:
    seed = tuple(float(s) for s in seed)
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if max(abs(s) for s in seed) > 0.3 + 1e-15:
        raise ValueError("seed values must satisfy |x| <= 0.3")
    S = _system()
    x = first_order(seed)
    rep = ExpansionReport(seed, order, x)
    rep.residuals["order1"] = float(np.linalg.norm(S.apply(x)))
    p1 = S.diffs(x)
    if order >= 2:
        rhs = _realify((S.M * p1 ** 2 / 2).sum(axis=1), 6)
        y, res = S.solve(rhs)
        rep.y = y
        rep.residuals["order2"] = res
        P = PhasePerturbation(y)
        X = lambda a, b: x[a - 1, b - 1]  # noqa: E731
        rep.gauge["y"] = [float(P.antisymmetric[a - 1, b - 1]) for a, b in FREE]
        rep.checks["y_antisymmetric_max"] = float(np.abs(P.antisymmetric).max())
        diag_rhs = [
            -X(2, 1) ** 2 + X(3, 1) ** 2 + X(4, 1) ** 2 - X(5, 1) ** 2,
            -X(1, 2) ** 2 - X(3, 2) ** 2 + X(4, 2) ** 2 + X(5, 2) ** 2,
            X(1, 3) ** 2 - X(2, 3) ** 2 - X(4, 3) ** 2 + X(5, 3) ** 2,
            X(1, 4) ** 2 + X(2, 4) ** 2 - X(3, 4) ** 2 - X(5, 4) ** 2,
            -X(1, 5) ** 2 + X(2, 5) ** 2 + X(3, 5) ** 2 - X(4, 5) ** 2,
        ]
        rep.checks["y_diagonal_formula_max"] = float(max(abs(2 * y[a, a] - diag_rhs[a]) for a in range(5)))
        off = P.symmetric[~np.eye(5, dtype=bool)]
        rep.y_scalar = float(off.mean())
        rep.checks["y_symmetric_spread"] = float(off.max() - off.min())
        rep.y_closed_form = (2 * y[0, 0] + 2 * y[1, 1] - (X(1, 3) - X(2, 3)) ** 2
                             + (X(1, 4) - X(2, 4)) ** 2 - (X(1, 5) - X(2, 5)) ** 2) / 4
        rep.checks["y_closed_form_diff"] = abs(rep.y_closed_form - rep.y_scalar)
    if order >= 3:
        p2 = S.diffs(rep.y)
        rhs = _realify((S.M * (p1 * p2 + 1j * p1 ** 3 / 6)).sum(axis=1), 6)
        z, res = S.solve(rhs)
        rep.z = z
        rep.residuals["order3"] = res
        P = PhasePerturbation(z)
        rep.gauge["z"] = [float(P.antisymmetric[a - 1, b - 1]) for a, b in FREE]
        rep.checks["z_diagonal_max"] = float(np.abs(np.diag(z)).max())
        rep.checks["z_symmetric_max"] = float(np.abs(P.symmetric).max())
    worst = max(rep.residuals.values())
    if worst > INCONSISTENT_TOL:
        raise Inconsistent(f"stage residual {worst:.3g} exceeds {INCONSISTENT_TOL}")
    if fit_order:
        rep.convergence_order = convergence_order(rep)
    return rep


def unitarity_defect_norm(rep: ExpansionReport, eps: float) -> float:
    u = rep.matrix(eps).entries
    return float(np.linalg.norm(u.conj().T @ u - np.eye(6)))


def convergence_order(rep: ExpansionReport, eps=(0.1, 0.05, 0.025)) -> float:
    """Slope of log ||U^dagger U - 1|| against log eps; inf when the family is exact."""
    r = np.array([unitarity_defect_norm(rep, e) for e in eps])
    if np.all(r < 1e-13):
        return math.inf
    slope, _ = np.polyfit(np.log(eps), np.log(np.maximum(r, 1e-300)), 1)
    return float(slope)


def affine_direction_check(direction, x_values, atol: float = 1e-11) -> bool:
    """True iff D_ab exp(i x_ab), with x the full first-order solution, is exactly Hadamard."""
    vec = AFFINE_DIRECTIONS[direction] if isinstance(direction, str) else tuple(direction)
    u0 = dita_matrix()
    for t in x_values:
        x = first_order(np.asarray(vec, dtype=float) * t)
        u = u0 * np.exp(1j * _embed(x.ravel(), 6))
        if hadamard_residual(u / math.sqrt(6)) >= atol:
            return False
    return True


# --- the non-affine direction and the Hermitian family ------------------------------

def _invariant_parts(u: np.ndarray):
    v = u / np.abs(u)
    vals = (v[:, :, None, None] * v[None, None, :, :] * np.conj(v)[:, None, None, :]
            * np.conj(v).T[None, :, :, None]).ravel()
    return np.sort(vals.real), np.sort(vals.imag)


def _invariant_gap(u: np.ndarray, target) -> float:
    re, im = _invariant_parts(u)
    return float(np.abs(re - target[0]).max() + np.abs(im - target[1]).max())


def match_hermitian(m: MatrixLike, grid: int = 721, atol: float = 1e-6):
    """Find theta (and branch) with B(theta) equivalent to m; returns (theta, branch, witness) or None."""
    from .catalog import HERMITIAN_COS_BOUND, hermitian
    from .equivalence import are_equivalent

    target = _invariant_parts(as_array(m))
    lo = math.acos(HERMITIAN_COS_BOUND)
    best = []
    for branch in (1, -1):
        ts = np.linspace(lo, 2 * math.pi - lo, grid)
        gaps = np.array([_invariant_gap(as_array(hermitian(t, branch)), target) for t in ts])
        for k in np.argsort(gaps)[:4]:
            a, b = ts[max(k - 1, 0)], ts[min(k + 1, grid - 1)]
            r = minimize_scalar(lambda t: _invariant_gap(as_array(hermitian(t, branch)), target),
                                bounds=(a, b), method="bounded", options={"xatol": 1e-12})
            best.append((r.fun, float(r.x), branch))
    best.sort()
    for _, theta, branch in best:
        w = are_equivalent(m, hermitian(theta, branch), atol=atol)
        if w is not None:
            return theta, branch, w
    return None


def hermitian_direction_match(x: float = 0.01, atol: float = 1e-6):
    """Expand along (-x, -x, 2x, x) to third order and locate the matching B(theta)."""
    rep = dita_expand(np.array(HERMITIAN_DIRECTION, dtype=float) * x, 3)
    return rep, match_hermitian(rep.matrix(), atol=atol)


def scan_hermitian(samples: int = 100, seed=0, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Defect at uniformly sampled admissible angles of both branches."""
    from .catalog import HERMITIAN_COS_BOUND, hermitian

    rng = np.random.default_rng(seed)
    lo = math.acos(HERMITIAN_COS_BOUND)
    thetas = rng.uniform(lo, 2 * math.pi - lo, samples)
    branches = rng.choice([1, -1], samples)
    values = [defect(hermitian(float(t), int(b)), tol) for t, b in zip(thetas, branches)]
    return {
        "samples": samples,
        "seed": seed,
        "thetas": thetas.tolist(),
        "branches": branches.tolist(),
        "defects": values,
        "distinct": sorted(set(values)),
    }
