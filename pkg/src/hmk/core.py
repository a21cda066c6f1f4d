"""Exact and floating phases, basis matrices and the shared tolerances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

TAU = 2 * math.pi


class HMKError(Exception):
    """Base class for library errors."""


class ValidationError(HMKError):
    pass


@dataclass(frozen=True)
class Tolerances:
    unitarity_tolerance: float = 1e-10
    unbiasedness_tolerance: float = 1e-9
    rank_threshold: float = 1e-8
    distance_report_digits: int = 2

    def __post_init__(self):
        for name in ("unitarity_tolerance", "unbiasedness_tolerance", "rank_threshold", "distance_report_digits"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def _unit_from_turn(t: Fraction) -> complex:
    # exact at quarter turns, symmetric elsewhere
    t = t % 1
    quadrant = int(t * 4)
    r = float(t - Fraction(quadrant, 4))
    c, s = math.cos(TAU * r), math.sin(TAU * r)
    for _ in range(quadrant):
        c, s = -s, c
    return complex(c, s)


@dataclass(frozen=True, order=True)
class TurnFraction:
    """The root of unity exp(2 pi i numerator/denominator), kept normalized."""

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        f = Fraction(self.numerator, self.denominator) % 1
        object.__setattr__(self, "numerator", f.numerator)
        object.__setattr__(self, "denominator", f.denominator)

    @classmethod
    def of(cls, value) -> "TurnFraction":
        f = Fraction(value)
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other: "TurnFraction") -> "TurnFraction":
        return TurnFraction.of(self.fraction + other.fraction)

    def __neg__(self) -> "TurnFraction":
        return TurnFraction.of(-self.fraction)

    def __sub__(self, other: "TurnFraction") -> "TurnFraction":
        return self + (-other)

    def realize(self) -> complex:
        return _unit_from_turn(self.fraction)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


# Special algebraic phases.  b1 and b2 are fixed only through cos / tan; the
# branches with positive imaginary part are used and searches always include
# the conjugates as well.
_SQ3 = math.sqrt(3.0)
_SPECIAL_VALUES = {
    "d": complex((1 - _SQ3) / 2, math.sqrt(_SQ3 / 2)),
    "b1": complex(math.sqrt(2 / 3), math.sqrt(1 / 3)),
    "b2": complex(-1 / math.sqrt(5), 2 / math.sqrt(5)),
}
for _k in list(_SPECIAL_VALUES):
    _SPECIAL_VALUES[_k + "bar"] = _SPECIAL_VALUES[_k].conjugate()

SPECIAL_SYMBOLS = ("d", "dbar", "b1", "b1bar", "b2", "b2bar")
_CONJ = {"d": "dbar", "dbar": "d", "b1": "b1bar", "b1bar": "b1", "b2": "b2bar", "b2bar": "b2"}

# turn fractions of b1 and b2
C1 = math.atan2(_SPECIAL_VALUES["b1"].imag, _SPECIAL_VALUES["b1"].real) / TAU
C2 = math.atan2(_SPECIAL_VALUES["b2"].imag, _SPECIAL_VALUES["b2"].real) / TAU


@dataclass(frozen=True)
class SpecialConstant:
    symbol: str

    def __post_init__(self):
        if self.symbol not in _SPECIAL_VALUES:
            raise ValueError(f"unknown special constant {self.symbol!r}; expected one of {SPECIAL_SYMBOLS}")

    @property
    def realization(self) -> complex:
        return _SPECIAL_VALUES[self.symbol]

    def conjugate(self) -> "SpecialConstant":
        return SpecialConstant(_CONJ[self.symbol])

    @property
    def base(self) -> str:
        return self.symbol.replace("bar", "")

    @property
    def exponent(self) -> int:
        return -1 if self.symbol.endswith("bar") else 1


class PhaseValue:
    """Common interface of the three phase kinds."""

    def realize(self) -> complex:
        raise NotImplementedError

    @property
    def is_exact(self) -> bool:
        return not isinstance(self, FloatPhase)

    def angle(self) -> float:
        z = self.realize()
        return math.atan2(z.imag, z.real)

    def __mul__(self, other: "PhaseValue") -> "PhaseValue":
        return multiply(self, other)

    def conjugate(self) -> "PhaseValue":
        raise NotImplementedError


@dataclass(frozen=True)
class RationalRoot(PhaseValue):
    root: TurnFraction

    def realize(self) -> complex:
        return self.root.realize()

    def conjugate(self) -> "RationalRoot":
        return RationalRoot(-self.root)

    def __str__(self):
        return f"e(2pi i {self.root})"


@dataclass(frozen=True)
class SpecialProduct(PhaseValue):
    """constant**power times a root of unity."""

    constant: SpecialConstant
    root: TurnFraction = field(default_factory=lambda: TurnFraction(0))
    power: int = 1

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power must be a positive integer")

    def realize(self) -> complex:
        return self.constant.realization ** self.power * self.root.realize()

    def conjugate(self) -> "SpecialProduct":
        return SpecialProduct(self.constant.conjugate(), -self.root, self.power)

    @property
    def exponent(self) -> int:
        """Signed power of the unbarred base constant."""
        return self.constant.exponent * self.power

    def __str__(self):
        pw = f"^{self.power}" if self.power != 1 else ""
        return f"{self.constant.symbol}{pw}*e(2pi i {self.root})"


@dataclass(frozen=True, eq=False)
class FloatPhase(PhaseValue):
    angle_rad: float

    def realize(self) -> complex:
        return complex(math.cos(self.angle_rad), math.sin(self.angle_rad))

    def conjugate(self) -> "FloatPhase":
        return FloatPhase(-self.angle_rad)

    def __eq__(self, other):
        if not isinstance(other, PhaseValue):
            return NotImplemented
        diff = (self.angle_rad - other.angle() if not isinstance(other, FloatPhase) else self.angle_rad - other.angle_rad)
        return abs(math.remainder(diff, TAU)) < 1e-12

    def __hash__(self):
        return hash(round(self.angle_rad % TAU, 9))


def root(num, den: int = 1) -> RationalRoot:
    return RationalRoot(TurnFraction.of(Fraction(num, den)))


def special(symbol: str, turn=0) -> SpecialProduct:
    return SpecialProduct(SpecialConstant(symbol), TurnFraction.of(turn))


def realize(p: PhaseValue) -> complex:
    return p.realize()


def multiply(a: PhaseValue, b: PhaseValue) -> PhaseValue:
    if isinstance(a, FloatPhase) or isinstance(b, FloatPhase):
        return FloatPhase(a.angle() + b.angle())
    if isinstance(a, RationalRoot) and isinstance(b, RationalRoot):
        return RationalRoot(a.root + b.root)
    if isinstance(a, RationalRoot):
        a, b = b, a
    if isinstance(b, RationalRoot):
        return SpecialProduct(a.constant, a.root + b.root, a.power)
    if a.constant.base != b.constant.base:
        return FloatPhase(a.angle() + b.angle())
    e = a.exponent + b.exponent
    if e == 0:
        return RationalRoot(a.root + b.root)
    sym = a.constant.base + ("" if e > 0 else "bar")
    return SpecialProduct(SpecialConstant(sym), a.root + b.root, abs(e))


def divide(a: PhaseValue, b: PhaseValue) -> PhaseValue:
    return multiply(a, b.conjugate())


def exact_phase_of(z: complex, n: int, tol: float = 1e-9) -> RationalRoot | None:
    """Recognize a unit complex number as an n-th root of unity."""
    k = round(math.atan2(z.imag, z.real) / TAU * n)
    if abs(z - _unit_from_turn(Fraction(k, n))) <= tol:
        return root(k, n)
    return None


MatrixLike = Union["BasisMatrix", np.ndarray, Sequence]


class BasisMatrix:
    """Columns of a square matrix, read as an orthonormal basis.

    ``entries`` is the floating matrix.  ``exact_entries``, when present, is a
    grid of phases whose realizations times ``1/sqrt(dimension)`` give the
    entries.  Arrays are stored read-only.
    """

    __slots__ = ("entries", "exact_entries", "label")

    def __init__(self, entries, exact_entries=None, label: str = ""):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"basis matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        if exact_entries is not None:
            exact_entries = tuple(tuple(row) for row in exact_entries)
            if len(exact_entries) != m.shape[0] or any(len(r) != m.shape[0] for r in exact_entries):
                raise ValueError("exact_entries shape does not match entries")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "exact_entries", exact_entries)
        object.__setattr__(self, "label", label)

    def __setattr__(self, key, value):
        raise AttributeError("BasisMatrix is immutable")

    @classmethod
    def from_phases(cls, phases, label: str = "", normalize: bool = True) -> "BasisMatrix":
        grid = [[p for p in row] for row in phases]
        n = len(grid)
        scale = 1 / math.sqrt(n) if normalize else 1.0
        vals = np.array([[p.realize() for p in row] for row in grid]) * scale
        return cls(vals, grid if normalize else None, label)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def has_exact(self) -> bool:
        return self.exact_entries is not None

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy() if copy else self.entries
        return self.entries.astype(dtype)

    def dagger(self) -> "BasisMatrix":
        exact = None
        if self.exact_entries is not None:
            exact = [[self.exact_entries[j][i].conjugate() for j in range(self.dimension)] for i in range(self.dimension)]
        return BasisMatrix(self.entries.conj().T, exact, f"{self.label}^dagger" if self.label else "")

    def transpose(self) -> "BasisMatrix":
        exact = None
        if self.exact_entries is not None:
            exact = [[self.exact_entries[j][i] for j in range(self.dimension)] for i in range(self.dimension)]
        return BasisMatrix(self.entries.T, exact, f"{self.label}^T" if self.label else "")

    def conjugate(self) -> "BasisMatrix":
        exact = None
        if self.exact_entries is not None:
            exact = [[p.conjugate() for p in row] for row in self.exact_entries]
        return BasisMatrix(self.entries.conj(), exact, f"conj({self.label})" if self.label else "")

    def relabel(self, label: str) -> "BasisMatrix":
        return BasisMatrix(self.entries, self.exact_entries, label)

    def exact_consistency(self) -> float:
        """Max deviation between float entries and the realized exact grid."""
        if self.exact_entries is None:
            return 0.0
        n = self.dimension
        vals = np.array([[p.realize() for p in row] for row in self.exact_entries]) / math.sqrt(n)
        return float(np.max(np.abs(vals - self.entries)))

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> "BasisMatrix":
        if unitarity_residual(self) > tol.unitarity_tolerance:
            raise ValidationError(f"columns are not orthonormal (residual {unitarity_residual(self):.3g})")
        if self.exact_consistency() > 1e-12:
            raise ValidationError("float entries disagree with the exact phase grid")
        return self

    def __repr__(self):
        return f"BasisMatrix(dimension={self.dimension}, label={self.label!r}, exact={self.has_exact})"


def as_array(m: MatrixLike) -> np.ndarray:
    if isinstance(m, BasisMatrix):
        return m.entries
    return np.asarray(m, dtype=complex)


def identity(n: int = 6) -> BasisMatrix:
    return BasisMatrix(np.eye(n), None, "1")


def overlap(m1: MatrixLike, m2: MatrixLike) -> np.ndarray:
    """M1^dagger M2 with a fixed summation order, so overlap(b, a) == overlap(a, b)^dagger exactly."""
    a, b = as_array(m1), as_array(m2)
    return (a.conj()[:, :, None] * b[:, None, :]).sum(axis=0)


def unitarity_residual(m: MatrixLike) -> float:
    a = as_array(m)
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


def is_hadamard(m: MatrixLike, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = as_array(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    n = a.shape[0]
    if unitarity_residual(a) > tol.unitarity_tolerance:
        return False
    return bool(np.max(np.abs(np.abs(a) ** 2 - 1 / n)) <= tol.unbiasedness_tolerance)


def hadamard_residual(m: MatrixLike) -> float:
    a = as_array(m)
    n = a.shape[0]
    return max(unitarity_residual(a), float(np.max(np.abs(np.abs(a) ** 2 - 1 / n))))


def _unbiasedness_one_way(m1: MatrixLike, m2: MatrixLike) -> float:
    o = overlap(m1, m2)
    return float(np.max(np.abs(o.real * o.real + o.imag * o.imag - 1 / o.shape[0])))


def unbiasedness_residual(m1: MatrixLike, m2: MatrixLike) -> float:
    # both orders, so the result is exactly symmetric in its arguments
    return max(_unbiasedness_one_way(m1, m2), _unbiasedness_one_way(m2, m1))


def are_unbiased(m1: MatrixLike, m2: MatrixLike, tol: Tolerances = DEFAULT_TOL) -> bool:
    if as_array(m1).shape != as_array(m2).shape:
        raise ValueError("bases must have equal dimension")
    return unbiasedness_residual(m1, m2) <= tol.unbiasedness_tolerance
