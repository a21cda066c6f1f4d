"""Constructors for the known order-6 complex Hadamard matrices."""

from __future__ import annotations

import enum
import json
import math
import os
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import (
    BasisMatrix,
    FloatPhase,
    HMKError,
    PhaseValue,
    RationalRoot,
    SpecialProduct,
    TAU,
    TurnFraction,
    is_hadamard,
    multiply,
    root,
    special,
)


class OutOfRange(HMKError):
    pass


class BadArity(HMKError):
    pass


class SearchFailed(HMKError):
    pass


class Family(enum.Enum):
    Fourier = "fourier"
    FourierTransposed = "fourier-transposed"
    Bjorck = "bjorck"
    BjorckConjugate = "bjorck-conjugate"
    Dita = "dita"
    Hermitian = "hermitian"
    Tao = "tao"
    TwistedFourier = "twisted-fourier"
    DitaBlockCirculant = "dita-block-circulant"


# parameter arity per family; TwistedFourier also accepts a full diagonal
ARITY = {
    Family.Fourier: (2,),
    Family.FourierTransposed: (2,),
    Family.Bjorck: (0,),
    Family.BjorckConjugate: (0,),
    Family.Dita: (1,),
    Family.Hermitian: (1,),
    Family.Tao: (0,),
    Family.TwistedFourier: (2, 3),
    Family.DitaBlockCirculant: (1,),
}

PARAM_DOC = {
    Family.Fourier: "x1,x2 (turn fractions)",
    Family.FourierTransposed: "x1,x2 (turn fractions)",
    Family.Bjorck: "-",
    Family.BjorckConjugate: "-",
    Family.Dita: "x (turn fraction)",
    Family.Hermitian: "theta (radians), cos(theta) <= (sqrt3-1)/2",
    Family.Tao: "-",
    Family.TwistedFourier: "x1,x2 for diag(1,z1,z2), or x0,x1,x2",
    Family.DitaBlockCirculant: "variant 0 (C3/C4 form) or 1-4 (C1/C2 forms)",
}


_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_turn(value) -> PhaseValue:
    """Turn a parameter into the phase exp(2 pi i x).

    Accepts numbers, Fractions, PhaseValues and strings such as ``"1/6"``,
    ``"0.125"``, ``"c1"``, ``"-c1"`` or ``"9/24+c2"``; c1 and c2 stand for the
    turn fractions of b1 and b2.
    """
    if isinstance(value, PhaseValue):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalRoot(TurnFraction.of(value))
    if isinstance(value, float):
        return FloatPhase(TAU * value)
    text = str(value).replace(" ", "")
    if not text:
        raise ValueError("empty parameter")
    rational = Fraction(0)
    specials = []
    inexact = 0.0
    pos = 0
    for m in _TERM.finditer(text):
        if m.start() != pos:
            raise ValueError(f"cannot parse parameter {value!r}")
        pos = m.end()
        sign, body = (-1 if m.group(1) == "-" else 1), m.group(2)
        if body in ("c1", "c2"):
            specials.append(("b" + body[1]) + ("" if sign > 0 else "bar"))
        elif re.fullmatch(r"\d+(/\d+)?", body):
            rational += sign * Fraction(body)
        else:
            try:
                f = Fraction(body)
            except ValueError:
                raise ValueError(f"cannot parse parameter {value!r}") from None
            if "." in body or "e" in body.lower():
                inexact += sign * float(body)
            else:
                rational += sign * f
    if pos != len(text):
        raise ValueError(f"cannot parse parameter {value!r}")
    phase: PhaseValue = RationalRoot(TurnFraction.of(rational))
    for s in specials:
        phase = multiply(phase, special(s))
    if inexact:
        phase = FloatPhase(phase.angle() + TAU * inexact)
    return phase


def parse_params(text: str) -> list[str]:
    return [p for p in (t.strip() for t in text.split(",")) if p]


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    params: tuple = ()
    branch: int = 1

    def __post_init__(self):
        fam = Family(self.family) if not isinstance(self.family, Family) else self.family
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) not in ARITY[fam]:
            raise BadArity(f"{fam.value} takes {' or '.join(map(str, ARITY[fam]))} parameters, got {len(self.params)}")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")


def _phase_grid_matrix(grid, label) -> BasisMatrix:
    return BasisMatrix.from_phases(grid, label=label)


def fourier_matrix(n: int = 6) -> BasisMatrix:
    """The n x n Fourier matrix q^(ab)/sqrt(n)."""
    grid = [[root(a * b, n) for b in range(n)] for a in range(n)]
    return _phase_grid_matrix(grid, f"F{n}" if n != 6 else "F(0,0)")


def _fmt(p) -> str:
    return str(p)


def fourier(x1=0, x2=0) -> BasisMatrix:
    z1, z2 = parse_turn(x1), parse_turn(x2)
    grid = []
    for a in range(6):
        row = []
        for b in range(6):
            p: PhaseValue = root(a * b, 6)
            if a % 2 == 1 and b in (1, 4):
                p = multiply(p, z1)
            elif a % 2 == 1 and b in (2, 5):
                p = multiply(p, z2)
            row.append(p)
        grid.append(row)
    return _phase_grid_matrix(grid, f"F({_fmt(x1)},{_fmt(x2)})")


def fourier_transposed(x1=0, x2=0) -> BasisMatrix:
    return fourier(x1, x2).transpose().relabel(f"F^T({_fmt(x1)},{_fmt(x2)})")


_BJORCK_ROW = [root(0), special("d", Fraction(1, 4)), special("d", Fraction(1, 2)),
               root(3, 4), special("dbar", Fraction(1, 2)), special("dbar", Fraction(1, 4))]


def bjorck(conjugate: bool = False) -> BasisMatrix:
    row = [p.conjugate() for p in _BJORCK_ROW] if conjugate else _BJORCK_ROW
    grid = [[row[(b - a) % 6] for b in range(6)] for a in range(6)]
    return _phase_grid_matrix(grid, "conj(C)" if conjugate else "C")


def dita(x=0) -> BasisMatrix:
    z = parse_turn(x)
    zb = z.conjugate()
    one, m1, i, mi = root(0), root(1, 2), root(1, 4), root(3, 4)
    grid = [
        [one, one, one, one, one, one],
        [one, m1, i, mi, mi, i],
        [one, i, m1, i * z, mi * z, mi],
        [one, mi, i * zb, m1, i, mi * zb],
        [one, mi, mi * zb, i, m1, i * zb],
        [one, i, mi, mi * z, i * z, m1],
    ]
    return _phase_grid_matrix(grid, f"D({_fmt(x)})")


HERMITIAN_COS_BOUND = (math.sqrt(3) - 1) / 2


def hermitian_admissible(theta: float) -> bool:
    return math.cos(theta) <= HERMITIAN_COS_BOUND + 1e-12


def hermitian_phases(theta: float, branch: int = 1):
    """The unimodular (x, y, z, t) of the Hermitian family at angle theta."""
    if not hermitian_admissible(theta):
        raise OutOfRange(f"cos(theta) = {math.cos(theta):.6g} exceeds (sqrt3-1)/2")
    y = complex(math.cos(theta), math.sin(theta))
    c = math.cos(theta)
    # the square root is imaginary on the admissible range; at the endpoint it
    # magnifies one ulp of theta to ~1e-8, so snap it to zero there
    disc = 1 - 2 * c - 2 * c * c
    root_part = 1j * math.sqrt(disc) if disc > 1e-13 else 0j
    x = 2 * y * (1 + c + branch * root_part) / (1 + 2 * y - y * y)
    z = (1 + 2 * y - y * y) / (y * (-1 + 2 * y + y * y))
    t = x * y * z
    return x, y, z, t


def hermitian(theta: float, branch: int = 1) -> BasisMatrix:
    x, y, z, t = hermitian_phases(theta, branch)
    xc, yc, zc, tc = x.conjugate(), y.conjugate(), z.conjugate(), t.conjugate()
    m = np.array([
        [1, 1, 1, 1, 1, 1],
        [1, -1, -xc, -y, y, xc],
        [1, -x, 1, y, zc, -tc],
        [1, -yc, yc, -1, -tc, tc],
        [1, yc, z, -t, 1, -xc],
        [1, x, -t, t, -x, -1],
    ], dtype=complex) / math.sqrt(6)
    sign = "+" if branch > 0 else "-"
    return BasisMatrix(m, None, f"B({theta:.6g},{sign})")


def twisted_fourier(*xs) -> BasisMatrix:
    """The twisted product form [[F3, F3], [F3 D, -F3 D]]/sqrt(2)."""
    if len(xs) == 2:
        xs = (0,) + tuple(xs)
    if len(xs) != 3:
        raise BadArity("twisted Fourier takes 2 or 3 parameters")
    diag = [parse_turn(x) for x in xs]
    f3 = [[root(a * b, 3) for b in range(3)] for a in range(3)]
    grid = [[None] * 6 for _ in range(6)]
    half = root(1, 2)
    for a in range(3):
        for b in range(3):
            grid[a][b] = f3[a][b]
            grid[a][b + 3] = f3[a][b]
            grid[a + 3][b] = multiply(f3[a][b], diag[b])
            grid[a + 3][b + 3] = multiply(half, grid[a + 3][b])
    return _phase_grid_matrix(grid, "F_D(" + ",".join(_fmt(x) for x in xs) + ")")


def _circ3(first_row):
    return [[first_row[(b - a) % 3] for b in range(3)] for a in range(3)]


def _dag3(block):
    return [[block[b][a].conjugate() for b in range(3)] for a in range(3)]


def _scale3(p, block):
    return [[multiply(p, e) for e in row] for row in block]


def _blocks(tl, tr, bl, br):
    return [tl[a] + tr[a] for a in range(3)] + [bl[a] + br[a] for a in range(3)]


def dita_block_circulant(variant: int = 0) -> BasisMatrix:
    """Block circulant members of the Dita class built from 24th roots.

    Variant 0 is [[C3, C4], [C4, -i C3^dagger]]; variants 1-4 are the four
    [[Ci, Cj], [Cj^dagger, -Ci^dagger]]-type matrices built from C1 and C2.
    """
    w = lambda k: root(k, 24)  # noqa: E731
    variant = int(variant)
    if variant == 0:
        c3 = _circ3([w(0), w(6), w(6)])
        c4 = _circ3([w(15), w(3), w(3)])
        grid = _blocks(c3, c4, c4, _scale3(root(3, 4), _dag3(c3)))
    elif variant in (1, 2, 3, 4):
        c1 = _circ3([w(0), w(11), w(1)])
        c2 = _circ3([w(0), w(5), w(7)])
        neg = root(1, 2)
        d1, d2 = _dag3(c1), _dag3(c2)
        grid = {
            1: lambda: _blocks(c1, c2, d2, _scale3(neg, d1)),
            2: lambda: _blocks(c2, c1, d1, _scale3(neg, d2)),
            3: lambda: _blocks(d1, d2, c2, _scale3(neg, c1)),
            4: lambda: _blocks(d2, d1, c1, _scale3(neg, c2)),
        }[variant]()
    else:
        raise OutOfRange(f"unknown block circulant variant {variant}")
    return _phase_grid_matrix(grid, f"D_bc[{variant}]")


_TAO_LOCK = threading.Lock()
_TAO: BasisMatrix | None = None


def cache_dir() -> Path | None:
    d = os.environ.get("HMK_CACHE_DIR")
    return Path(d) if d else None


def tao(write_cache: bool = True) -> BasisMatrix:
    """Tao's matrix, found by the clique search over third roots of unity."""
    global _TAO
    with _TAO_LOCK:
        if _TAO is not None:
            return _TAO
        from . import io as mio

        cached = cache_dir() / "tao.json" if cache_dir() else None
        if cached is not None and cached.exists():
            _TAO = mio.read_matrix(cached).relabel("S")
            return _TAO
        from .search import SearchAlphabet, dephased_hadamard_cliques

        found = dephased_hadamard_cliques(SearchAlphabet(3))
        if not found:
            raise SearchFailed("no Hadamard matrix over third roots of unity")
        _TAO = found[0].relabel("S")
        if not is_hadamard(_TAO):
            raise SearchFailed("third-root clique is not Hadamard")
        if cached is not None and write_cache:
            cached.parent.mkdir(parents=True, exist_ok=True)
            mio.write_matrix(_TAO, cached)
        return _TAO


def build(spec: FamilySpec) -> BasisMatrix:
    p, fam = spec.params, spec.family
    if fam is Family.Fourier:
        return fourier(*p)
    if fam is Family.FourierTransposed:
        return fourier_transposed(*p)
    if fam is Family.Bjorck:
        return bjorck()
    if fam is Family.BjorckConjugate:
        return bjorck(conjugate=True)
    if fam is Family.Dita:
        return dita(*p)
    if fam is Family.Hermitian:
        return hermitian(float(p[0]), spec.branch)
    if fam is Family.Tao:
        return tao()
    if fam is Family.TwistedFourier:
        return twisted_fourier(*p)
    if fam is Family.DitaBlockCirculant:
        return dita_block_circulant(int(p[0]))
    raise BadArity(f"unknown family {fam}")


def family_listing() -> list[dict]:
    return [
        {"family": f.value, "arity": "/".join(map(str, ARITY[f])), "params": PARAM_DOC[f]}
        for f in Family
    ]


def spec_to_json(spec: FamilySpec) -> str:
    return json.dumps({"family": spec.family.value, "params": [str(x) for x in spec.params], "branch": spec.branch})
