"""Matrix JSON reading and writing.

Schema::

    {"dimension": 6, "normalization": "inv_sqrt_dim" | "none",
     "entries": [[PhaseValueJSON, ...], ...], "label": "..."}

with PhaseValueJSON one of ``{"root": {"num": k, "den": n}}``,
``{"special": "d", "root": {...}}`` (optionally with ``"power": p``) or ``{"float_angle": radians}``.
Float-only matrices that are not Hadamard are stored with
``"normalization": "none"`` and ``{"re": .., "im": ..}`` entries.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import (
    SPECIAL_SYMBOLS,
    BasisMatrix,
    FloatPhase,
    HMKError,
    PhaseValue,
    RationalRoot,
    SpecialConstant,
    SpecialProduct,
    TurnFraction,
    ValidationError,
    DEFAULT_TOL,
    Tolerances,
)


class ParseError(HMKError):
    pass


def phase_to_json(p: PhaseValue) -> dict:
    if isinstance(p, RationalRoot):
        return {"root": {"num": p.root.numerator, "den": p.root.denominator}}
    if isinstance(p, SpecialProduct):
        out = {"special": p.constant.symbol,
               "root": {"num": p.root.numerator, "den": p.root.denominator}}
        if p.power != 1:
            out["power"] = p.power
        return out
    if isinstance(p, FloatPhase):
        return {"float_angle": p.angle_rad}
    raise TypeError(f"not a phase: {p!r}")


def _turn(obj, where) -> TurnFraction:
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise ParseError(f"{where}: root must be an object with 'num' and 'den'")
    num, den = obj["num"], obj["den"]
    if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or isinstance(den, bool):
        raise ParseError(f"{where}: root num/den must be integers")
    if den <= 0:
        raise ParseError(f"{where}: root denominator must be positive")
    return TurnFraction(num, den)


def phase_from_json(obj, where: str = "entry") -> PhaseValue:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    if "float_angle" in obj:
        if set(obj) != {"float_angle"} or not isinstance(obj["float_angle"], (int, float)):
            raise ParseError(f"{where}: malformed float_angle")
        return FloatPhase(float(obj["float_angle"]))
    if "special" in obj:
        sym = obj["special"]
        if sym not in SPECIAL_SYMBOLS:
            raise ParseError(f"{where}: unknown special constant {sym!r}")
        extra = set(obj) - {"special", "root", "power"}
        if extra:
            raise ParseError(f"{where}: unexpected keys {sorted(extra)}")
        r = _turn(obj["root"], where) if "root" in obj else TurnFraction(0)
        pw = obj.get("power", 1)
        if not isinstance(pw, int) or isinstance(pw, bool) or pw < 1:
            raise ParseError(f"{where}: power must be a positive integer")
        return SpecialProduct(SpecialConstant(sym), r, pw)
    if "root" in obj:
        if set(obj) != {"root"}:
            raise ParseError(f"{where}: unexpected keys next to 'root'")
        return RationalRoot(_turn(obj["root"], where))
    if set(obj) == {"re", "im"}:
        z = complex(obj["re"], obj["im"])
        if abs(abs(z) - 1) > 1e-12:
            raise ValidationError(f"{where}: entry of modulus {abs(z):.6g} in a unimodular grid")
        return FloatPhase(math.atan2(z.imag, z.real))
    raise ParseError(f"{where}: unrecognized phase {obj!r}")


def matrix_to_json(m: BasisMatrix) -> dict:
    n = m.dimension
    if m.exact_entries is not None:
        entries = [[phase_to_json(p) for p in row] for row in m.exact_entries]
        norm = "inv_sqrt_dim"
    elif np.allclose(np.abs(m.entries), 1 / math.sqrt(n), atol=1e-12, rtol=0):
        entries = [[{"float_angle": float(np.angle(z))} for z in row] for row in m.entries]
        norm = "inv_sqrt_dim"
    else:
        entries = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in m.entries]
        norm = "none"
    return {"dimension": n, "normalization": norm, "entries": entries, "label": m.label}


def matrix_from_json(doc, tol: Tolerances = DEFAULT_TOL, validate: bool = True) -> BasisMatrix:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    for key in ("dimension", "entries"):
        if key not in doc:
            raise ParseError(f"top level: missing field {key!r}")
    n = doc["dimension"]
    if not isinstance(n, int) or n < 1:
        raise ParseError("dimension: expected a positive integer")
    norm = doc.get("normalization", "inv_sqrt_dim")
    if norm not in ("inv_sqrt_dim", "none"):
        raise ParseError(f"normalization: unknown value {norm!r}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ParseError(f"entries: expected a {n}x{n} array")
    label = doc.get("label", "")
    if norm == "none":
        vals = np.empty((n, n), dtype=complex)
        for a, row in enumerate(rows):
            for b, e in enumerate(row):
                where = f"entries[{a}][{b}]"
                if isinstance(e, dict) and set(e) == {"re", "im"}:
                    vals[a, b] = complex(e["re"], e["im"])
                else:
                    vals[a, b] = phase_from_json(e, where).realize()
        m = BasisMatrix(vals, None, label)
    else:
        grid = [[phase_from_json(e, f"entries[{a}][{b}]") for b, e in enumerate(row)]
                for a, row in enumerate(rows)]
        m = BasisMatrix.from_phases(grid, label)
        if any(isinstance(p, FloatPhase) for row in grid for p in row):
            m = BasisMatrix(m.entries, None if all(isinstance(p, FloatPhase) for row in grid for p in row) else grid,
                            label)
    if validate:
        m.validate(tol)
    return m


def write_matrix(m: BasisMatrix, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(m), indent=1) + "\n")


def read_matrix(path, tol: Tolerances = DEFAULT_TOL, validate: bool = True) -> BasisMatrix:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return matrix_from_json(doc, tol, validate)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
