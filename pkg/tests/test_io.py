import json

import numpy as np
import pytest

from hmk.catalog import bjorck, fourier, hermitian
from hmk.core import BasisMatrix, ValidationError
from hmk.geometry import random_basis
from hmk.io import ParseError, matrix_from_json, matrix_to_json, read_matrix, write_matrix


@pytest.mark.parametrize("m", [fourier(0, 0), fourier("1/6", "1/12"), bjorck(), fourier("c1", 0),
                               fourier("9/24+c2", 0)])
def test_exact_round_trip(tmp_path, m):
    p = tmp_path / "m.json"
    write_matrix(m, p)
    back = read_matrix(p)
    assert back.exact_entries == m.exact_entries
    assert np.array_equal(back.entries, m.entries)
    assert back.label == m.label


def test_float_round_trip(tmp_path):
    h = hermitian(2.0)
    write_matrix(h, tmp_path / "h.json")
    back = read_matrix(tmp_path / "h.json")
    assert back.exact_entries is None
    assert np.max(np.abs(back.entries - h.entries)) < 1e-15


def test_non_hadamard_float_round_trip():
    b = random_basis(6, 3)
    doc = matrix_to_json(b)
    assert doc["normalization"] == "none"
    back = matrix_from_json(json.loads(json.dumps(doc)))
    assert np.max(np.abs(back.entries - b.entries)) < 1e-15


def test_bad_modulus_rejected():
    doc = matrix_to_json(fourier(0, 0))
    doc["entries"][1][1] = {"re": 0.5, "im": 0.0}
    with pytest.raises(ValidationError):
        matrix_from_json(doc)


def test_non_unitary_rejected():
    doc = matrix_to_json(fourier(0, 0))
    doc["entries"][1][1] = {"root": {"num": 1, "den": 7}}
    with pytest.raises(ValidationError):
        matrix_from_json(doc)
    assert matrix_from_json(doc, validate=False).dimension == 6


@pytest.mark.parametrize("mutate, msg", [
    (lambda d: d.pop("entries"), "entries"),
    (lambda d: d.__setitem__("dimension", "six"), "dimension"),
    (lambda d: d["entries"][2].__setitem__(3, {"root": {"num": 1}}), r"entries\[2\]\[3\]"),
    (lambda d: d["entries"][0].__setitem__(0, {"special": "x"}), "special"),
    (lambda d: d.__setitem__("normalization", "sqrt"), "normalization"),
])
def test_parse_errors_name_the_field(mutate, msg):
    doc = matrix_to_json(fourier(0, 0))
    mutate(doc)
    with pytest.raises(ParseError, match=msg):
        matrix_from_json(doc)


def test_json_syntax_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "dimension": 6,\n "entries": [\n')
    with pytest.raises(ParseError, match="line"):
        read_matrix(p)


def test_legacy_float_matrix_loads():
    f = fourier(0, 0).entries
    doc = {"dimension": 6, "entries": [[{"float_angle": float(np.angle(z))} for z in row] for row in f]}
    m = matrix_from_json(doc)
    assert m.exact_entries is None
    assert isinstance(m, BasisMatrix)
