import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kslab.exact import Q, RatMatrix
from kslab.laurent import Series
from kslab.textio import (SeriesSyntaxError, matrix_from_json, matrix_to_json, parse_series,
                          render_series, series_from_json, series_to_json)

from strategies import matrix_series, scalar_series

# (input, canonical rendering), written by hand
CORPUS = [
    ("z - 1/4 z^-2", "z - 1/4 z^-2"),
    ("0", "0"),
    ("1", "1"),
    ("-z", "-z"),
    ("z^1", "z"),
    ("2/4 z^3", "1/2 z^3"),
    ("z^-2 + z", "z + z^-2"),
    ("3 - 3", "0"),
    ("1 - 1/4 z^-2 + 5 z^-5", "1 - 1/4 z^-2 + 5 z^-5"),
    ("  7 z^-1   +2 z^-1 ", "9 z^-1"),
    ("+z^2 - 0 z", "z^2"),
    ("1 + z^-1 + O(z^-11)", "1 + z^-1 + O(z^-11)"),
    ("O(z^-4)", "O(z^-4)"),
    ("z^-5 + O(z^-3)", "O(z^-3)"),
    ("5/48 zeta^-3 + 1", "1 + 5/48 z^-3"),
    ("-12/8", "-3/2"),
    ("[[1, 0], [0, -1]] z^-1", "[[1, 0], [0, -1]] z^-1"),
    ("[[0, 1], [0, 0]] + [[0, 0], [1, 0]] z", "[[0, 0], [1, 0]] z + [[0, 1], [0, 0]]"),
    ("[[1/2, 0], [0, 1/2]] - [[1/2, 0], [0, -1/2]] z^0", "[[0, 0], [0, 1]]"),
    ("z^10 - z^-10", "z^10 - z^-10"),
]


@pytest.mark.parametrize("text,canonical", CORPUS)
def test_round_trip_corpus(text, canonical):
    f = parse_series(text)
    assert render_series(f) == canonical
    assert render_series(parse_series(canonical)) == canonical
    assert parse_series(canonical).agrees_with(f)


def test_corpus_size():
    assert len(CORPUS) == 20


def test_parse_example():
    f = parse_series("z - 1/4 z^-2")
    assert dict(f.terms()) == {1: Q(1), -2: Q(-1, 4)}
    assert f.floor is None
    assert parse_series("0").is_zero()
    assert dict(parse_series("0").terms()) == {}


def test_zeta_variable():
    f = parse_series("zeta + 1/2 zeta^-2", var="zeta")
    assert render_series(f, var="zeta") == "zeta + 1/2 zeta^-2"
    with pytest.raises(SeriesSyntaxError):
        parse_series("z + zeta")


@pytest.mark.parametrize("text,pos", [
    ("z + * 3", 4),
    ("1 z^1/2", 4),
    ("z ^", 3),
    ("1 +", 3),
    ("[[1, 0], [0]] z", 0),
])
def test_syntax_error_position(text, pos):
    with pytest.raises(SeriesSyntaxError) as err:
        parse_series(text)
    assert err.value.pos >= pos
    assert "position" in str(err.value)


def test_syntax_error_points_at_bad_character():
    with pytest.raises(SeriesSyntaxError) as err:
        parse_series("1 + 2 q^3")
    assert err.value.pos == 6


@given(scalar_series(floor=st.sampled_from([None, -8])))
def test_scalar_render_parse_identity(f):
    text = render_series(f)
    g = parse_series(text)
    assert g == f
    assert render_series(g) == text


@given(matrix_series(floor=st.sampled_from([None, -5])))
def test_matrix_render_parse_identity(f):
    if not f.terms():
        return  # "0" and "O(z^k)" carry no matrix size
    g = parse_series(render_series(f))
    assert g == f


@given(matrix_series(floor=st.sampled_from([None, -5])))
def test_json_byte_identical(f):
    blob = json.dumps(series_to_json(f), sort_keys=True, indent=2)
    again = json.dumps(series_to_json(series_from_json(json.loads(blob))), sort_keys=True, indent=2)
    assert blob == again
    assert series_from_json(json.loads(blob)) == f


def test_matrix_json():
    m = RatMatrix.from_rows([[Q(1, 3), 0], [-2, 5]])
    assert matrix_to_json(m) == [["1/3", "0"], ["-2", "5"]]
    assert matrix_from_json(matrix_to_json(m)) == m
    assert series_from_json(series_to_json(Series.scalar({-2: Q(-1, 4)}))) == parse_series("-1/4 z^-2")
