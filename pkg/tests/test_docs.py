import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twoproj.docs import (
    combination_from_doc,
    combination_to_doc,
    dumps,
    grid_function_from_doc,
    grid_function_to_doc,
    load_json,
    matrix_from_doc,
    matrix_to_doc,
    pair_from_doc,
    pair_to_doc,
    word_from_doc,
    word_to_doc,
)
from twoproj.errors import NotAProjection, ParseError, ValidationError
from twoproj.grid import GridSpec, random_grid_function
from twoproj.pairs import random_pair
from twoproj.words import Word, WordCombination


def test_matrix_doc_layout():
    doc = matrix_to_doc(np.array([[1, 2j], [0, -1]]))
    assert doc == {"rows": 2, "cols": 2, "entries": [[1.0, 0.0], [0.0, 2.0], [0.0, 0.0], [-1.0, 0.0]]}


def test_matrix_doc_accepts_plain_numbers():
    m = matrix_from_doc({"rows": 1, "cols": 2, "entries": [1, [0, 3]]})
    np.testing.assert_array_equal(m, [[1, 3j]])


@pytest.mark.parametrize(
    "doc, error",
    [
        ({"rows": 2}, ParseError),
        ({"rows": 1, "cols": 1, "entries": ["x"]}, ParseError),
        ({"rows": 1, "cols": 1, "entries": [True]}, ParseError),
        ({"rows": 1, "cols": 2, "entries": [1]}, ValidationError),
        ({"rows": 0, "cols": 1, "entries": []}, ValidationError),
        ({"rows": 1, "cols": 1, "entries": [float("nan")]}, ValidationError),
    ],
)
def test_matrix_doc_errors(doc, error):
    with pytest.raises(error):
        matrix_from_doc(doc)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_pair_round_trip(dim, seed):
    pair = random_pair(dim, np.random.default_rng(seed))
    back = pair_from_doc(json.loads(dumps(pair_to_doc(pair))))
    np.testing.assert_array_equal(back.p, pair.p)
    np.testing.assert_array_equal(back.q, pair.q)


def test_pair_doc_errors():
    eye = matrix_to_doc(np.eye(2))
    with pytest.raises(ParseError):
        pair_from_doc({"p": eye})
    with pytest.raises(ValidationError):
        pair_from_doc({"dim": 3, "p": eye, "q": eye})
    with pytest.raises(NotAProjection):
        pair_from_doc({"p": eye, "q": matrix_to_doc(2 * np.eye(2))})


def test_word_and_combination_round_trip():
    w = Word("D", 3)
    assert word_from_doc(word_to_doc(w)) == w
    c = WordCombination(1 - 2j, [(0.5, Word("A", 1)), (1j, Word("B", 0))], "complement")
    back = combination_from_doc(json.loads(dumps(combination_to_doc(c))))
    assert back.lambda0 == c.lambda0 and back.mode == c.mode
    assert list(back.terms) == list(c.terms)


def test_combination_doc_errors():
    with pytest.raises(ParseError):
        combination_from_doc({"terms": [{"re": 1}]})
    with pytest.raises(ValidationError):
        combination_from_doc({"terms": [{"family": "Z"}]})
    with pytest.raises(ParseError):
        combination_from_doc([])


def test_grid_function_round_trip(rng):
    f = random_grid_function(GridSpec(7), rng)
    back = grid_function_from_doc(json.loads(dumps(grid_function_to_doc(f))))
    np.testing.assert_array_equal(back.values, f.values)
    with pytest.raises(ParseError):
        grid_function_from_doc({"values": []})


def test_dumps_is_deterministic():
    doc = {"b": np.float64(0.5), "a": np.arange(3), "c": np.bool_(True), "z": 1 + 2j, "inf": float("inf")}
    text = dumps(doc)
    assert text == dumps(dict(reversed(list(doc.items()))))
    assert json.loads(text) == {"a": [0, 1, 2], "b": 0.5, "c": True, "inf": "inf", "z": [1.0, 2.0]}


def test_load_json_errors(tmp_path):
    with pytest.raises(ValidationError):
        load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_json(bad)
