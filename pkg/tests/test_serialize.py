from __future__ import annotations

import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from qudit_surface.serialize import dumps, to_plain


def test_keys_sorted_and_nested():
    text = dumps({"b": 1, "a": {"z": [1, 2], "y": None}}, indent=None)
    assert text == '{"a": {"y": null, "z": [1, 2]}, "b": 1}'


def test_numpy_and_complex_values():
    obj = {"x": np.int64(3), "y": np.float32(0.5), "z": 1 + 2j, "w": np.array([1, 2]), "t": np.bool_(True)}
    assert to_plain(obj) == {"x": 3, "y": 0.5, "z": [1.0, 2.0], "w": [1, 2], "t": True}


def test_floats_keep_marker_and_nonfinite_is_null():
    text = dumps([1.0, 0.0, -2.0, 1e30, float("nan"), float("inf")], indent=None)
    assert text == "[1.0, 0.0, -2.0, 1e+30, null, null]"
    for v in json.loads(text)[:4]:
        assert isinstance(v, float)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip_is_exact(x):
    back = json.loads(dumps(x))
    assert back == x and isinstance(back, float)


@given(st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False, allow_infinity=False) | st.text(),
    lambda kids: st.lists(kids) | st.dictionaries(st.text(), kids),
    max_leaves=20,
))
def test_output_is_valid_json_and_stable(obj):
    a = dumps(obj)
    assert dumps(json.loads(a)) == a


def test_to_json_hook():
    class Thing:
        def to_json(self):
            return {"v": math.pi}

    assert json.loads(dumps(Thing())) == {"v": math.pi}
