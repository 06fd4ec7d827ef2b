import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digirabi import __version__
from digirabi.export import (
    config_hash,
    jsonable,
    read_density_json,
    read_grid_csv,
    read_wigner_dataset_csv,
    write_density_json,
    write_grid_csv,
    write_sidecar,
    write_wigner_dataset_csv,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(rows=st.lists(finite, min_size=1, max_size=5), cols=st.lists(finite, min_size=1, max_size=5), data=st.data())
@settings(max_examples=30, deadline=None)
def test_grid_round_trip_is_lossless(rows, cols, data, tmp_path_factory):
    grid = np.array(data.draw(st.lists(finite, min_size=len(rows) * len(cols), max_size=len(rows) * len(cols))))
    p = tmp_path_factory.mktemp("g") / "grid.csv"
    write_grid_csv(p, rows, cols, grid.reshape(len(rows), len(cols)), row_label="step")
    r, c, g, label = read_grid_csv(p)
    assert label == "step"
    assert np.array_equal(r, rows) and np.array_equal(c, cols)
    assert np.array_equal(g.ravel(), grid)


def test_empty_grid_is_header_only(tmp_path):
    p = tmp_path / "empty.csv"
    write_grid_csv(p, [], [0.5, 1.0], np.zeros((0, 2)))
    assert p.read_text() == "t_us,0.5,1.0\n"
    r, c, g, _ = read_grid_csv(p)
    assert len(r) == 0 and g.shape == (0, 2)


def test_jsonable_handles_numpy_and_nonfinite():
    obj = {"a": np.float64(1.5), "b": np.arange(3), "c": math.inf, "d": math.nan, "e": np.bool_(True),
           "f": 1 + 2j, 3: (np.int64(4),)}
    out = jsonable(obj)
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": "inf", "d": "nan", "e": True, "f": [1, 2], "3": [4]}
    json.dumps(out, allow_nan=False)


def test_config_hash_is_canonical():
    a = {"x": {"p": 1.0, "q": (1, 2)}, "y": "s"}
    b = {"y": "s", "x": {"q": [1, 2], "p": 1.0}}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "y": "t"})
    assert len(config_hash(a)) == 64


def test_sidecar_fields(tmp_path):
    p = write_sidecar(tmp_path / "s.json", units={"t": "us"}, provenance={"experiment": "x"},
                      cfg_hash="abc", extra={"note": 1})
    rec = json.loads(p.read_text())
    assert rec == {"units": {"t": "us"}, "provenance": {"experiment": "x"}, "config_hash": "abc",
                   "code_version": __version__, "note": 1}


def test_density_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    p = write_density_json(tmp_path / "rho.json", m, {"k": 1})
    assert np.array_equal(read_density_json(p), m)


def test_wigner_dataset_round_trip(tmp_path):
    alphas = np.array([0.1 + 0.2j, -1.0, 0.5j])
    vals = np.array([0.3, -0.1, 0.0])
    p = write_wigner_dataset_csv(tmp_path / "d.csv", alphas, vals, shots=500)
    a, v, s = read_wigner_dataset_csv(p)
    assert np.array_equal(a, alphas) and np.array_equal(v, vals) and list(s) == [500] * 3
    p = write_wigner_dataset_csv(tmp_path / "e.csv", alphas, vals)
    assert read_wigner_dataset_csv(p)[2] is None
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,z\n1,2,3\n")
    with pytest.raises(ValueError):
        read_wigner_dataset_csv(bad)
    bad.write_text("re_alpha,im_alpha,value\n")
    with pytest.raises(ValueError):
        read_wigner_dataset_csv(bad)
