import io
import json

import numpy as np
import pytest

from qillum.errors import ConfigError
from qillum.formats import (
    fmt,
    parse_config,
    parse_psi,
    read_csv_table,
    read_map,
    read_matrix_dump,
    write_grid,
    write_matrix_dump,
    write_pgm,
    write_table,
)
from qillum.hilbert import HermitianOperator
from qillum.scenarios import ScenarioParams, entangled_pair


def test_matrix_dump_roundtrip():
    rho = entangled_pair(ScenarioParams(0.1, 0.01, 2)).rho1
    h = HermitianOperator(rho.matrix + 1e-3j * (np.triu(np.ones((6, 6)), 1) - np.tril(np.ones((6, 6)), -1)))
    buf = io.StringIO()
    write_matrix_dump(h, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "dim 6"
    assert len(lines) == 1 + 36
    assert lines[2].split()[:2] == ["0", "1"]
    np.testing.assert_array_equal(read_matrix_dump(io.StringIO(buf.getvalue())), h.matrix)


def test_matrix_dump_rejects_truncated():
    with pytest.raises(ConfigError):
        read_matrix_dump(io.StringIO("dim 2\n0 0 1 0\n"))


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(7) == "7"
    assert fmt(float("nan")) == "nan"
    assert fmt(float("inf")) == "inf"
    assert fmt(True) == "true"


def test_parse_config():
    cfg = parse_config("# scenario\neta = 0.1\nb=0.01  # noise\n\nd = 4\npsi = uniform\nseed = 7\n")
    assert cfg == {"eta": "0.1", "b": "0.01", "d": "4", "psi": "uniform", "seed": "7"}
    with pytest.raises(ConfigError, match="unknown key 'gamma'"):
        parse_config("gamma = 1")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("eta = 1\nnonsense\n")


def test_parse_psi():
    assert parse_psi("uniform") is None
    np.testing.assert_allclose(parse_psi("0:1, 0:0", 2).amplitudes, [1j, 0])
    psi = parse_psi("0.6:0,0:0.8", 2)
    np.testing.assert_allclose(psi.amplitudes, [0.6, 0.8j])
    with pytest.raises(ConfigError):
        parse_psi("1:0", 2)
    with pytest.raises(ConfigError):
        parse_psi("1:0,1:0", 2)
    with pytest.raises(ConfigError):
        parse_psi("a:b")


def test_csv_json_mirror_roundtrip():
    rows = [{"a": 0.1, "b": 1 / 3, "k": "entangled", "n": 390},
            {"a": 1e-300, "b": -2.5e-17, "k": "unentangled", "n": 1}]
    cols = ("a", "b", "k", "n")
    csv_buf, json_buf = io.StringIO(), io.StringIO()
    write_table(rows, cols, csv_buf, "csv", "qillum test")
    write_table(rows, cols, json_buf, "json", "qillum test")
    assert csv_buf.getvalue().startswith("# qillum test\na,b,k,n\n")
    parsed = read_csv_table(io.StringIO(csv_buf.getvalue()))
    doc = json.loads(json_buf.getvalue())
    assert doc["columns"] == list(cols)
    for src, c, j in zip(rows, parsed, doc["rows"]):
        assert float(c["a"]) == src["a"] == j["a"]
        assert float(c["b"]) == src["b"] == j["b"]
        assert c["k"] == j["k"] and int(c["n"]) == j["n"]


def test_map_io():
    text = "3 2\n0 0.1 0\n0.1 0 0.1\n"
    m = read_map(io.StringIO(text))
    assert (m.width, m.height) == (3, 2)
    buf = io.StringIO()
    write_grid(m.eta_at, buf, ["pixel_error_rate=0.0"])
    assert read_map(io.StringIO(buf.getvalue().rsplit("pixel", 1)[0])).eta_at.tolist() == m.eta_at.tolist()
    assert buf.getvalue().endswith("pixel_error_rate=0.0\n")
    with pytest.raises(ConfigError):
        read_map(io.StringIO("3 2\n0 0 0\n"))
    with pytest.raises(ConfigError):
        read_map(io.StringIO("1 1\n1.5\n"))


def test_pgm():
    buf = io.StringIO()
    write_pgm(np.array([[True, False], [False, False], [True, True]]), buf)
    assert buf.getvalue() == "P2\n2 3\n255\n255 0\n0 0\n255 255\n"
