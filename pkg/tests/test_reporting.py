import json
import math

import numpy as np

from mixminimax.reporting import (
    csv_text,
    dumps_json,
    format_value,
    package_version,
    read_csv,
    svg_loglog,
    write_csv,
    write_json,
)


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(math.pi)) == math.pi
    assert float(format_value(np.float64(1e-300))) == 1e-300
    assert format_value(True) == "true" and format_value(np.int64(5)) == "5"
    assert format_value(None) == ""


def test_csv_round_trip(tmp_path):
    rows = [{"n": 10, "x": 1 / 3}, {"n": 20, "x": 2.5}]
    path = write_csv(str(tmp_path / "out" / "t.csv"), ("n", "x"), rows, {"seed": 4, "regime": "l2"})
    text = open(path).read()
    assert text.startswith(f"# artifact {package_version()}\n# seed 4\n# config ")
    cols, parsed = read_csv(path)
    assert cols == ["n", "x"]
    assert float(parsed[0]["x"]) == 1 / 3
    assert text == csv_text(("n", "x"), rows, {"regime": "l2", "seed": 4})


def test_json_handles_numpy_and_non_finite(tmp_path):
    path = write_json(str(tmp_path / "r.json"), {"a": np.arange(3), "b": np.inf, "c": np.bool_(True)}, {"seed": 1})
    data = json.load(open(path))
    assert data["a"] == [0, 1, 2] and data["b"] == "inf" and data["c"] is True
    assert data["meta"]["seed"] == 1 and data["meta"]["package"] == "artifact"
    assert dumps_json({"b": 1, "a": 2}).index('"a"') < dumps_json({"b": 1, "a": 2}).index('"b"')


def test_svg(tmp_path):
    path = svg_loglog(str(tmp_path / "p.svg"), {"one": ([10, 100, 1000], [1.0, 0.1, 0.0]),
                                                "two": ([10, 100], [2.0, 0.3])}, {"seed": 2}, title="t<1>")
    text = open(path).read()
    assert text.count("<polyline") == 2 and "t&lt;1&gt;" in text and '"seed":2' in text
    assert text.strip().endswith("</svg>")
