import json

import numpy as np
import pytest

from tvsip import FlowParams, ParameterError, Signal, reconstruct, run_flow, transform
from tvsip.decomp import MeasureCurve
from tvsip.io import (ParseError, format_record, load_decomposition, load_trajectory,
                      read_csv, read_pgm, read_raw, read_signal, save_decomposition,
                      save_trajectory, svg_plot, write_manifest, write_pgm, write_plot,
                      write_rows_csv, write_signal)


def test_csv_round_trip_is_exact(tmp_path, rng):
    s = Signal.from_array(rng.normal(size=37), 0.25)
    write_signal(s, tmp_path / "s.csv")
    back = read_signal(tmp_path / "s.csv")
    assert back.grid == s.grid
    assert np.array_equal(back.values, s.values)


def test_csv_spacing_override(tmp_path):
    write_signal(Signal.from_array([0.0, 1.0, 2.0], 0.5), tmp_path / "s.csv")
    assert read_signal(tmp_path / "s.csv", spacing=2.0).grid.spacing == (2.0,)


def test_csv_reports_bad_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# h=1\n1.0\n2.0\n\nabc\n")
    with pytest.raises(ParseError) as e:
        read_csv(p)
    assert e.value.line == 5
    assert "line 5" in str(e.value)


def test_csv_rejects_2d(tmp_path):
    with pytest.raises(ParameterError):
        write_signal(Signal.from_array(np.zeros((3, 3))), tmp_path / "x.csv")


@pytest.mark.parametrize("binary", [True, False])
@pytest.mark.parametrize("bits", [8, 16])
def test_pgm_round_trip(tmp_path, rng, binary, bits):
    q = rng.integers(0, 2 ** bits, size=(7, 11))
    q[0, 0], q[-1, -1] = 0, 2 ** bits - 1
    s = Signal.from_array(q / (2 ** bits - 1))
    write_pgm(s, tmp_path / "a.pgm", binary=binary, bits=bits)
    back = read_pgm(tmp_path / "a.pgm")
    assert back.grid.shape == (7, 11)
    assert np.allclose(back.values, s.values, atol=1e-12)


def test_pgm_header_comments(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P2\n# comment\n3 2 # trailing\n4\n0 1 2\n3 4 0\n")
    assert np.allclose(read_pgm(p).values, np.array([[0, 1, 2], [3, 4, 0]]) / 4)


def test_pgm_errors(tmp_path):
    p = tmp_path / "bad.pgm"
    p.write_bytes(b"P7\n1 1\n255\n\x00")
    with pytest.raises(ParseError) as e:
        read_pgm(p)
    assert e.value.offset == 0
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(ParseError, match="expected 16 pixel bytes"):
        read_pgm(p)
    p.write_bytes(b"P2\n2 2\n9\n1 2\n3 x\n")
    with pytest.raises(ParseError) as e:
        read_pgm(p)
    assert e.value.line == 5
    p.write_bytes(b"P2\n2 x\n9\n1 2 3 4\n")
    with pytest.raises(ParseError) as e:
        read_pgm(p)
    assert e.value.offset == 5


def test_raw_round_trip_is_bit_identical(tmp_path, rng):
    s = Signal.from_array(rng.normal(size=(9, 5)), (0.5, 0.25))
    write_signal(s, tmp_path / "s.f64")
    back = read_signal(tmp_path / "s.f64")
    assert back.values.tobytes() == s.values.tobytes()
    assert back.grid == s.grid


def test_raw_errors(tmp_path):
    p = tmp_path / "s.f64"
    p.write_bytes(bytes(16))
    with pytest.raises(ParseError, match="sidecar"):
        read_raw(p)
    (tmp_path / "s.json").write_text('{"shape": [3]}')
    with pytest.raises(ParseError, match="expected 24 bytes"):
        read_raw(p)
    (tmp_path / "s.json").write_text('{\n"shape": [2],\n}')
    with pytest.raises(ParseError) as e:
        read_raw(p)
    assert e.value.line == 3


def test_unknown_extension(tmp_path):
    with pytest.raises(ParameterError):
        write_signal(Signal.from_array([1.0, 2.0]), tmp_path / "a.txt")
    with pytest.raises(ParameterError):
        read_signal(tmp_path / "a.txt")


def test_trajectory_and_bands_round_trip(tmp_path):
    f = Signal.from_array(np.r_[np.zeros(10), np.ones(8), np.zeros(14)] + 0.5)
    traj = run_flow(f, FlowParams(dt=0.5, horizon=20))
    back = load_trajectory(save_trajectory(traj, tmp_path / "traj"))
    assert np.array_equal(back.states, traj.states)
    assert np.array_equal(back.subgradients, traj.subgradients)
    assert back.mean == traj.mean and back.params == traj.params
    dec = transform(traj)
    dback = load_decomposition(save_decomposition(dec, tmp_path / "bands"))
    assert np.array_equal(reconstruct(dback).values, reconstruct(dec).values)
    assert np.array_equal(dback.times, dec.times)


def test_format_record_and_rows(tmp_path):
    assert format_record({"a": 0.5, "b": 3, "c": True}) == "a = 0.5\nb = 3\nc = True\n"
    write_rows_csv([{"x": 1.0, "y": 2}, {"x": 0.25, "y": 3}], tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text() == "x,y\n1,2\n0.25,3\n"
    with pytest.raises(ParameterError):
        write_rows_csv([], tmp_path / "e.csv")


def test_manifest_is_plain_json(tmp_path):
    write_manifest(tmp_path / "m.json", {"a": np.float64(0.5), "b": np.arange(2),
                                         "p": tmp_path})
    m = json.loads((tmp_path / "m.json").read_text())
    assert m == {"a": 0.5, "b": [0, 1], "p": str(tmp_path)}


def test_svg_is_deterministic():
    x = np.linspace(0, 1, 20)
    a = svg_plot(x, {"y": x ** 2}, title="t", markers=[0.5])
    assert a == svg_plot(x, {"y": x ** 2}, title="t", markers=[0.5])
    assert a.startswith("<svg") and "polyline" in a and "stroke-dasharray" in a


def test_svg_edge_cases(tmp_path):
    assert "<circle" in svg_plot([1.0], {"y": [2.0]})
    with pytest.raises(ParameterError):
        svg_plot([], {"y": []})
    with pytest.raises(ParameterError):
        svg_plot([1.0, 2.0], {"y": [1.0]})
    c = MeasureCurve(np.arange(3.0), np.zeros(3), np.ones(3), metadata={"xlabel": "d"})
    write_plot(c, tmp_path / "c.svg")
    assert ">d</text>" in (tmp_path / "c.svg").read_text()
    with pytest.raises(ParameterError):
        write_plot(object(), tmp_path / "x.svg")
