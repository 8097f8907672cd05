import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from koopkit.errors import CSVFormatError
from koopkit.io import (
    build_manifest,
    read_complex_csv,
    read_complex_matrix,
    read_csv,
    sha256sum,
    thread_cap,
    verify_manifest,
    write_complex_csv,
    write_complex_matrix,
    write_csv,
    write_json,
)
from koopkit.systems import SnapshotPairSet

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_round_trip_small_matrix(tmp_path):
    m = np.array([[1.0, -2.5], [1e-300, 3.0e300], [np.pi, -0.0]])
    write_csv(tmp_path / "m.csv", ["a", "b"], m)
    names, back = read_csv(tmp_path / "m.csv")
    assert names == ["a", "b"]
    np.testing.assert_array_equal(back, m)


@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)), elements=finite))
def test_round_trip_is_bit_exact(tmp_path_factory, m):
    path = tmp_path_factory.mktemp("csv") / "m.csv"
    write_csv(path, [f"c{i}" for i in range(m.shape[1])], m)
    _, back = read_csv(path)
    assert back.tobytes() == m.tobytes() or np.array_equal(back, m)
    # Signed zeros compare equal but must also survive.
    np.testing.assert_array_equal(np.signbit(back), np.signbit(m))


def test_ragged_row_names_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n3\n")
    with pytest.raises(CSVFormatError, match="line 3"):
        read_csv(p)


def test_malformed_numeral(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a\n1.0\nx1\n")
    with pytest.raises(CSVFormatError, match="line 3"):
        read_csv(p)


def test_write_ragged_rows_rejected(tmp_path):
    with pytest.raises(CSVFormatError):
        write_csv(tmp_path / "x.csv", ["a", "b"], [[1, 2], [3]])


def test_write_non_finite_rejected(tmp_path):
    with pytest.raises(CSVFormatError):
        write_csv(tmp_path / "x.csv", ["a"], [[np.nan]])


def test_format_is_locale_free(tmp_path):
    write_csv(tmp_path / "x.csv", ["a", "b"], [[0.5, 2]])
    raw = (tmp_path / "x.csv").read_bytes()
    assert raw == b"a,b\n0.5,2\n"


def test_complex_vectors_and_matrices(tmp_path, rng):
    v = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    write_complex_csv(tmp_path / "v.csv", v)
    np.testing.assert_array_equal(read_complex_csv(tmp_path / "v.csv"), v)
    m = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    write_complex_matrix(tmp_path / "m.csv", m)
    np.testing.assert_array_equal(read_complex_matrix(tmp_path / "m.csv"), m)


def test_snapshot_pairs_100d_round_trip(tmp_path, rng):
    x = rng.standard_normal((2500, 100))
    y = rng.standard_normal((2500, 100))
    pairs = SnapshotPairSet(x, y, 1e-4, "gradient-descent")
    pairs.to_csv(tmp_path / "pairs.csv")
    back = SnapshotPairSet.from_csv(tmp_path / "pairs.csv")
    assert back.x.tobytes() == x.tobytes() and back.y.tobytes() == y.tobytes()
    assert back.step_size == 1e-4 and back.system == "gradient-descent"
    back.to_csv(tmp_path / "again.csv")
    assert sha256sum(tmp_path / "pairs.csv") == sha256sum(tmp_path / "again.csv")


def test_snapshot_pairs_header_layout(tmp_path):
    SnapshotPairSet([[1.0, 2.0]], [[3.0, 4.0]], 0.5, "gd").to_csv(tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines() == ["dim,step_size,system", "2,0.5,gd", "1,2,3,4"]


def test_snapshot_pairs_ragged(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("dim,step_size,system\n2,0.1,gd\n1,2,3,4\n1,2,3\n")
    with pytest.raises(CSVFormatError, match="line 4"):
        SnapshotPairSet.from_csv(p)


def test_manifest_checksums(tmp_path):
    write_csv(tmp_path / "a.csv", ["x"], [[1.0]])
    write_json(tmp_path / "sub" / "b.json", {"k": np.float64(2.0)})
    man = build_manifest(tmp_path, "demo", {"s": 1}, {"m": 0.5}, {"t": 1.0})
    write_json(tmp_path / "manifest.json", man)
    paths = [f["path"] for f in man["files"]]
    assert paths == ["a.csv", "sub/b.json"]
    assert verify_manifest(tmp_path, man) == []
    (tmp_path / "a.csv").write_text("x\n2\n")
    assert verify_manifest(tmp_path, man) == ["a.csv"]
    assert json.loads((tmp_path / "manifest.json").read_text())["version"]


@pytest.mark.parametrize("raw,expected", [(None, None), ("4", 4), ("0", 1), ("abc", None)])
def test_thread_cap(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv("KOOPKIT_THREADS", raising=False)
    else:
        monkeypatch.setenv("KOOPKIT_THREADS", raw)
    assert thread_cap() == expected
