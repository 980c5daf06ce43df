import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_align.grid import (GridFormatError, grid_from_csv, grid_from_pgm, grid_to_csv,
                                grid_to_pgm, read_pgm)


def test_csv_parse(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("1,2\n3,4")
    np.testing.assert_array_equal(grid_from_csv(p), [[1, 2], [3, 4]])


def test_csv_single_cell(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("0")
    g = grid_from_csv(p)
    assert g.shape == (1, 1) and g[0, 0] == 0


def test_csv_round_trip_random(tmp_path):
    g = np.random.default_rng(3).standard_normal((16, 16))
    # 17 significant digits are enough to pin a double
    p = tmp_path / "in.csv"
    p.write_text("\n".join(",".join(f"{v:.17g}" for v in row) for row in g))
    back = grid_from_csv(p)
    grid_to_csv(back, tmp_path / "out.csv")
    assert np.array_equal(grid_from_csv(tmp_path / "out.csv"), g)


def test_csv_extreme_values_bit_identical(tmp_path):
    g = np.array([[1e-300, 1.5, -2.25]])
    grid_to_csv(g, tmp_path / "x.csv")
    back = grid_from_csv(tmp_path / "x.csv")
    assert back.tobytes() == g.tobytes()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=12))
def test_csv_round_trip_any_finite(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "g.csv"
    g = np.array([values])
    grid_to_csv(g, path)
    assert grid_from_csv(path).tobytes() == g.tobytes()


@pytest.mark.parametrize("text, message", [
    ("1,2\n3", "row 2"),
    ("1,2\n3,x", "row 2, column 2"),
    ("1,nan", "row 1, column 2"),
])
def test_csv_errors_name_position(tmp_path, text, message):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(GridFormatError, match=message):
        grid_from_csv(p)


def test_csv_missing_file(tmp_path):
    with pytest.raises(OSError):
        grid_from_csv(tmp_path / "nope.csv")


def test_pgm_p2_parse(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_text("P2 2 2 255\n0 255 255 0\n")
    np.testing.assert_array_equal(grid_from_pgm(p), [[0, 255], [255, 0]])


def test_pgm_p5_matches_p2(tmp_path):
    p = tmp_path / "b.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 255, 0]))
    np.testing.assert_array_equal(grid_from_pgm(p), [[0, 255], [255, 0]])


def test_pgm_comments_in_header(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_text("P2\n# made by hand\n2 1\n255\n7 9\n")
    np.testing.assert_array_equal(grid_from_pgm(p), [[7, 9]])


def test_pgm_truncated_payload(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_text("P2 2 2 255\n0 255 255\n")
    with pytest.raises(GridFormatError, match="truncated payload"):
        grid_from_pgm(p)


def test_pgm_truncated_binary(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([1, 2, 3]))
    with pytest.raises(GridFormatError, match="truncated payload"):
        grid_from_pgm(p)


@pytest.mark.parametrize("header", [b"P7 2 2 255\n", b"P2 2\n", b"P2 a b 255\n"])
def test_pgm_malformed_header(tmp_path, header):
    p = tmp_path / "h.pgm"
    p.write_bytes(header + b"0 0 0 0\n")
    with pytest.raises(GridFormatError, match="malformed header"):
        grid_from_pgm(p)


def test_pgm_write_exact_payload(tmp_path):
    p = tmp_path / "w.pgm"
    grid_to_pgm(np.array([[0, 255], [255, 0]]), p)
    text = p.read_text().split("\n", 3)
    assert text[0] == "P2" and text[1] == "2 2" and text[2] == "255"
    assert text[3].split() == ["0", "255", "255", "0"]


def test_pgm_normalize_constant_is_zero(tmp_path):
    p = tmp_path / "c.pgm"
    grid_to_pgm(np.full((3, 3), 5.0), p, normalize=True)
    assert np.all(grid_from_pgm(p) == 0)


def test_pgm_normalize_maps_range(tmp_path):
    p = tmp_path / "n.pgm"
    grid_to_pgm(np.array([[-1.0, 0.0, 1.0]]), p, normalize=True)
    np.testing.assert_array_equal(grid_from_pgm(p), [[0, 128, 255]])


def test_pgm_normalize_never_overshoots_maxval(tmp_path):
    # this range scales its maximum to 255 plus one ulp before clipping
    g = np.array([[0.0, 1.0, 54.60466080466008]])
    grid_to_pgm(g, tmp_path / "o.pgm", normalize=True)
    assert grid_from_pgm(tmp_path / "o.pgm").max() == 255


def test_pgm_out_of_range_without_normalize(tmp_path):
    with pytest.raises(ValueError):
        grid_to_pgm(np.array([[300.0]]), tmp_path / "x.pgm")


@pytest.mark.parametrize("binary", [False, True])
def test_pgm_round_trip_integers(tmp_path, binary):
    g = np.random.default_rng(0).integers(0, 256, (9, 7)).astype(float)
    p = tmp_path / "r.pgm"
    grid_to_pgm(g, p, binary=binary)
    back, magic, maxval = read_pgm(p)
    assert magic == ("P5" if binary else "P2") and maxval == 255
    assert np.array_equal(back, g)
