import numpy as np
import pytest

from dictsel.matio import MatrixFormatError, format_matrix, parse_matrix, read_matrix, write_matrix


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((7, 5)) * 10.0 ** rng.integers(-300, 300, (7, 5))
    write_matrix(tmp_path / "a.txt", A)
    assert np.array_equal(read_matrix(tmp_path / "a.txt"), A)


def test_format():
    assert format_matrix([[1.0, -2.5]]) == "1 2\n1.0 -2.5\n"
    assert format_matrix(np.array([1.0, 2.0])) == "2 1\n1.0\n2.0\n"


def test_empty_matrices():
    assert parse_matrix("3 0\n").shape == (3, 0)
    assert parse_matrix("0 4\n").shape == (0, 4)


@pytest.mark.parametrize("text", [
    "",
    "2\n1 2\n",
    "a b\n",
    "-1 2\n",
    "2 2\n1 2\n",
    "1 2\n1 2 3\n",
    "1 2\n1 x\n",
    "0 2\n1 2\n",
])
def test_malformed(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix(text)


def test_whitespace_tolerant():
    np.testing.assert_array_equal(parse_matrix("2 2\n\n 1   2\n3\t4\n\n"), [[1, 2], [3, 4]])
