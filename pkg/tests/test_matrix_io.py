import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hh_opverify.linalg import HermitianityError, HermitianMatrix
from hh_opverify.matrix_io import (
    MatrixFormatError,
    dump_matrix,
    format_entry,
    load_matrix,
    parse_entry,
    parse_matrix,
    save_matrix,
)
from hh_opverify.sampling import random_hermitian


@pytest.mark.parametrize("tok, z", [
    ("1", 1), ("-2.5", -2.5), ("1+2i", 1 + 2j), ("1-2i", 1 - 2j),
    ("+.5e-3-1E2i", 0.5e-3 - 100j), ("0-0i", 0j),
])
def test_parse_entry(tok, z):
    assert parse_entry(tok) == z


@pytest.mark.parametrize("tok", ["", "i", "1+i", "2i", "1+2j", "1,0", "nan"])
def test_parse_entry_rejects(tok):
    with pytest.raises(ValueError):
        parse_entry(tok)


def test_format_roundtrips_exactly():
    for z in (1 / 3, -1e-300 + 2.5j, 0.1 - 0.7j):
        assert parse_entry(format_entry(z)) == z


def test_identity_roundtrip(tmp_path):
    path = tmp_path / "I.txt"
    save_matrix(path, HermitianMatrix.identity(3))
    assert load_matrix(path) == HermitianMatrix.identity(3)


def test_hermitian_pair_accepted():
    A = parse_matrix("dim 2\n# comment\n\n3 1+2i\n1-2i 0\n")
    assert A.data[0, 1] == 1 + 2j and A.data[1, 0] == 1 - 2j


def test_non_hermitian_rejected_naming_pair():
    with pytest.raises(HermitianityError, match="1.*2|2.*1"):
        parse_matrix("dim 2\n3 1+2i\n1+2i 0\n")


@pytest.mark.parametrize("text, line, column", [
    ("dims 2\n1 0\n0 1\n", 1, 1),
    ("dim x\n", 1, 2),
    ("dim 2\n1 0\n0 1q\n", 3, 2),
    ("dim 2\n1 0 0\n0 1\n", 2, None),
    ("dim 2\n1 0\n", 2, None),
])
def test_parse_errors_cite_position(text, line, column):
    with pytest.raises(MatrixFormatError) as info:
        parse_matrix(text)
    assert info.value.line == line and info.value.column == column
    assert f"line {line}" in str(info.value)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 8))
def test_random_roundtrip(seed, dim):
    A = random_hermitian(np.random.default_rng(seed), dim)
    B = parse_matrix(dump_matrix(A))
    assert np.max(np.abs(A.data - B.data)) <= 1e-12
