import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from erasure_duals.frm import FrmFormatError, dumps, format_complex, loads, parse_entry, read_frm, write_frm

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 5)), elements=finite))
def test_real_round_trip_bit_exact(a):
    assert loads(dumps(a)).tobytes() == a.tobytes()


@given(arrays(np.complex128, st.tuples(st.integers(1, 3), st.integers(1, 4)),
              elements=st.complex_numbers(allow_nan=False, allow_infinity=False)))
def test_complex_round_trip_bit_exact(a):
    assert loads(dumps(a)).tobytes() == a.tobytes()


def test_header_and_layout():
    text = dumps(np.array([[1.0, 2.5], [0.0, -1e-300]]))
    lines = text.splitlines()
    assert lines[0] == "FRM1 real 2 2"
    assert lines[1].split() == ["1", "2.5"]


@pytest.mark.parametrize(
    "value, text",
    [(1 + 2j, "1+2i"), (-0.5 - 0.25j, "-0.5-0.25i"), (1e5 - 1e-5j, "100000-1.0000000000000001e-05i")],
)
def test_complex_formatting(value, text):
    assert format_complex(value) == text
    assert parse_entry(text, True) == value


def test_complex_file_accepts_plain_reals():
    a = loads("FRM1 complex 1 2\n1.5 2-1i\n")
    np.testing.assert_array_equal(a, [[1.5, 2 - 1j]])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "FRM2 real 1 1\n1\n",
        "FRM1 quaternion 1 1\n1\n",
        "FRM1 real 2 2\n1 2\n",
        "FRM1 real 1 2\n1\n",
        "FRM1 real 1 1\nnan\n",
        "FRM1 real 1 1\n1+2i\n",
        "FRM1 complex 1 1\n1 + 2i\n",
        "FRM1 real 0 1\n",
        "FRM1 real a b\n",
    ],
)
def test_malformed(text):
    with pytest.raises(FrmFormatError):
        loads(text)


def test_file_round_trip(tmp_path):
    a = np.random.default_rng(0).standard_normal((3, 5)) * 1e3
    write_frm(tmp_path / "a.frm", a)
    assert read_frm(tmp_path / "a.frm").tobytes() == a.tobytes()
