import numpy as np
import pytest

from freqfuse.specfile import SpectrumFileError, read_spectrum, write_spectrum
from freqfuse.transform import ScalingMode, Spectrum


def test_exact_layout():
    s = Spectrum(np.array([[1.0, -2.5]]), ScalingMode.PAPER_QUARTER)
    data = write_spectrum(s)
    assert data == (b"FFSPEC1\n1 2 paper\n"
                    + b"\x00\x00\x00\x00\x00\x00\xf0\x3f"
                    + b"\x00\x00\x00\x00\x00\x00\x04\xc0")


def test_roundtrip(rng):
    s = Spectrum(rng.standard_normal((7, 3)))
    back = read_spectrum(write_spectrum(s))
    assert back.scaling is ScalingMode.ORTHONORMAL
    assert np.array_equal(back.coeffs, s.coeffs)


@pytest.mark.parametrize("data", [
    b"NOPE",
    b"FFSPEC1\n2 2 orthonormal",
    b"FFSPEC1\n1 1 weird\n" + bytes(8),
    b"FFSPEC1\n1 1 paper\n" + bytes(7),
    b"FFSPEC1\n1 1 paper\n\x00\x00\x00\x00\x00\x00\xf8\x7f",  # NaN
])
def test_rejects(data):
    with pytest.raises(SpectrumFileError):
        read_spectrum(data)
