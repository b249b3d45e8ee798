import numpy as np
import pytest
from mpmath import mp

from bakercrypt import nist
from bakercrypt.errors import InsufficientBits

# 100-bit worked-example sequence of SP 800-22 (leading binary digits of pi)
EPSILON_100 = (
    "11001001000011111101101010100010001000010110100011"
    "00001000110100110001001100011001100010100010111000"
)


def _bits(text: str) -> np.ndarray:
    return np.array([int(c) for c in text], dtype=np.int8)


@pytest.mark.parametrize("fn, text, expected", [
    (nist.frequency, "1011010101", 0.527089),
    (nist.frequency, EPSILON_100, 0.109599),
    (lambda b: nist.block_frequency(b, 3), "0110011010", 0.801252),
    (lambda b: nist.block_frequency(b, 10), EPSILON_100, 0.706438),
    (nist.runs, "1001101011", 0.147232),
    (nist.runs, EPSILON_100, 0.500798),
    (nist.cumulative_sums, "1011010111", 0.4116588),
    (nist.cumulative_sums, EPSILON_100, 0.219194),
    (lambda b: nist.cumulative_sums(b, reverse=True), EPSILON_100, 0.114866),
    (lambda b: nist.approximate_entropy(b, 3), "0100110101", 0.261961),
    (lambda b: nist.approximate_entropy(b, 2), EPSILON_100, 0.235301),
])
def test_reference_examples(fn, text, expected):
    # reference values are printed to six or seven digits
    assert fn(_bits(text)) == pytest.approx(expected, abs=5e-7)


@pytest.fixture(scope="module")
def pi_bits() -> np.ndarray:
    n = 10**6
    mp.prec = n + 64
    value = int(mp.pi * (mp.mpf(2) ** (n - 2)))
    return np.array([int(c) for c in bin(value)[2:n + 2]], dtype=np.int8)


def test_pi_binary_expansion_prefix(pi_bits):
    assert "".join(map(str, pi_bits[:100])) == EPSILON_100


@pytest.mark.parametrize("fn, expected", [
    (nist.frequency, 0.578211),
    (lambda b: nist.block_frequency(b, 128), 0.380615),
    (nist.runs, 0.419268),
    (nist.cumulative_sums, 0.628308),
    (lambda b: nist.cumulative_sums(b, reverse=True), 0.663369),
    (lambda b: nist.approximate_entropy(b, 10), 0.361595),
])
def test_pi_million_bits(pi_bits, fn, expected):
    assert fn(pi_bits) == pytest.approx(expected, abs=5e-7)


def test_all_zero_stream_fails():
    results = nist.nist_subset(np.zeros(10**4, dtype=np.int8))
    assert results[0].name == "Frequency"
    assert results[0].p_value < 1e-10
    assert not results[0].passed


def test_pass_flag_matches_threshold(pi_bits):
    for r in nist.nist_subset(pi_bits):
        assert r.passed == (r.p_value >= nist.ALPHA)
        assert 0.0 <= r.p_value <= 1.0


def test_subset_names():
    names = [r.name for r in nist.nist_subset(np.random.default_rng(0).integers(0, 2, 5000))]
    assert names == [
        "Frequency", "Block Frequency (m=128)", "Runs",
        "Cumulative Sums (forward)", "Cumulative Sums (reverse)", "Approximate Entropy (m=10)",
    ]


def test_insufficient_bits():
    with pytest.raises(InsufficientBits):
        nist.nist_subset(np.ones(99, dtype=np.int8))
    with pytest.raises(InsufficientBits):
        nist.block_frequency(np.ones(50, dtype=np.int8), 128)


def test_non_binary_rejected():
    with pytest.raises(ValueError):
        nist.frequency([0, 1, 2])


def test_random_bits_mostly_pass():
    rng = np.random.default_rng(12)
    passes = [all(r.passed for r in nist.nist_subset(rng.integers(0, 2, 10**5))) for _ in range(20)]
    assert sum(passes) >= 16
