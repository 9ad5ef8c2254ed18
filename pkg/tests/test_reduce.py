import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fctklt.blockscan import SubBlockStack
from fctklt.errors import ConfigError, DimensionError
from fctklt.reduce import (
    QuantizedStack,
    dequantize,
    prune,
    quantize,
    quantize_with_step,
    select_channels,
    zero_pad,
)


def stack_of(values, b=None):
    x = np.asarray(values, dtype=float)
    if b is None:
        b = int(round(math.sqrt(x.shape[1])))
    return SubBlockStack(x.reshape(x.shape[0], b, b), 1, x.shape[0])


def test_select_hand_case():
    assert select_channels([5.0, 0.0], 0.95) == 1


def test_select_keep_all():
    lam = np.array([4.0, 2.0, 1.0, 0.5])
    assert select_channels(lam, 1.0) == 4


def test_select_two_of_64():
    lam = np.concatenate([[0.80, 0.155], np.full(62, 0.045 / 62)])
    assert select_channels(lam, 0.95) == 2


def test_select_boundary():
    # first channel holds exactly half
    assert select_channels([1.0, 1.0], 0.5) == 1
    assert select_channels([1.0, 1.0], 0.5000001) == 2


def test_select_zero_spectrum():
    assert select_channels(np.zeros(8), 0.95) == 1


@pytest.mark.parametrize("keep", [0.0, -0.1, 1.01])
def test_select_rejects_keep(keep):
    with pytest.raises(ConfigError):
        select_channels([1.0], keep)


@given(
    st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=64),
    st.floats(0.01, 0.99),
    st.floats(0.01, 0.99),
)
def test_select_monotone(raw, a, b):
    lam = np.sort(np.asarray(raw))[::-1]
    lo, hi = sorted((a, b))
    m_lo, m_hi = select_channels(lam, lo), select_channels(lam, hi)
    assert 1 <= m_lo <= m_hi <= lam.size
    total = lam.sum()
    if total > 0:
        assert lam[:m_hi].sum() / total >= hi - 1e-12
        if m_hi > 1:
            assert lam[: m_hi - 1].sum() / total < hi


def test_prune_and_pad(rng):
    s = SubBlockStack(rng.normal(size=(64, 4, 4)), 8, 8)
    assert np.array_equal(prune(s, 64).blocks, s.blocks)
    assert np.array_equal(prune(s, 1).blocks, s.blocks[:1])
    two = prune(s, 2)
    padded = zero_pad(two, 64)
    assert padded.channels == 64
    assert np.array_equal(padded.blocks[:2], s.blocks[:2])
    assert not padded.blocks[2:].any()
    assert np.array_equal(zero_pad(prune(s, 64), 64).blocks, s.blocks)


def test_prune_rejects_bad_m(rng):
    s = SubBlockStack(rng.normal(size=(4, 2, 2)), 2, 2)
    for m in (0, 5):
        with pytest.raises(ConfigError):
            prune(s, m)
    with pytest.raises(ConfigError):
        zero_pad(s, 3)


def test_quantize_constant_channel():
    qs = quantize(stack_of([[3.25] * 4]), 8)
    assert qs.symbols.tolist() == [[0, 0, 0, 0]]
    assert qs.offsets.tolist() == [3.25] and qs.steps.tolist() == [1.0]
    assert dequantize(qs).vectors().tolist() == [[3.25] * 4]


def test_quantize_extremes_lossless():
    qs = quantize(stack_of([[0.0, 255.0, 255.0, 0.0]]), 8)
    assert qs.symbols.tolist() == [[0, 255, 255, 0]]
    assert qs.steps[0] == 1.0
    assert dequantize(qs).vectors().tolist() == [[0.0, 255.0, 255.0, 0.0]]


def test_quantize_root5_pair():
    r = math.sqrt(5.0)
    qs = quantize(stack_of([[-r, r, -r, r]]), 8)
    assert qs.steps[0] == pytest.approx(2 * r / 255, rel=1e-15)
    err = np.abs(dequantize(qs).vectors() - [[-r, r, -r, r]])
    assert err.max() <= r / 255 + 1e-12


@pytest.mark.parametrize("q", [4, 8, 12, 16])
def test_error_bound(q, rng):
    x = rng.normal(size=(6, 64)) * rng.uniform(0.1, 100, size=(6, 1)) + rng.normal(size=(6, 1)) * 50
    s = stack_of(x, 8)
    qs = quantize(s, q)
    assert qs.symbols.min() >= 0 and qs.symbols.max() <= (1 << q) - 1
    err = np.abs(dequantize(qs).vectors() - x)
    assert np.all(err <= qs.steps[:, None] / 2 + 1e-12)
    if q == 16:
        ranges = x.max(axis=1) - x.min(axis=1)
        assert np.all(err.max(axis=1) <= ranges / (2 * 65535) + 1e-12)


def test_uniform_noise_rms(rng):
    x = rng.uniform(0, 1, size=(1, 256 * 256))
    qs = quantize(stack_of(x, 256), 8)
    rms = np.sqrt(np.mean((dequantize(qs).vectors() - x) ** 2))
    expected = qs.steps[0] / math.sqrt(12)
    assert expected / 2 < rms < expected * 2
    assert rms == pytest.approx(expected, rel=0.05)


def test_common_step(rng):
    x = rng.normal(size=(3, 16)) * [[100.0], [5.0], [0.5]]
    qs = quantize_with_step(stack_of(x, 4), 0.25)
    assert np.all(qs.steps == 0.25)
    # offsets lie on the step grid so zero is a reconstruction level
    assert np.allclose(qs.offsets / 0.25, np.round(qs.offsets / 0.25))
    assert (1 << qs.quant_bits) - 1 >= qs.symbols.max()
    assert (1 << (qs.quant_bits - 1)) - 1 < qs.symbols.max() or qs.quant_bits == 1
    assert np.abs(dequantize(qs).vectors() - x).max() <= 0.125 + 1e-12


def test_common_step_bit_limit():
    x = [[0.0, 1000.0, 0.0, 0.0]]
    with pytest.raises(ConfigError):
        quantize_with_step(stack_of(x), 0.01, max_bits=8)
    with pytest.raises(ConfigError):
        quantize_with_step(stack_of(x), 0.0)


def test_quantized_stack_validation():
    sym = np.zeros((1, 4), dtype=np.int64)
    with pytest.raises(ConfigError):
        QuantizedStack(sym, np.zeros(1), np.ones(1), 0, 2, 1, 1)
    with pytest.raises(DimensionError):
        QuantizedStack(sym + 16, np.zeros(1), np.ones(1), 4, 2, 1, 1)
    with pytest.raises(DimensionError):
        QuantizedStack(sym, np.zeros(1), np.zeros(1), 4, 2, 1, 1)


@settings(max_examples=50)
@given(
    st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=4, max_size=4),
    st.integers(1, 16),
)
def test_quantize_bound_property(values, q):
    x = np.asarray([values])
    qs = quantize(stack_of(x), q)
    err = np.abs(dequantize(qs).vectors() - x)
    assert np.all(err <= qs.steps[0] / 2 * (1 + 1e-9) + 1e-12)
