import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantnet.codec import (DecoderState, EncoderState, NoiseModel,
                            QuantizerSpec, damped_decode_step,
                            damped_encode_step, decode_step, encode_step,
                            quantize, quantize_vec)


def test_quantize_pointwise():
    assert quantize(0.5, 3) == 0            # inclusive upper edge of level 0
    assert quantize(0.75, 2) == 1           # interior of level 1
    assert quantize(10.0, 3) == 3           # saturates
    assert quantize(-10.0, 3) == -3
    assert quantize(1.5, 3) == 1            # tie goes to the lower level
    assert quantize(1.5000000001, 3) == 2


def test_quantize_rejects_nonfinite():
    with pytest.raises(ValueError):
        quantize(float("nan"), 3)
    with pytest.raises(ValueError):
        quantize(float("inf"), 3)


def test_quantize_vec_matches_scalar(rng):
    v = rng.uniform(-10, 10, size=200)
    for K in (1, 2, 5):
        q, _ = quantize_vec(v, K)
        assert all(int(qi) == quantize(float(vi), K) for qi, vi in zip(q, v))


def test_quantize_vec_examples():
    q, sat = quantize_vec(np.array([0.0, 0.75, -0.75]), 2)
    assert list(q) == [0, 1, -1] and not sat
    q, sat = quantize_vec(np.zeros(4), 3)
    assert not q.any() and not sat
    q, sat = quantize_vec(np.array([100.0, 0.1]), 1)
    assert list(q) == [1, 0] and sat


@given(st.floats(-1e6, 1e6), st.integers(1, 50))
@settings(max_examples=300, deadline=None)
def test_quantize_properties(z, K):
    q = quantize(z, K)
    assert -K <= q <= K
    assert quantize(-z, K) == -q          # odd symmetry
    if abs(z) <= K + 0.5:
        assert abs(z - q) <= 0.5 + 1e-12  # in-range accuracy


def test_quantize_monotone():
    grid = np.arange(-10, 10, 1e-3)
    for K in (1, 3, 8):
        q, _ = quantize_vec(grid, K)
        assert np.all(np.diff(q) >= 0)


def test_bits_per_coord():
    assert QuantizerSpec(1).bits_per_coord == 1  # 3 levels, zeros unsent
    assert QuantizerSpec(2).bits_per_coord == 2
    assert QuantizerSpec(300).bits_per_coord == 10


def test_encode_forced_by_zero_init():
    st0 = EncoderState.initial(1)
    q, st1 = encode_step(st0, np.array([2.4]), 1.0, 3)
    assert list(q) == [2] and st1.b[0] == pytest.approx(2.0)
    q, st1 = encode_step(st0, np.array([2.4]), 10.0, 3)
    assert list(q) == [0] and st1.b[0] == 0.0


def test_encode_two_steps_hand_simulated():
    st0 = EncoderState.initial(1)
    q1, st1 = encode_step(st0, np.array([1.0]), 1.0, 3)
    assert list(q1) == [1] and st1.b[0] == 1.0
    q2, st2 = encode_step(st1, np.array([1.0]), 0.5, 3)
    assert list(q2) == [0] and st2.b[0] == 1.0


def test_encode_telemetry():
    st0 = EncoderState.initial(1)
    _, st1 = encode_step(st0, np.array([9.0]), 1.0, 3)
    assert st1.saturation_events == 1
    assert st1.max_abs_input == pytest.approx(9.0)
    with pytest.raises(ValueError):
        encode_step(st0, np.array([1.0]), 0.0, 3)


def test_decode_basic():
    d0 = DecoderState.initial(1)
    d1 = decode_step(d0, np.array([2]), 1.0)
    assert d1.xhat[0] == pytest.approx(2.0)
    d2 = decode_step(d1, np.array([0]), 0.5)
    assert d2.xhat[0] == pytest.approx(2.0)


def test_encoder_decoder_coherence(rng):
    # the receiver's reconstruction equals the sender's predictor bit for
    # bit over a long random run
    m, K = 3, 5
    enc = EncoderState.initial(m)
    dec = DecoderState.initial(m)
    s = 1.0
    x = np.zeros(m)
    for _ in range(100):
        x = x + rng.normal(0, 0.3, size=m)
        q, enc = encode_step(enc, x, s, K)
        dec = decode_step(dec, q, s)
        assert np.array_equal(dec.xhat, enc.b)
        s *= 0.97


def test_damped_degenerates_to_ideal(rng):
    m, K = 2, 4
    enc_a = EncoderState.initial(m)
    enc_b = EncoderState.initial(m)
    for _ in range(20):
        x = rng.normal(size=m)
        qa, enc_a = encode_step(enc_a, x, 0.7, K)
        qb, enc_b = damped_encode_step(enc_b, x, 0.7, K, damping=1.0)
        assert np.array_equal(qa, qb)
        assert np.array_equal(enc_a.b, enc_b.b)


def test_damped_formula():
    st = EncoderState(b=np.array([1.0]))
    q, st1 = damped_encode_step(st, np.array([1.0]), 1.0, 3, damping=0.95)
    # innovation 0 -> symbol 0 -> predictor decays by the damping factor
    assert list(q) == [0]
    assert st1.b[0] == pytest.approx(0.95)
    d = DecoderState(xhat=np.array([2.0]))
    d1 = damped_decode_step(d, np.array([0]), 1.0, damping=0.5,
                            noise=np.array([0.25]))
    assert d1.xhat[0] == pytest.approx(1.25)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(damping=0.0)
    with pytest.raises(ValueError):
        NoiseModel(roundoff_amp=-1.0)
    assert NoiseModel().is_ideal()
    assert not NoiseModel(damping=0.95).is_ideal()
