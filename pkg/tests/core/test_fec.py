import itertools

import numpy as np
import pytest
from scipy.special import erfc

from demodkit.channel import add_awgn, sigma2_from_ebn0
from demodkit.fec import (
    TrellisSpec,
    conv_encode,
    theoretical_ber,
    theory_curve,
    viterbi_decode,
    viterbi_decode_hard,
)
from demodkit.modem import build_constellation, hard_demodulate_min_distance, modulate
from demodkit.sampling import Rng


def test_trellis_tables():
    t = TrellisSpec()

    assert t.generators == (0o171, 0o133)
    assert t.taps().tolist() == [[1, 1, 1, 1, 0, 0, 1], [1, 0, 1, 1, 0, 1, 1]]

    for state in range(t.n_states):
        for u in (0, 1):
            following = t.next_state[state, u]
            assert state in t.predecessors[following]
            assert t.state_input[following] == u

    with pytest.raises(ValueError):
        TrellisSpec(3, (171,))


def test_encoder_length_and_termination():
    info = Rng(1).bits(100)
    coded = conv_encode(info)

    assert len(coded) == 2 * (100 + 6)
    assert conv_encode([]).tolist() == [0] * 12


def test_encoder_is_linear():
    a, b = Rng(2).bits(64), Rng(3).bits(64)

    assert np.array_equal(conv_encode(a ^ b), conv_encode(a) ^ conv_encode(b))


def test_free_distance():
    weights = [
        conv_encode(np.array(bits)).sum()
        for bits in itertools.product([0, 1], repeat=8)
        if any(bits)
    ]

    assert min(weights) == 10


@pytest.mark.parametrize("length", [1, 20, 63, 64, 65, 500])
def test_noiseless_round_trip(length):
    info = Rng(4).spawn(length).bits(length)
    coded = conv_encode(info)

    assert np.array_equal(viterbi_decode(1 - 2.0 * coded), info)
    assert np.array_equal(viterbi_decode_hard(coded), info)


@pytest.mark.parametrize("traceback", [1, 3, 7])
def test_short_traceback_still_decodes_clean_input(traceback):
    info = Rng(5).bits(300)
    soft = 1 - 2.0 * conv_encode(info)

    assert np.array_equal(viterbi_decode(soft, traceback=traceback), info)


def test_hard_decoder_corrects_scattered_errors():
    info = Rng(6).bits(400)
    coded = conv_encode(info)

    for position in (10, 200, 450, 700):
        coded[position] ^= 1

    assert np.array_equal(viterbi_decode_hard(coded), info)


def test_soft_decoder_is_maximum_likelihood():
    t = TrellisSpec()
    codewords = {
        bits: 1 - 2.0 * conv_encode(np.array(bits))
        for bits in itertools.product([0, 1], repeat=6)
    }

    for trial in range(20):
        soft = Rng(7).spawn(trial).normal(24) * 1.5
        best = max(codewords, key=lambda bits: float(soft @ codewords[bits]))

        assert viterbi_decode(soft, t).tolist() == list(best)


def test_batched_rows_match_single_rows():
    rng = Rng(8)
    info = rng.bits(5 * 80).reshape(5, 80)
    soft = np.stack([1 - 2.0 * conv_encode(row) for row in info]) + rng.normal((5, 172))

    batch = viterbi_decode(soft)

    assert batch.shape == (5, 80)
    assert all(np.array_equal(batch[i], viterbi_decode(soft[i])) for i in range(5))


@pytest.mark.parametrize("alpha", [0.01, 0.5, 3, 1000])
def test_decoding_ignores_positive_scaling(alpha):
    rng = Rng(10)
    info = rng.bits(2000)
    soft = 1 - 2.0 * conv_encode(info) + rng.normal(2 * (2000 + 6))
    reference = viterbi_decode(soft)

    assert np.array_equal(viterbi_decode(alpha * soft), reference)


def test_decoder_rejects_bad_lengths():
    with pytest.raises(ValueError, match="multiple"):
        viterbi_decode(np.zeros(13))

    with pytest.raises(ValueError, match="at least 6 stages"):
        viterbi_decode(np.zeros(10))

    with pytest.raises(ValueError, match="Traceback"):
        viterbi_decode(np.zeros(20), traceback=0)


def test_soft_decoding_beats_hard_decoding():
    c = build_constellation("bpsk")
    rng = Rng(9)
    info = rng.bits(20 * 500).reshape(20, 500)
    coded = np.stack([conv_encode(row) for row in info])
    sigma2 = sigma2_from_ebn0(3.0, 1, 0.5)
    rx = add_awgn(modulate(coded.ravel(), c), sigma2, rng)

    soft = (4 * rx.real / sigma2).reshape(coded.shape)
    hard = hard_demodulate_min_distance(rx, c).reshape(coded.shape)

    soft_errors = np.count_nonzero(viterbi_decode(soft) != info)
    hard_errors = np.count_nonzero(viterbi_decode_hard(hard) != info)
    uncoded_errors = np.count_nonzero(hard != coded)

    assert soft_errors < hard_errors < uncoded_errors


def test_theory_matches_closed_forms():
    ebn0_db = np.arange(0, 16, 2.0)
    gamma = 10 ** (ebn0_db / 10)
    a = np.sqrt(2 * gamma / 5)
    qam16 = 3 / 8 * erfc(a) + 1 / 4 * erfc(3 * a) - 1 / 8 * erfc(5 * a)

    assert np.allclose(theoretical_ber("bpsk", ebn0_db), 0.5 * erfc(np.sqrt(gamma)))
    assert np.allclose(theoretical_ber("qpsk", ebn0_db), 0.5 * erfc(np.sqrt(gamma)))
    assert np.allclose(theoretical_ber("qam16", ebn0_db), qam16, rtol=1e-12)


@pytest.mark.parametrize("modulation", ["qam64", "qam256"])
def test_theory_is_decreasing(modulation):
    curve = theory_curve(modulation, range(0, 25, 3))
    bers = [ber for _, ber in curve]

    assert all(0 < ber < 0.5 for ber in bers)
    assert all(a > b for a, b in zip(bers, bers[1:]))


@pytest.mark.parametrize("modulation,ebn0", [("qpsk", 4.0), ("qam16", 6.0), ("qam64", 10.0)])
def test_theory_matches_simulation(modulation, ebn0):
    c = build_constellation(modulation)
    rng = Rng(10).spawn(modulation)
    bits = rng.bits(c.k * 200_000)
    rx = add_awgn(modulate(bits, c), sigma2_from_ebn0(ebn0, c.k), rng)
    ber = np.count_nonzero(hard_demodulate_min_distance(rx, c) != bits) / len(bits)

    assert abs(ber / theoretical_ber(modulation, ebn0) - 1) < 0.05


def test_ties_follow_the_first_predecessor():
    t = TrellisSpec()

    assert all(t.predecessors[state, 0] & 1 == 0 for state in range(t.n_states))
    assert viterbi_decode(np.zeros(2 * (50 + 6))).tolist() == [0] * 50
