import numpy as np
import pytest

from demodkit.llr import exact_llr, llr_sequence
from demodkit.modem import (
    MODULATIONS,
    build_constellation,
    hard_decision_from_soft,
    hard_demodulate_min_distance,
    label_bits,
    modulate,
)
from demodkit.sampling import Rng


@pytest.mark.parametrize("name", MODULATIONS)
def test_constellation_has_unit_energy(name):
    c = build_constellation(name)

    assert c.size == 2 ** c.k
    assert abs(np.mean(np.abs(c.points) ** 2) - 1) < 1e-12


@pytest.mark.parametrize("name", MODULATIONS)
def test_subsets_partition_every_bit(name):
    c = build_constellation(name)

    for i in range(c.k):
        zeros, ones = c.subsets[i]
        assert len(zeros) == len(ones) == 2 ** (c.k - 1)
        assert sorted(np.concatenate([zeros, ones]).tolist()) == list(range(c.size))
        assert zeros.tolist() == [m for m in range(c.size) if c.labels[m, i] == 0]


@pytest.mark.parametrize("name", ["qpsk", "qam16", "qam64", "qam256"])
def test_axis_neighbors_differ_in_one_bit(name):
    c = build_constellation(name)
    m = c.k // 2

    for axis, part in ((np.real, slice(0, m)), (np.imag, slice(m, c.k))):
        levels = {}

        for label in range(c.size):
            levels[round(float(axis(c.points[label])), 9)] = tuple(c.labels[label, part])

        ordered = [levels[x] for x in sorted(levels)]

        for a, b in zip(ordered, ordered[1:]):
            assert sum(x != y for x, y in zip(a, b)) == 1


def test_bpsk_and_qpsk_conventions():
    assert build_constellation("bpsk").points.tolist() == [1, -1]
    assert modulate([0, 1, 0], build_constellation("bpsk")).tolist() == [1, -1, 1]

    qpsk = modulate([0, 0], build_constellation("qpsk"))
    assert np.allclose(qpsk, [(1 + 1j) / np.sqrt(2)])


def test_qam16_scale():
    c = build_constellation("qam16")
    assert np.isclose(np.max(np.abs(c.points.real)), 3 / np.sqrt(10))


def test_unknown_modulation_is_rejected():
    with pytest.raises(ValueError, match="Unknown modulation"):
        build_constellation("8psk")


def test_modulate_rejects_bad_input():
    c = build_constellation("qam16")

    with pytest.raises(ValueError, match="multiple of k=4"):
        modulate([0, 1, 1], c)

    with pytest.raises(ValueError):
        modulate([0, 2, 1, 0], c)


@pytest.mark.parametrize("name", MODULATIONS)
def test_noiseless_round_trip_over_all_labels(name):
    c = build_constellation(name)
    bits = label_bits(c.k).ravel()

    assert (hard_demodulate_min_distance(modulate(bits, c), c) == bits).all()


def test_min_distance_examples():
    qpsk = build_constellation("qpsk")

    assert hard_demodulate_min_distance([0.1 + 0j], build_constellation("bpsk")).tolist() == [0]
    assert hard_demodulate_min_distance([(0.9 + 0.1j) / np.sqrt(2)], qpsk).tolist() == [0, 0]


def test_hard_decision_from_soft():
    soft = np.array([2.3, -0.1, 0.0, 5.0])

    assert hard_decision_from_soft(soft).tolist() == [0, 1, 1, 0]
    assert hard_decision_from_soft(np.ones(10)).tolist() == [0] * 10
    assert (hard_decision_from_soft(-soft[:2]) == 1 - hard_decision_from_soft(soft[:2])).all()


@pytest.mark.parametrize("name", MODULATIONS)
def test_maxlog_sign_agrees_with_min_distance(name):
    c = build_constellation(name)
    rng = Rng(11).spawn(name)
    rx = modulate(rng.bits(10_000 * c.k), c)
    rx = rx + 0.15 * (rng.normal(len(rx)) + 1j * rng.normal(len(rx)))

    soft = llr_sequence(rx, c, sigma2=0.05, mode="maxlog")
    hard = hard_demodulate_min_distance(rx, c)

    assert (hard_decision_from_soft(soft) == hard).all()


def test_exact_llr_agrees_per_symbol():
    c = build_constellation("qam16")
    rx = np.array([0.3 - 0.7j, -1.1 + 0.2j])

    assert np.allclose(llr_sequence(rx, c, 0.5), np.concatenate([exact_llr(r, c, 0.5) for r in rx]))
