import io

import numpy as np
import pytest

from demodkit.demodnet import (
    FINAL_KERNEL,
    MIN_SYMBOLS,
    Dataset,
    DemodNetModel,
    TrainSchedule,
    TrainingDivergedError,
    build_demodnet,
    features_from_symbols,
    forward,
    forward_stream,
    generate_dataset,
    load_checkpoint,
    lpr,
    predict_logits,
    save_checkpoint,
    train,
    train_llrnet_baseline,
)
from demodkit.llr import llr_sequence
from demodkit.modem import (
    MODULATIONS,
    build_constellation,
    hard_decision_from_soft,
    hard_demodulate_min_distance,
)
from demodkit.monitor import MemoryLogger
from demodkit.sampling import Rng


def trained_model(modulation="qpsk", head="sigmoid", epochs=1):
    data = generate_dataset(modulation, ebn0_list_db=[4, 8], samples_per_ebn0=32, symbols_per_sample=40)
    model = build_demodnet(modulation, hidden_channels=4, hidden_kernel=5, head=head)
    model, _ = train(model, data, TrainSchedule(batch_size=16, max_epochs=epochs))
    return model


@pytest.mark.parametrize("modulation", MODULATIONS)
def test_architecture(modulation):
    model = DemodNetModel(modulation, hidden_channels=8, hidden_kernel=7)
    k, c = model.k, 8

    assert [layer.kind for layer in model.layers] == ["deconv", "bn", "relu"] + ["conv", "bn", "relu"] * 3 + ["conv"]
    assert model.output_length(50) == k * 50
    assert model.parameter_count == (2 * c * k + c) + 4 * 2 * c + 3 * (c * c * 7 + c) + (c * FINAL_KERNEL + 1)


def test_same_seed_same_weights():
    a = build_demodnet("qam16", hidden_channels=4, hidden_kernel=5, seed=1)
    b = build_demodnet("qam16", hidden_channels=4, hidden_kernel=5, seed=1)
    c = build_demodnet("qam16", hidden_channels=4, hidden_kernel=5, seed=2)

    assert all(np.array_equal(a.parameters()[n], b.parameters()[n]) for n in a.parameters())
    assert not np.array_equal(a.parameters()["0.weight"], c.parameters()["0.weight"])


def test_forward_contracts():
    model = trained_model()
    rx = Rng(1).normal(100) + 1j * Rng(2).normal(100)
    probs, logits = forward(model, rx)

    assert probs.shape == logits.shape == (200,)
    assert ((probs >= 0) & (probs <= 1)).all()
    assert np.array_equal(lpr(logits=logits), -logits)
    assert np.allclose(lpr(probs=probs), -logits, atol=1e-4)

    with pytest.raises(ValueError, match="at least 31"):
        forward(model, rx[: MIN_SYMBOLS - 1])

    with pytest.raises(TypeError):
        forward(model.train(), rx)


def test_inference_before_training_is_rejected():
    model = build_demodnet("bpsk", hidden_channels=4, hidden_kernel=5).eval()

    with pytest.raises(TypeError):
        predict_logits(model, features_from_symbols(np.ones(40)))


def test_outputs_are_local():
    model = trained_model()
    rx = Rng(3).normal(400) + 1j * Rng(4).normal(400)
    _, logits = forward(model, rx)

    changed = rx.copy()
    changed[300] += 5.0
    _, other = forward(model, changed)

    near = 2 * (300 - model.margin_symbols)
    assert np.allclose(logits[:near], other[:near], atol=1e-6)


def test_forward_stream_matches_forward():
    model = trained_model()
    rx = Rng(5).normal(1000) + 1j * Rng(6).normal(1000)

    _, whole = forward(model, rx)
    _, streamed = forward_stream(model, rx, chunk_symbols=128)

    assert np.allclose(whole, streamed, atol=1e-5)


def test_checkpoint_round_trip(tmp_path):
    model = trained_model("qam16")
    path = save_checkpoint(model, tmp_path / "models" / "qam16.dmn")
    loaded = load_checkpoint(path)
    rx = Rng(7).normal(64) + 1j * Rng(8).normal(64)

    assert (loaded.modulation, loaded.k, loaded.hidden_channels, loaded.head) == ("qam16", 4, 4, "sigmoid")
    assert loaded.mode == "infer"
    assert np.array_equal(forward(model, rx)[1], forward(loaded, rx)[1])


def test_checkpoint_rejects_bad_files():
    with pytest.raises(ValueError, match="magic"):
        DemodNetModel.load(io.BytesIO(b"NOTAMODEL" * 4))

    buffer = io.BytesIO()
    build_demodnet("bpsk", hidden_channels=2, hidden_kernel=3).save(buffer)
    data = bytearray(buffer.getvalue())
    data[8:10] = (99).to_bytes(2, "little")

    with pytest.raises(ValueError, match="version 99"):
        DemodNetModel.load(io.BytesIO(bytes(data)))

    with pytest.raises(ValueError, match="Truncated"):
        DemodNetModel.load(io.BytesIO(buffer.getvalue()[:40]))


def test_generate_dataset():
    data = generate_dataset("qam16", ebn0_list_db=[60], samples_per_ebn0=5, symbols_per_sample=50, seed=3)
    again = generate_dataset("qam16", ebn0_list_db=[60], samples_per_ebn0=5, symbols_per_sample=50, seed=3)
    c = build_constellation("qam16")

    assert data.features.shape == (5, 2, 50)
    assert data.labels.shape == (5, 200)
    assert np.array_equal(data.received, again.received)
    assert np.array_equal(hard_demodulate_min_distance(data.received.ravel(), c), data.labels.ravel())


def test_dataset_llr_targets():
    data = generate_dataset("qpsk", ebn0_list_db=[0, 6], samples_per_ebn0=4, symbols_per_sample=32)
    targets = data.llr_targets("exact")
    c = build_constellation("qpsk")

    for row in (0, 7):
        expected = llr_sequence(data.received[row], c, data.sigma2[row])
        assert np.allclose(targets[row], expected, rtol=1e-5)

    assert len(data.subset([1, 2, 5])) == 3


def test_dataset_validates_shapes():
    with pytest.raises(ValueError, match="Labels"):
        Dataset(np.zeros((2, 10)), np.zeros((2, 10)), [0, 0], [1, 1], "qpsk")


def test_training_reduces_loss():
    data = generate_dataset("bpsk", ebn0_list_db=[6], samples_per_ebn0=256, symbols_per_sample=40)
    model = build_demodnet("bpsk", hidden_channels=4, hidden_kernel=5)
    log = MemoryLogger()
    model, losses = train(model, data, TrainSchedule(batch_size=32, max_epochs=4), logger=log)

    assert len(losses) == 4
    assert losses[-1] < losses[0]
    assert log.losses == losses
    assert log.learning_rates == [0.003, 0.003, 0.003, 0.0015]
    assert model.mode == "infer"


def test_training_is_deterministic():
    a = trained_model("bpsk")
    b = trained_model("bpsk")

    assert all(np.array_equal(a.parameters()[n], b.parameters()[n]) for n in a.parameters())


def test_training_rejects_mismatched_data():
    data = generate_dataset("qpsk", ebn0_list_db=[4], samples_per_ebn0=4, symbols_per_sample=32)

    with pytest.raises(ValueError, match="does not match"):
        train(build_demodnet("bpsk", hidden_channels=2, hidden_kernel=3), data)


def test_divergence_restores_last_good_state(tmp_path):
    data = generate_dataset("bpsk", ebn0_list_db=[4], samples_per_ebn0=8, symbols_per_sample=32)
    received = data.received.copy()
    received[3, 5] = np.nan
    broken = Dataset(received, data.labels, data.ebn0_db, data.sigma2, "bpsk")
    model = build_demodnet("bpsk", hidden_channels=2, hidden_kernel=3)
    initial = model.state()

    with pytest.raises(TrainingDivergedError) as e:
        train(model, broken, TrainSchedule(batch_size=16, max_epochs=2), checkpoint=tmp_path / "last.dmn")

    assert e.value.epoch == 1
    assert (tmp_path / "last.dmn").is_file()
    assert all(np.array_equal(a["weight"], b["weight"]) for a, b in zip(model.state(), initial) if "weight" in a)


def test_llrnet_baseline_regresses_llrs():
    data = generate_dataset("qpsk", ebn0_list_db=[2, 6], samples_per_ebn0=64, symbols_per_sample=40)
    model, losses = train_llrnet_baseline(
        "qpsk", data, TrainSchedule(batch_size=32, max_epochs=3), hidden_channels=4, hidden_kernel=5
    )

    assert model.head == "linear"
    assert len(model.inference_layers()) == len(model.layers)
    assert np.isfinite(losses).all()
    assert losses[-1] < losses[0]


@pytest.mark.slow
def test_noiseless_bpsk_is_learned_in_two_epochs():
    data = generate_dataset("bpsk", ebn0_list_db=[80], samples_per_ebn0=5000, symbols_per_sample=100)
    model, losses = train(build_demodnet("bpsk"), data, TrainSchedule(max_epochs=2))

    assert len(losses) == 2
    assert losses[-1] < 0.01


@pytest.mark.slow
def test_demodnet_ber_is_close_to_min_distance():
    data = generate_dataset("bpsk", ebn0_list_db=[4, 6, 8], samples_per_ebn0=1000, symbols_per_sample=100)
    model = build_demodnet("bpsk", hidden_channels=16, hidden_kernel=15)
    model, _ = train(model, data, TrainSchedule(batch_size=64, max_epochs=6))

    held_out = generate_dataset("bpsk", ebn0_list_db=[8], samples_per_ebn0=5000, symbols_per_sample=100, seed=99)
    labels = held_out.labels.ravel()
    logits = predict_logits(model, held_out.features).ravel()

    network_errors = np.count_nonzero(hard_decision_from_soft(lpr(logits=logits)) != labels)
    reference_errors = np.count_nonzero(
        hard_demodulate_min_distance(held_out.received.ravel(), build_constellation("bpsk")) != labels
    )

    assert reference_errors > 20
    assert network_errors <= 2 * reference_errors


@pytest.fixture(scope="module")
def qpsk_llrnet():
    data = generate_dataset("qpsk", ebn0_list_db=[4], samples_per_ebn0=2000, symbols_per_sample=100)
    model, _ = train_llrnet_baseline(
        "qpsk", data, TrainSchedule(batch_size=32, max_epochs=6), hidden_channels=16, hidden_kernel=15
    )
    return model


@pytest.mark.slow
def test_llrnet_correlates_with_exact_llr(qpsk_llrnet):
    held_out = generate_dataset("qpsk", ebn0_list_db=[4], samples_per_ebn0=200, symbols_per_sample=100, seed=7)
    predicted = predict_logits(qpsk_llrnet, held_out.features).ravel()
    exact = held_out.llr_targets("exact").ravel()

    assert np.corrcoef(predicted, exact)[0, 1] > 0.95


@pytest.mark.slow
def test_llrnet_signs_match_noiseless_bits(qpsk_llrnet):
    clean = generate_dataset("qpsk", ebn0_list_db=[80], samples_per_ebn0=100, symbols_per_sample=100, seed=8)
    predicted = predict_logits(qpsk_llrnet, clean.features).ravel()

    assert np.mean((predicted > 0) == (clean.labels.ravel() == 0)) >= 0.99
