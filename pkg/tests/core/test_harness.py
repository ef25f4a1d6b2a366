import io

import numpy as np
import pandas as pd
import pytest

import demodkit.channel._scenario
from demodkit.channel import Scenario
from demodkit.demodnet import (
    TrainSchedule,
    build_demodnet,
    generate_dataset,
    load_checkpoint,
    save_checkpoint,
    train,
)
from demodkit.exceptions import MissingCheckpointError
from demodkit.harness import (
    BerRecord,
    ExperimentConfig,
    cell_seed,
    check_checkpoints,
    demodulate,
    figure_configs,
    get_figure,
    get_scale,
    model_path,
    model_specs,
    read_records,
    records_frame,
    run_sweep,
    simulate_point,
    transmit,
    write_dat,
    write_records,
)
from demodkit.modem import build_constellation
from demodkit.monitor import MemoryLogger
from demodkit.sampling import Rng


def small(modulation="qpsk", **kwargs):
    values = dict(ebn0_db=[60], bits_per_point=10_000, bit_floor=10_000)
    values.update(kwargs)
    return ExperimentConfig(modulation, **values)


@pytest.fixture(scope="module")
def bpsk_checkpoint(tmp_path_factory):
    data = generate_dataset("bpsk", ebn0_list_db=[6, 10], samples_per_ebn0=128, symbols_per_sample=40)
    model = build_demodnet("bpsk", hidden_channels=4, hidden_kernel=5)
    model, _ = train(model, data, TrainSchedule(batch_size=32, max_epochs=2))
    return save_checkpoint(model, tmp_path_factory.mktemp("models") / "bpsk.dmn")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(modulation="8psk"),
        dict(ebn0_db=[]),
        dict(demodulators=[]),
        dict(demodulators=["neural"]),
        dict(coding="turbo"),
        dict(decoding="soft-ish"),
        dict(bits_per_point=9_999),
        dict(bit_floor=0),
        dict(bit_floor=2_000_000),
        dict(target_errors=0),
        dict(burst_symbols=30),
        dict(scenario="rayleigh"),
        dict(equalizer="lms"),
        dict(scenario="rayleigh(30,1e6)+awgn", equalizer="none"),
        dict(equalizer="zero-forcing"),
    ],
)
def test_config_rejects_invalid_values(kwargs):
    values = dict(modulation="qam16", ebn0_db=[4])
    values.update(kwargs)

    with pytest.raises(ValueError):
        ExperimentConfig(**values)


def test_config_defaults_and_decoders():
    cfg = ExperimentConfig("qam16", ebn0_db=[4], coding="conv(171,133)", demodulators=["min-distance", "exact-llr"])

    assert cfg.code_rate == 0.5
    assert cfg.equalizer == "none"
    assert cfg.decoder_for("min-distance") == "viterbi-hard"
    assert cfg.decoder_for("exact-llr") == "viterbi-soft"

    hard = ExperimentConfig("qam16", ebn0_db=[4], coding="conv(171,133)", decoding="hard")
    assert hard.decoder_for("exact-llr") == "viterbi-hard"

    fading = ExperimentConfig("qam16", scenario="rayleigh(30,1000000)+awgn", ebn0_db=[4])
    assert fading.equalizer == "lms"
    assert fading.scenario == "rayleigh(30,1e+06)+awgn"


def test_config_toml_round_trip():
    cfg = ExperimentConfig(
        "qam64",
        scenario="aggn(0,1,1)",
        ebn0_db=[4, 6.5],
        demodulators=["exact-llr", "demodnet-lpr"],
        coding="conv(171,133)",
        checkpoints={"demodnet-lpr": "models/qam64.dmn"},
        seed=7,
    )
    fp = io.StringIO()
    cfg.save(fp)
    fp.seek(0)

    assert ExperimentConfig.load(fp) == cfg


def test_config_rejects_unknown_keys_and_bad_toml():
    with pytest.raises(ValueError, match="Unknown configuration keys: colour"):
        ExperimentConfig.from_dict(dict(modulation="bpsk", ebn0_db=[1], colour="red"))

    with pytest.raises(ValueError, match="must name a modulation"):
        ExperimentConfig.from_dict(dict(ebn0_db=[1]))

    with pytest.raises(ValueError, match="Malformed"):
        ExperimentConfig.load(io.StringIO("modulation = [bpsk"))


def test_ber_record_validates():
    record = BerRecord("qpsk", "awgn", 2, "exact-llr", "none", 1000, 10, ber=0.9)
    assert record.ber == 0.01

    with pytest.raises(ValueError):
        BerRecord("qpsk", "awgn", 2, "exact-llr", "none", 0, 0)

    with pytest.raises(ValueError):
        BerRecord("qpsk", "awgn", 2, "exact-llr", "none", 10, 11)


@pytest.mark.parametrize("coding", ["none", "conv(171,133)"])
@pytest.mark.parametrize("scenario", ["awgn", "aggn(0,1,1)"])
def test_noiseless_links_are_error_free(coding, scenario):
    cfg = small(
        "qam16",
        scenario=scenario,
        coding=coding,
        demodulators=["min-distance", "exact-llr", "maxlog-llr"],
        ebn0_db=[80],
    )
    records = run_sweep(cfg)

    assert [r.demodulator for r in records] == ["min-distance", "exact-llr", "maxlog-llr"]
    assert all(r.bit_errors == 0 and r.bits_counted == 10_000 for r in records)


def test_fading_link_is_equalized():
    cfg = small("qpsk", scenario="rayleigh(30,1e6)+awgn", ebn0_db=[40])
    (record,) = run_sweep(cfg)

    assert record.ber < 0.01


def test_fading_frames_have_one_prefix_and_a_continuous_fade(monkeypatch):
    fades = []
    fade = demodkit.channel._scenario.rayleigh_flat_fade

    def recording_fade(tx, spec, rng=None):
        faded, gains = fade(tx, spec, rng)
        fades.append(gains)
        return faded, gains

    monkeypatch.setattr(demodkit.channel._scenario, "rayleigh_flat_fade", recording_fade)
    cfg = small("qpsk", scenario="rayleigh(30,1e6)+awgn", ebn0_db=[40], frame_bits=1000)
    record = simulate_point(cfg, 0, "exact-llr")

    # 10 frames of 500 payload symbols (5 bursts) behind a 500-symbol prefix
    assert record.bits_counted == 10_000
    assert len(fades) == 10
    assert all(len(gains) == 1000 for gains in fades)

    for gains in fades:
        steps = np.abs(np.diff(gains))
        assert steps.max() < 1e-2
        assert steps[[599, 699, 799, 899]].max() < 1e-2

    assert record.ber < 0.01


def test_transmit_splits_frames_into_bursts():
    frames = np.ones((2, 200), dtype=complex)
    cfo = transmit(frames, Scenario.parse("awgn+cfo(0.01)"), 1e-12, Rng(0), 100)

    assert cfo.shape == (4, 100)
    np.testing.assert_allclose(cfo[0], cfo[1], atol=1e-5)

    faded = transmit(frames, Scenario.parse("rayleigh(30,1e6)+awgn"), 1e-4, Rng(0), 100)
    assert faded.shape == (4, 100)

    with pytest.raises(ValueError, match="do not split"):
        transmit(np.ones((2, 150)), Scenario.parse("awgn"), 1.0, Rng(0), 100)


def test_demodulators_share_random_data():
    cfg = small("qam16", ebn0_db=[4, 8], demodulators=["min-distance", "maxlog-llr", "exact-llr"], bits_per_point=20_000)
    records = run_sweep(cfg)
    by_name = {(r.demodulator, r.ebn0_db): r for r in records}

    assert cell_seed(cfg, 0) != cell_seed(cfg, 1)

    for ebn0 in (4.0, 8.0):
        assert by_name["min-distance", ebn0].seed == by_name["exact-llr", ebn0].seed
        assert by_name["min-distance", ebn0].bit_errors == by_name["maxlog-llr", ebn0].bit_errors
        assert by_name["min-distance", ebn0].bit_errors > 0


def test_sweeps_are_reproducible():
    cfg = small("qpsk", ebn0_db=[0, 4], demodulators=["min-distance", "exact-llr"])
    first = records_frame(run_sweep(cfg))

    pd.testing.assert_frame_equal(first, records_frame(run_sweep(cfg)))
    pd.testing.assert_frame_equal(first, records_frame(run_sweep(cfg, workers=2)))

    other = records_frame(run_sweep(small("qpsk", ebn0_db=[0, 4], demodulators=["min-distance", "exact-llr"], seed=1)))
    assert not first["bit_errors"].equals(other["bit_errors"])


def test_stopping_rule():
    noisy = ExperimentConfig("bpsk", ebn0_db=[0], bits_per_point=1_000_000, bit_floor=10_000, target_errors=1)
    clean = ExperimentConfig("bpsk", ebn0_db=[60], bits_per_point=200_000, bit_floor=10_000, target_errors=1)

    assert simulate_point(noisy, 0, "min-distance").bits_counted == 100_000
    assert simulate_point(clean, 0, "min-distance").bits_counted == 200_000


def test_filler_bits_are_not_counted():
    cfg = small("qam16", frame_bits=333)
    record = simulate_point(cfg, 0, "exact-llr")

    assert record.bits_counted == 2 * 30 * 333
    assert record.bit_errors == 0

    coded = small("qam64", frame_bits=500, coding="conv(171,133)")
    assert simulate_point(coded, 0, "exact-llr").bits_counted == 10_000


def test_progress_counts_information_bits():
    cfg = small("qpsk")
    seen = []
    simulate_point(cfg, 0, "min-distance", progress=seen.append)

    assert sum(seen) == 10_000


def test_missing_checkpoints_are_reported(tmp_path):
    cfg = small("qpsk", demodulators=["exact-llr", "demodnet-lpr"])

    with pytest.raises(MissingCheckpointError) as e:
        run_sweep(cfg)

    assert e.value.demodulator == "demodnet-lpr"

    cfg = small("qpsk", demodulators=["llrnet"], checkpoints={"llrnet": str(tmp_path / "none.dmn")})

    with pytest.raises(MissingCheckpointError):
        check_checkpoints(cfg)


def test_checkpoint_must_match_the_experiment(tmp_path):
    qpsk = save_checkpoint(build_demodnet("qpsk", hidden_channels=2, hidden_kernel=3), tmp_path / "qpsk.dmn")
    linear = save_checkpoint(
        build_demodnet("qam16", hidden_channels=2, hidden_kernel=3, head="linear"), tmp_path / "linear.dmn"
    )

    with pytest.raises(ValueError, match="trained for qpsk"):
        run_sweep(small("qam16", demodulators=["demodnet-lpr"], checkpoints={"demodnet-lpr": str(qpsk)}))

    with pytest.raises(ValueError, match="needs a 'sigmoid' head"):
        run_sweep(small("qam16", demodulators=["demodnet-lpr"], checkpoints={"demodnet-lpr": str(linear)}))


def test_learned_demodulator_runs_in_sweeps(bpsk_checkpoint):
    cfg = small(
        "bpsk",
        ebn0_db=[4, 8],
        demodulators=["demodnet-lpr", "exact-llr"],
        checkpoints={"demodnet-lpr": str(bpsk_checkpoint)},
        coding="conv(171,133)",
    )
    log = MemoryLogger()
    records = run_sweep(cfg, logger=log)

    assert [r.demodulator for r in records] == ["demodnet-lpr"] * 2 + ["exact-llr"] * 2
    assert all(r.decoder == "viterbi-soft" for r in records)
    assert log.records == records
    assert records_frame(records).equals(records_frame(run_sweep(cfg)))


def test_demodulate_outputs(bpsk_checkpoint):
    c = build_constellation("bpsk")
    rx = (Rng(1).normal((3, 50)) + 1j * Rng(2).normal((3, 50))).astype(np.complex64)

    hard, soft = demodulate("min-distance", rx, c, 0.5)
    assert soft is None and hard.shape == (150,)

    hard, soft = demodulate("exact-llr", rx, c, 0.5)
    assert np.array_equal(hard, (soft <= 0).astype(np.uint8))

    model = load_checkpoint(bpsk_checkpoint)
    hard, soft = demodulate("demodnet-lpr", rx, c, 0.5, model)
    assert soft.shape == (150,) and np.isfinite(soft).all()

    with pytest.raises(ValueError, match="needs a trained model"):
        demodulate("llrnet", rx, c, 0.5)


def test_records_csv(tmp_path):
    records = run_sweep(small("bpsk", ebn0_db=[2, 4], demodulators=["min-distance", "exact-llr"]))
    path = write_records(records, tmp_path / "out" / "bpsk.csv")

    assert list(pd.read_csv(path).columns) == BerRecord.FIELDS
    assert [r.as_dict() for r in read_records(path)] == [r.as_dict() for r in records]


def test_dat_file_has_one_column_per_curve(tmp_path):
    records = run_sweep(small("qpsk", ebn0_db=[2, 4], demodulators=["min-distance", "exact-llr"]))
    path = write_dat(records_frame(records), tmp_path / "fig.dat")
    lines = path.read_text().splitlines()

    assert lines[0] == "# ebn0_db qpsk_min-distance qpsk_exact-llr"
    assert [line.split()[0] for line in lines[1:]] == ["2.0", "4.0"]


def test_figure_recipes():
    with pytest.raises(ValueError, match="out of scope: turbo code"):
        get_figure("fig5b")

    with pytest.raises(ValueError, match="Unknown figure"):
        get_figure("fig9")

    configs = figure_configs("fig5a", "smoke", output="out")

    assert [c.modulation for c in configs] == ["bpsk", "qam16"]
    assert configs[0].checkpoints == {
        "demodnet-lpr": str(model_path("out", "bpsk", "aggn(0,1,1)", "conv(171,133)", "sigmoid", "smoke")),
        "llrnet": str(model_path("out", "bpsk", "aggn(0,1,1)", "conv(171,133)", "linear", "smoke")),
    }
    assert model_path("out", "qam16", "awgn", "none", "sigmoid", "desk").name == "qam16_awgn_uncoded_sigmoid_desk.dmn"


def test_scale_presets_network_sizes():
    sizes = {
        name: (get_scale(name).hidden_channels, get_scale(name).hidden_kernel)
        for name in ("paper", "desk", "smoke")
    }

    assert sizes == {"paper": (64, 31), "desk": (16, 15), "smoke": (4, 5)}
    assert get_scale("desk").samples_per_ebn0 == 5000

    with pytest.raises(ValueError, match="Unknown scale"):
        get_scale("laptop")


def test_model_specs_are_seeded_per_head():
    cfg = figure_configs("fig5a", "smoke")[1]
    specs = model_specs(cfg, get_scale("smoke"))

    assert [s["head"] for s in specs] == ["sigmoid", "linear"]
    assert specs[0]["code_rate"] == 0.5
    assert specs[0]["ebn0_list_db"] == cfg.ebn0_db
    assert specs[0]["init_seed"] != specs[1]["init_seed"]
    assert specs == model_specs(cfg, get_scale("smoke"))
