import numpy as np
import pytest

from adamffe.errors import StageError
from adamffe.pipeline import (build_frame, noise_seed, run_experiment, run_point, run_sweep,
                              sweep_config, synchronize)
from helpers import small


def test_synchronize_zero_delay(rng):
    x = rng.standard_normal(300)
    assert synchronize(x, x[:100], 10) == 0


def test_synchronize_finds_delay_through_channel(rng):
    from adamffe.channel import ChannelModel, simulate_link
    x = rng.choice([-1.0, 1.0], 400)
    rx = simulate_link(x, ChannelModel(delay=7))
    # the channel's main cursor adds one more sample of delay
    assert synchronize(rx, x[:200], 10) == 8


def test_synchronize_is_scale_invariant(rng):
    x = rng.standard_normal(300)
    rx = np.concatenate([np.zeros(4), x])
    assert synchronize(rx, x[:100], 8) == synchronize(25.0 * rx, x[:100], 8) == 4


def test_synchronize_rejects_degenerate_input(rng):
    with pytest.raises(ValueError):
        synchronize(np.zeros(50), rng.standard_normal(20), 5)
    with pytest.raises(ValueError):
        synchronize(rng.standard_normal(50), rng.standard_normal(20), 50)


def test_frame_layout():
    cfg = small()
    frame = build_frame(cfg)
    k = frame.alphabet.bits_per_symbol
    assert frame.training_len == 200
    assert frame.payload_slice == slice(200, 2200)
    assert frame.symbols.size == 200 + 2000 + 11 + 3
    assert frame.payload_bits.size == 2000 * k


def test_noise_seed_depends_on_snr_only_through_value():
    assert noise_seed(2, 20.0) == noise_seed(2, 20)
    assert noise_seed(2, 20.0) != noise_seed(2, 22.0)


def test_noiseless_identity_channel_is_error_free():
    cfg = small(channel__isi_taps=[1.0], sweep__snr_db=[200.0])
    report = run_experiment(cfg)
    for row in report.ber_curve("adam") + report.ber_curve("rls"):
        assert row["ber_pre_mlsd"] == 0 and row["bit_errors"] == 0


def test_runs_are_deterministic():
    a, b = run_experiment(small()), run_experiment(small())
    assert a.to_dict() == b.to_dict()


def test_worker_count_does_not_change_report():
    one = run_experiment(small(), workers=1).to_dict()
    assert one == run_experiment(small(), workers=3).to_dict()


def test_payload_does_not_influence_training():
    cfg = small()
    frame = build_frame(cfg)
    flipped = build_frame(cfg, 1 - frame.payload_bits)
    a = run_point(cfg, frame, 18.0)
    b = run_point(cfg, flipped, 18.0)
    assert a.lag == b.lag
    for label in ("adam", "rls"):
        np.testing.assert_array_equal(a.trainers[label].train.final_taps,
                                      b.trainers[label].train.final_taps)


def test_disabling_postproc_keeps_pre_mlsd_ber():
    on = run_experiment(small())
    off = run_experiment(small(postproc__mlsd=False))
    for label in on.labels:
        pre_on = [r["ber_pre_mlsd"] for r in on.ber_curve(label)]
        rows_off = off.ber_curve(label)
        assert pre_on == [r["ber_pre_mlsd"] for r in rows_off]
        assert all(r["ber_post_mlsd"] is None for r in rows_off)


def test_ber_curve_sorted_by_snr():
    report = run_experiment(small(sweep__snr_db=[20.0, 14.0, 17.0]))
    assert [r["snr_db"] for r in report.ber_curve("adam")] == [14.0, 17.0, 20.0]


def test_alpha_grid_calibration_picks_grid_value():
    report = run_experiment(small(postproc__alpha_grid=[0.0, 0.4, 0.8]))
    assert all(p.trainers["adam"].alpha in (0.0, 0.4, 0.8) for p in report.points)


def test_failures_name_their_stage():
    cfg = small(trainer={"lms": {"algorithm": "lms", "mu": 50.0}})
    with pytest.raises(StageError) as info:
        run_experiment(cfg)
    assert info.value.stage == "train:lms"


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(ValueError):
        sweep_config(small(), "frame.nonsense", 3)
    with pytest.raises(ValueError):
        sweep_config(small(), "trainer", "newton")


def test_trainer_sweep_shares_channel_realization():
    adam, rls = run_sweep(small(), "trainer", ["adam", "rls"])
    assert [p.lag for p in adam.points] == [p.lag for p in rls.points]
    assert adam.sweep == {"parameter": "trainer", "value": "adam"}
    assert adam.labels == ["adam"] and rls.labels == ["rls"]


def test_training_length_sweep_scales_complexity():
    short, long = run_sweep(small(trainer={"rls": {"algorithm": "rls"}}),
                            "frame.training_len", [50, 200])
    assert long.complexity["rls"].operations == 4 * short.complexity["rls"].operations
