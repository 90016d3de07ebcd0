import math

import numpy as np
import pytest

from lgap.behavior import hankel
from lgap.metrics import gap
from lgap.recognition import (LOG_COLUMNS, ExperimentLog, RecognitionConfig, RecognitionState,
                              WindowNotFull, mismatch_onsets, case_study_schedule, recognition_step,
                              run_closed_loop, square_wave, window_basis)
from lgap.sarx import ModeSchedule, generate_excited_trajectory
from lgap.subspace import SubspaceBasis, orthonormal_basis

from conftest import INTERMODE_GAP_L7
from oracles import arx_behavior_generator, gram_schmidt

CFG = RecognitionConfig()


def true_basis(system, mode, L=7):
    md = system.mode(mode)
    return SubspaceBasis(gram_schmidt(arx_behavior_generator(md.a, md.b, L)))


def state_from(D):
    return RecognitionState(D=D, D_basis=orthonormal_basis(D, target_rank=CFG.dim))


def test_square_wave():
    ref = square_wave(1.0, 20)
    assert [ref(t) for t in (0, 9, 10, 19, 20)] == [1.0, 1.0, -1.0, -1.0, 1.0]


def test_config_validation():
    with pytest.raises(ValueError):
        RecognitionConfig(M=8)
    with pytest.raises(ValueError):
        RecognitionConfig(epsilon=0.0)
    assert CFG.L == 7 and CFG.dim == 9


def test_window_basis_noise_free(mode_data, clean_system):
    H = hankel(mode_data[1], 7)[:, -20:]
    basis, deficient = window_basis(H, 9)
    assert basis.rank == 9 and not deficient
    assert gap(basis, true_basis(clean_system, 1)).value <= 1e-6


def test_window_basis_exact_columns(rng):
    H = rng.standard_normal((14, 9))
    basis, deficient = window_basis(H, 9)
    assert not deficient
    resid = H - basis.columns @ (basis.columns.T @ H)
    assert np.linalg.norm(resid) <= 1e-12 * np.linalg.norm(H)


def test_window_basis_duplicated_columns(rng):
    H = np.repeat(rng.standard_normal((14, 3)), 4, axis=1)
    basis, deficient = window_basis(H, 9)
    assert basis.rank == 9 and deficient


def test_window_basis_too_few_columns(rng):
    with pytest.raises(WindowNotFull):
        window_basis(rng.standard_normal((14, 8)), 9)


def test_recognition_step_keep(mode_data):
    H = hankel(mode_data[0], 7)
    state = state_from(H[:, :30])
    swapped, value, _ = recognition_step(state, 0, CFG, H=H[:, -20:])
    assert not swapped and value <= 1e-6


def test_recognition_step_swap_at_intermode_gap(mode_data):
    D = hankel(mode_data[0], 7)
    H = hankel(mode_data[1], 7)[:, -20:]
    state = state_from(D)
    swapped, value, _ = recognition_step(state, 3, CFG, H=H)
    assert value == pytest.approx(INTERMODE_GAP_L7, abs=1e-9)
    assert swapped == (INTERMODE_GAP_L7 > 0.3)
    assert state.swaps == [3] and np.array_equal(state.D, H)
    # same window again: bases come from the same SVD, so the gap is exactly zero
    swapped, value, _ = recognition_step(state, 4, CFG, H=H)
    assert value == 0.0 and not swapped


def test_recognition_step_never_swaps_above_one(mode_data):
    cfg = RecognitionConfig(epsilon=1.1)
    state = state_from(hankel(mode_data[0], 7))
    swapped, value, _ = recognition_step(state, 0, cfg, H=hankel(mode_data[1], 7)[:, :20])
    assert not swapped and 0 < value <= 1


def test_state_window_slides():
    state = RecognitionState(D=np.eye(2), D_basis=SubspaceBasis(np.eye(2)))
    for t in range(12):
        state.push_sample([t, -t], L=3, M=4)
    H = state.window(4)
    assert H.shape == (6, 4)
    assert list(H[:, -1]) == [9, -9, 10, -10, 11, -11]
    with pytest.raises(WindowNotFull):
        state.window(5)


def test_mismatch_onsets():
    assert mismatch_onsets(case_study_schedule(), 0) == [0, 40]
    assert mismatch_onsets(ModeSchedule(((0, 0),)), 0) == []


def test_no_switch_run_has_no_swaps(noisy_system):
    cfg = RecognitionConfig(initial_data_mode=1)
    log = run_closed_loop(cfg, noisy_system, ModeSchedule(((0, 1),)))
    assert len(log.records) == cfg.horizon
    assert log.swap_times == []
    g = log.column("gap")
    assert np.all(g[~np.isnan(g)] < cfg.epsilon)


def test_gap_values_in_range(noisy_system):
    log = run_closed_loop(CFG, noisy_system, case_study_schedule())
    g = log.column("gap")
    assert np.all((g >= 0) & (g <= 1))


def test_baseline_never_swaps(noisy_system):
    log = run_closed_loop(RecognitionConfig(epsilon=math.inf), noisy_system, case_study_schedule())
    assert log.swap_times == [] and np.all(np.isnan(log.column("gap")))


def test_run_deterministic(noisy_system):
    a = run_closed_loop(CFG, noisy_system, case_study_schedule())
    b = run_closed_loop(CFG, noisy_system, case_study_schedule())
    for name in ("u", "y", "gap"):
        assert a.column(name).tobytes() == b.column(name).tobytes()
    assert a.swap_times == b.swap_times


def test_noise_free_prediction_matches_plant(clean_system):
    cfg = RecognitionConfig(initial_data_mode=0)
    log = run_closed_loop(cfg, clean_system, ModeSchedule(((0, 0),)))
    err = np.abs(log.column("y_pred") - log.column("y"))
    assert np.max(err) <= 1e-8


def test_warm_up_without_prefill(noisy_system):
    cfg = RecognitionConfig(prefill_window=False)
    log = run_closed_loop(cfg, noisy_system, case_study_schedule())
    g = log.column("gap")
    # the first column exists at t = L - T_ini - 1 + ... ; recognition waits for M of them
    first = int(np.argmax(~np.isnan(g)))
    assert first == cfg.M + cfg.L - 1 - cfg.T_ini
    assert np.all(np.isnan(g[:first]))


def test_supplied_data_matrix(clean_system, mode_data):
    D0 = hankel(mode_data[0], 7)
    log = run_closed_loop(RecognitionConfig(), clean_system, ModeSchedule(((0, 0),)), D0=D0)
    assert log.swap_times == []


def test_log_csv_round_trip(tmp_path, noisy_system):
    log = run_closed_loop(RecognitionConfig(horizon=25, epsilon=0.3), noisy_system,
                          case_study_schedule())
    path = tmp_path / "log.csv"
    log.write_csv(path)
    assert path.read_text().splitlines()[0] == ",".join(LOG_COLUMNS)
    back = ExperimentLog.read_csv(path)
    for name in ("t", "u", "y", "r", "swap", "mode"):
        assert np.array_equal(back.column(name), log.column(name))
    assert np.array_equal(back.column("gap"), log.column("gap"), equal_nan=True)
    assert back.swap_times == log.swap_times


def test_rmse_helpers():
    from lgap.recognition import StepRecord
    log = ExperimentLog([StepRecord(t, 0.0, float(t % 2), 0.0, math.nan, t == 4, 0)
                         for t in range(10)], swap_times=[4])
    assert log.rmse(0, 2) == pytest.approx(math.sqrt(0.5))
    assert math.isnan(log.rmse(20, 30))
    segs = log.segment_rmse([4])
    assert [(s["start"], s["stop"]) for s in segs] == [(0, 4), (4, 10)]
    sw = log.swap_rmse(span=2)[0]
    assert sw["before"] == pytest.approx(math.sqrt(0.5)) and sw["after"] == pytest.approx(math.sqrt(0.5))
