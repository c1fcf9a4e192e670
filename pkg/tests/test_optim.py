import numpy as np

from magnet.optim import ParameterSet, PlateauScheduler, adam_step

from conftest import assert_close


def make_params(value):
    params = ParameterSet()
    params.add("w", np.array(value, dtype=np.float64))
    return params


def test_zero_gradient_leaves_parameter_unchanged():
    params = make_params([1.0, -2.0])
    params["w"].grad = np.zeros(2)
    adam_step(params, lr=0.1)
    assert_close(params["w"].data, [1.0, -2.0], 0.0)


def test_missing_gradient_treated_as_zero():
    params = make_params([4.0])
    adam_step(params, lr=0.1)
    assert_close(params["w"].data, [4.0], 0.0)


def test_first_step_magnitude_is_lr():
    # bias correction makes step 1 scale-free: |update| ~= lr up to eps/|g|
    for g in (1e-3, 1.0, 1e6):
        params = make_params([0.0])
        params["w"].grad = np.array([g])
        adam_step(params, lr=1e-3)
        assert abs(abs(params["w"].data[0]) - 1e-3) < 1e-3 * 2e-5


def test_two_step_recurrence_matches_hand_rolled():
    g1, g2 = 0.7, -0.7
    lr, b1, b2, eps = 0.01, 0.9, 0.999, 1e-8
    params = make_params([0.5])
    # hand recurrence
    w = 0.5
    m = v = 0.0
    for t, g in ((1, g1), (2, g2)):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        w -= lr * (m / (1 - b1 ** t)) / (np.sqrt(v / (1 - b2 ** t)) + eps)
    for g in (g1, g2):
        params["w"].grad = np.array([g])
        adam_step(params, lr=lr, betas=(b1, b2), eps=eps)
    assert_close(params["w"].data, [w], 1e-15)


def test_gradients_cleared_after_step():
    params = make_params([1.0])
    params["w"].grad = np.array([2.0])
    adam_step(params, lr=0.1)
    assert params["w"].grad is None


def test_plateau_improving_loss_keeps_lr():
    sched = PlateauScheduler(5e-4)
    sched.step(1.0)
    sched.step(0.9)
    assert sched.lr == 5e-4


def test_plateau_decays_after_patience_window():
    sched = PlateauScheduler(5e-4)
    for loss in (1.0, 1.0, 1.0):
        sched.step(loss)
    assert sched.lr == 2.5e-4


def test_plateau_reset_on_improvement():
    sched = PlateauScheduler(5e-4)
    for loss in (1.0, 1.1, 0.8):
        sched.step(loss)
    assert sched.lr >= 2.5e-4  # at most one decay event


def test_plateau_repeated_decay():
    sched = PlateauScheduler(8e-4)
    for loss in (1.0, 1.0, 1.0, 1.0, 1.0):
        sched.step(loss)
    # decays at epochs 3 and 5 (bad streak resets after each decay)
    assert sched.lr == 2e-4


def test_parameter_set_copy_is_deep():
    params = make_params([1.0])
    params["w"].grad = np.array([1.0])
    adam_step(params, lr=0.1)
    clone = params.copy()
    clone["w"].data[0] = 99.0
    assert params["w"].data[0] != 99.0
    assert clone.step_count == params.step_count
