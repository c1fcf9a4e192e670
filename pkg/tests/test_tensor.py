import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnet import tensor as T
from magnet.errors import NotScalar, ShapeMismatch
from magnet.optim import ParameterSet, grad_check
from magnet.rng import Rng
from magnet.tensor import Tensor, backward

from conftest import assert_close


def test_row_softmax_uniform():
    out = T.row_softmax(Tensor([[0.0, 0.0, 0.0]]))
    assert_close(out.data, [[1 / 3, 1 / 3, 1 / 3]], 1e-15)


def test_relu():
    assert_close(T.relu(Tensor([[-1.0, 2.0]])).data, [[0.0, 2.0]], 0.0)


def test_layer_norm_constant_row_is_zero():
    out = T.layer_norm(Tensor([[5.0, 5.0, 5.0]]), Tensor(np.ones(3)), Tensor(np.zeros(3)))
    assert_close(out.data, np.zeros((1, 3)), 1e-12)


def test_layer_norm_normalizes():
    x = Tensor([[1.0, 2.0, 3.0, 4.0]])
    out = T.layer_norm(x, Tensor(np.ones(4)), Tensor(np.zeros(4))).data
    assert abs(out.mean()) < 1e-12
    assert abs(out.std() - 1.0) < 1e-3  # epsilon guard skews variance slightly


def test_backward_sum():
    x = Tensor([1.0, 2.0], requires_grad=True)
    backward(T.sum_all(x))
    assert_close(x.grad, [1.0, 1.0], 0.0)


def test_backward_square():
    x = Tensor([3.0], requires_grad=True)
    backward(T.sum_all(T.elementwise_mul(x, x)))
    assert_close(x.grad, [6.0], 1e-12)


def test_backward_requires_scalar():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with pytest.raises(NotScalar):
        backward(T.relu(x))


def test_repeated_backward_accumulates():
    x = Tensor([2.0], requires_grad=True)
    loss = T.sum_all(T.elementwise_mul(x, x))
    backward(loss)
    first = x.grad.copy()
    loss2 = T.sum_all(T.elementwise_mul(x, x))
    backward(loss2)
    assert_close(x.grad, 2 * first, 1e-12)


def test_matmul_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        T.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    with pytest.raises(ShapeMismatch):
        T.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones(3)))


def test_dropout_eval_is_identity():
    x = Tensor(np.arange(12.0).reshape(3, 4))
    assert T.dropout(x, 0.5, "eval") is x


def test_dropout_train_scales_survivors():
    rng = Rng(0)
    x = Tensor(np.ones((50, 50)))
    out = T.dropout(x, 0.25, "train", rng).data
    unique = set(np.unique(out))
    assert unique <= {0.0, 1.0 / 0.75}
    dropped = float((out == 0).mean())
    assert 0.15 < dropped < 0.35


def test_dropout_seeded_reproducible():
    x = Tensor(np.ones((8, 8)))
    a = T.dropout(x, 0.5, "train", Rng(42)).data
    b = T.dropout(x, 0.5, "train", Rng(42)).data
    assert np.array_equal(a, b)


def test_dropout_requires_rng_and_valid_mode():
    with pytest.raises(ValueError):
        T.dropout(Tensor(np.ones(3)), 0.5, "train")
    with pytest.raises(ValueError):
        T.dropout(Tensor(np.ones(3)), 0.5, "training", Rng(0))


def test_no_grad_suppresses_tape():
    x = Tensor([1.0], requires_grad=True)
    with T.no_grad():
        y = T.relu(x)
    assert not y.requires_grad


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.floats(-50, 50), min_size=3, max_size=3), min_size=1, max_size=5))
def test_row_softmax_rows_sum_to_one(rows):
    out = T.row_softmax(Tensor(np.array(rows))).data
    assert np.all(out > 0.0)
    assert np.max(np.abs(out.sum(axis=-1) - 1.0)) <= 1e-12


def _composite_loss(params):
    """Touches every forward op (eval-mode dropout excluded: not differentiable noise)."""
    a, b, w, gain, bias, table = (params[k] for k in ("a", "b", "w", "gain", "bias", "table"))
    h = T.matmul(a, w)                                   # (4, 6)
    h = T.add(h, bias)
    h = T.layer_norm(h, gain, Tensor(np.zeros(6)))
    h = T.relu(h)
    att = T.row_softmax(T.scale(T.matmul(h, T.transpose(h)), 0.3))
    h = T.matmul(att, h)
    h = T.elementwise_mul(T.sigmoid(h), T.tanh(h))
    gathered = T.gather_rows(table, np.array([0, 2, 1, 2]))
    h = T.sub(h, gathered)
    stacked = T.concat_rows([h, gathered])          # (8, 6)
    wide = T.concat_cols([stacked, stacked])        # (8, 12)
    batched = T.reshape(wide, (2, 8, 6))
    prod = T.matmul(batched, T.transpose(batched, (0, 2, 1)))  # (2, 8, 8)
    pooled = T.mean_rows(T.reshape(prod, (8, 16)))  # (1, 16)
    pooled = T.add(pooled, T.sum_rows(b))
    norm = T.sqrt(T.sum_all(T.elementwise_mul(pooled, pooled)))
    return T.divide(T.sum_all(pooled), norm)


def test_grad_check_composite_all_ops():
    worst = 0.0
    for seed in range(20):
        rng = Rng(seed)
        params = ParameterSet()
        params.add("a", rng.normal((4, 5)))
        params.add("b", rng.normal((3, 16)))
        params.add("w", rng.normal((5, 6)))
        params.add("gain", rng.uniform((6,), 0.5, 1.5))
        params.add("bias", rng.normal((6,), 0.0, 0.1))
        params.add("table", rng.normal((3, 6)))
        report = grad_check(lambda p=params: _composite_loss(p), params, tol=1e-4)
        worst = max(worst, report.max_rel_error)
    assert worst < 1e-4, f"max relative error {worst}"


def test_grad_check_linear_is_exact():
    params = ParameterSet()
    params.add("x", np.array([1.0, -2.0, 3.0]))
    coeffs = Tensor(np.array([2.0, 0.5, -1.0]))
    report = grad_check(lambda: T.sum_all(T.elementwise_mul(params["x"], coeffs)), params)
    assert report.max_rel_error < 1e-9


def test_unbroadcast_bias_add():
    x = Tensor(np.ones((3, 4)), requires_grad=True)
    bias = Tensor(np.ones(4), requires_grad=True)
    backward(T.sum_all(T.add(x, bias)))
    assert_close(bias.grad, [3.0] * 4, 0.0)
    assert_close(x.grad, np.ones((3, 4)), 0.0)
