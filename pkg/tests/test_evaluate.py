import pytest
from hypothesis import given, strategies as st

from magnet.dataset import ClonePair
from magnet.errors import DegenerateLabels
from magnet.evaluate import compute_metrics, f1_score, tune_threshold


def pairs_from(labels, types=None):
    types = types or [None] * len(labels)
    return [ClonePair(f"a{i}", f"b{i}", label, t)
            for i, (label, t) in enumerate(zip(labels, types))]


def test_all_perfect():
    m = compute_metrics([1.0, 1.0], pairs_from([1, 1]), sigma=0.0)
    assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)


def test_perfect_confusion():
    m = compute_metrics([0.9, -0.9], pairs_from([1, 0]), sigma=0.0)
    assert (m.tp, m.fp, m.tn, m.fn) == (1, 0, 1, 0)
    assert m.f1 == 1.0


def test_two_thirds_case():
    # 2 TP, 1 FP, 1 FN -> P = R = F1 = 2/3
    scores = [0.8, 0.7, 0.6, -0.5]
    labels = [1, 1, 0, 1]
    m = compute_metrics(scores, pairs_from(labels), sigma=0.0)
    assert m.precision == pytest.approx(2 / 3)
    assert m.recall == pytest.approx(2 / 3)
    assert m.f1 == pytest.approx(2 / 3)


def test_threshold_is_strict():
    m = compute_metrics([0.5], pairs_from([1]), sigma=0.5)
    assert m.recall == 0.0  # y_hat = 1 iff s > sigma, not >=


def test_per_type_recall():
    scores = [0.9, -0.2, 0.8, 0.9]
    labels = [1, 1, 1, 0]
    types = ["T1", "T2", "T2", None]
    m = compute_metrics(scores, pairs_from(labels, types), sigma=0.0)
    assert m.per_type_recall == {"T1": 1.0, "T2": 0.5}
    # typed recalls bracket overall recall
    assert min(m.per_type_recall.values()) <= m.recall <= max(m.per_type_recall.values())


def test_f1_identity_on_emitted_metrics():
    scores = [0.9, 0.1, -0.4, 0.3]
    m = compute_metrics(scores, pairs_from([1, 0, 0, 1]), sigma=0.2)
    assert m.f1 == pytest.approx(f1_score(m.precision, m.recall))


def test_json_dict_keys():
    m = compute_metrics([0.9], pairs_from([1]), sigma=0.0)
    doc = m.to_json_dict(sigma=0.0, n_pairs=1)
    assert list(doc) == ["precision", "recall", "f1", "per_type", "sigma", "n_pairs"]


def test_tune_threshold_hand_swept():
    assert tune_threshold([0.2, 0.4, 0.8], [0, 1, 1]) == pytest.approx(0.3)


def test_tune_threshold_midpoint_of_gap():
    assert tune_threshold([-0.9, 0.9], [0, 1]) == pytest.approx(0.0)


def test_tune_threshold_inverted_labels_no_crash():
    sigma = tune_threshold([0.9, -0.9], [0, 1])
    assert isinstance(sigma, float)


def test_tune_threshold_degenerate():
    with pytest.raises(DegenerateLabels):
        tune_threshold([0.1, 0.2], [1, 1])


def test_tune_threshold_tie_breaks_larger():
    # both midpoints achieve F1 = 1 on this set; the larger sigma wins
    scores = [-0.5, 0.5, 0.6]
    labels = [0, 1, 1]
    assert tune_threshold(scores, labels) == pytest.approx(0.0)
    scores2 = [-0.5, -0.4, 0.6]
    labels2 = [0, 0, 1]
    assert tune_threshold(scores2, labels2) == pytest.approx(0.1)


@given(st.lists(st.tuples(st.floats(-1, 1), st.integers(0, 1)), min_size=2, max_size=40))
def test_monotone_threshold_property(pairs_data):
    scores = [s for s, _ in pairs_data]
    labels = [y for _, y in pairs_data]
    pairs = pairs_from(labels)
    sigmas = sorted({s for s in scores}) + [2.0]
    prev_recall = None
    prev_predicted = None
    for sigma in sigmas:
        m = compute_metrics(scores, pairs, sigma)
        predicted = m.tp + m.fp
        if prev_recall is not None:
            assert m.recall <= prev_recall + 1e-12
            assert predicted <= prev_predicted
        prev_recall, prev_predicted = m.recall, predicted
