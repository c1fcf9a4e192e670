"""Scoring, threshold classification, metrics, and threshold tuning."""
from __future__ import annotations

from dataclasses import dataclass, field

from .checkpoint import Checkpoint
from .dataset import ClonePair, Dataset
from .errors import DegenerateLabels
from .featurize import featurize_bundle
from .network import forward_pair
from .tensor import no_grad


@dataclass
class Metrics:
    precision: float
    recall: float
    f1: float
    per_type_recall: dict[str, float] = field(default_factory=dict)
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def to_json_dict(self, sigma: float, n_pairs: int) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_type": dict(sorted(self.per_type_recall.items())),
            "sigma": sigma,
            "n_pairs": n_pairs,
        }


def f1_score(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def compute_metrics(scores: list[float], pairs: list[ClonePair], sigma: float) -> Metrics:
    """Classify with y_hat = 1 iff score > sigma and tally the confusion matrix."""
    tp = fp = tn = fn = 0
    typed: dict[str, list[int]] = {}
    for s, pair in zip(scores, pairs):
        predicted = 1 if s > sigma else 0
        if pair.label == 1:
            tp += predicted
            fn += 1 - predicted
            if pair.clone_type:
                typed.setdefault(pair.clone_type, []).append(predicted)
        else:
            fp += predicted
            tn += 1 - predicted
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    per_type = {t: sum(hits) / len(hits) for t, hits in typed.items()}
    return Metrics(precision=precision, recall=recall, f1=f1_score(precision, recall),
                   per_type_recall=per_type, tp=tp, fp=fp, tn=tn, fn=fn)


def score_pairs(ckpt: Checkpoint, dataset: Dataset, pairs: list[ClonePair] | None = None) -> list[float]:
    """Forward every pair in eval mode under the checkpoint's weights."""
    pairs = dataset.pairs if pairs is None else pairs
    params = ckpt.to_params()
    featurized = {}
    scores = []
    with no_grad():
        for pair in pairs:
            for fid in (pair.id1, pair.id2):
                if fid not in featurized:
                    featurized[fid] = featurize_bundle(dataset.fragments[fid], ckpt.vocab)
            s = forward_pair(featurized[pair.id1], featurized[pair.id2],
                             params, ckpt.config, mode="eval")
            scores.append(s.item())
    return scores


def evaluate(ckpt: Checkpoint, dataset: Dataset, sigma: float,
             pairs: list[ClonePair] | None = None) -> Metrics:
    pairs = dataset.pairs if pairs is None else pairs
    return compute_metrics(score_pairs(ckpt, dataset, pairs), pairs, sigma)


def tune_threshold(scores: list[float], labels: list[int]) -> float:
    """F1-maximizing threshold over midpoints of sorted unique scores.

    Ties break toward the larger threshold. Requires both classes present.
    """
    if not (any(y == 1 for y in labels) and any(y == 0 for y in labels)):
        raise DegenerateLabels("threshold tuning needs at least one pair of each class")
    unique = sorted(set(scores))
    if len(unique) == 1:
        return unique[0]
    candidates = [(a + b) / 2.0 for a, b in zip(unique, unique[1:])]
    best_sigma = candidates[0]
    best_f1 = -1.0
    for sigma in candidates:
        tp = sum(1 for s, y in zip(scores, labels) if s > sigma and y == 1)
        fp = sum(1 for s, y in zip(scores, labels) if s > sigma and y == 0)
        fn = sum(1 for s, y in zip(scores, labels) if s <= sigma and y == 1)
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = f1_score(precision, recall)
        if f1 >= best_f1:
            best_f1 = f1
            best_sigma = sigma
    return best_sigma
