"""Training loop: splitting, class balancing, batched Adam updates, and the
plateau learning-rate schedule. Everything derives from one seeded RNG, so a
fixed seed reproduces the trajectory bit-for-bit in a single-threaded run.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .checkpoint import Checkpoint
from .dataset import ClonePair, Dataset
from .evaluate import tune_threshold
from .featurize import build_vocab, featurize_bundle, DEFAULT_TOKEN_BUCKETS
from .network import ModelConfig, forward_pair, init_params, mse_loss
from .optim import PlateauScheduler, adam_step
from .rng import Rng
from .tensor import backward, no_grad

DEFAULT_EPOCHS = 5
DEFAULT_BATCH_SIZE = 10
DEFAULT_LR = 5e-4


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[EpochStats]
    sigma: float
    train_pairs: list[ClonePair] = field(default_factory=list)
    val_pairs: list[ClonePair] = field(default_factory=list)
    test_pairs: list[ClonePair] = field(default_factory=list)


def split_pairs(pairs: list[ClonePair], rng: Rng,
                fractions: tuple[float, float] = (0.6, 0.2)) -> tuple[list, list, list]:
    """Shuffled 60/20/20 train/validation/test partition of the pair list."""
    shuffled = list(pairs)
    rng.shuffle(shuffled)
    n = len(shuffled)
    n_train = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    return shuffled[:n_train], shuffled[n_train:n_train + n_val], shuffled[n_train + n_val:]


def balance_pairs(pairs: list[ClonePair], rng: Rng) -> list[ClonePair]:
    """1:1 clone/nonclone by downsampling the majority class; order reshuffled."""
    clones = [p for p in pairs if p.label == 1]
    others = [p for p in pairs if p.label == 0]
    rng.shuffle(clones)
    rng.shuffle(others)
    keep = min(len(clones), len(others))
    out = clones[:keep] + others[:keep]
    rng.shuffle(out)
    return out


def _epoch_label(p: ClonePair) -> float:
    return 1.0 if p.label == 1 else -1.0


def train(dataset: Dataset, config: ModelConfig, seed: int,
          epochs: int = DEFAULT_EPOCHS, batch_size: int = DEFAULT_BATCH_SIZE,
          lr: float = DEFAULT_LR, token_buckets: int = DEFAULT_TOKEN_BUCKETS,
          log=lambda msg: print(msg, file=sys.stderr)) -> TrainResult:
    """Train on the dataset's pairs; returns the best-validation checkpoint,
    per-epoch history, and the validation-tuned decision threshold."""
    if not dataset.pairs:
        raise ValueError("dataset has no pairs")
    rng = Rng(seed)
    train_split, val_split, test_split = split_pairs(dataset.pairs, rng)
    train_set = balance_pairs(train_split, rng)
    if not train_set or not val_split:
        raise ValueError("training requires non-empty balanced train and validation splits")

    vocab = build_vocab([dataset.fragments[k] for k in sorted(dataset.fragments)], token_buckets)
    featurized = {fid: featurize_bundle(dataset.fragments[fid], vocab)
                  for fid in sorted(dataset.fragments)}
    params = init_params(config, vocab, rng)
    scheduler = PlateauScheduler(lr)

    def validation_pass(p):
        with no_grad():
            scores = [forward_pair(featurized[pair.id1], featurized[pair.id2], p, config,
                                   mode="eval").item() for pair in val_split]
        loss = sum((s - _epoch_label(pair)) ** 2
                   for s, pair in zip(scores, val_split)) / len(val_split)
        return scores, loss

    history: list[EpochStats] = []
    best_val = float("inf")
    best_params = None
    best_val_scores: list[float] = []
    for epoch in range(1, epochs + 1):
        current_lr = scheduler.lr
        order = list(train_set)
        rng.shuffle(order)
        running = 0.0
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            scores = [forward_pair(featurized[p.id1], featurized[p.id2], params, config,
                                   mode="train", rng=rng) for p in batch]
            loss = mse_loss(scores, [_epoch_label(p) for p in batch])
            params.zero_grad()
            backward(loss)
            adam_step(params, current_lr)
            running += loss.item() * len(batch)
        train_loss = running / len(order)
        val_scores, val_loss = validation_pass(params)
        history.append(EpochStats(epoch=epoch, train_loss=train_loss,
                                  val_loss=val_loss, lr=current_lr))
        log(f"epoch {epoch}: train_loss={train_loss:.6f} val_loss={val_loss:.6f} "
            f"lr={current_lr:.2e}")
        if val_loss < best_val:
            best_val = val_loss
            best_params = params.copy()
            best_val_scores = val_scores
        scheduler.step(val_loss)

    sigma = tune_threshold(best_val_scores, [p.label for p in val_split]) \
        if len({p.label for p in val_split}) == 2 else 0.0
    ckpt = Checkpoint.from_params(best_params, config, vocab, seed, best_val)
    return TrainResult(checkpoint=ckpt, history=history, sigma=sigma,
                       train_pairs=train_set, val_pairs=val_split, test_pairs=test_split)


def history_csv(history: list[EpochStats]) -> str:
    lines = ["epoch,train_loss,val_loss,lr"]
    lines += [f"{h.epoch},{h.train_loss!r},{h.val_loss!r},{h.lr!r}" for h in history]
    return "\n".join(lines) + "\n"
