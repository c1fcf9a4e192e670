"""Ablation orchestration: train + evaluate one row per configuration variant,
all under the same seed and split protocol."""
from __future__ import annotations

import sys
from dataclasses import dataclass, replace

from .dataset import Dataset
from .evaluate import Metrics, evaluate
from .network import ModelConfig
from .training import train


@dataclass
class AblationRow:
    name: str
    config: ModelConfig
    sigma: float
    metrics: Metrics
    n_test_pairs: int


def view_grid(base: ModelConfig) -> list[tuple[str, ModelConfig]]:
    subsets = [("AST",), ("CFG",), ("DFG",), ("AST", "CFG"), ("AST", "DFG"),
               ("CFG", "DFG"), ("AST", "CFG", "DFG")]
    return [("views=" + "+".join(s), replace(base, views=s)) for s in subsets]


def component_grid(base: ModelConfig) -> list[tuple[str, ModelConfig]]:
    return [
        ("full", replace(base)),
        ("no-residual", replace(base, use_residual=False)),
        ("no-intra-attn", replace(base, use_intra_attn=False)),
        ("no-cross-attn", replace(base, use_cross_attn=False)),
        ("mean-pooling", replace(base, pooling="mean")),
    ]


def component_product_grid(base: ModelConfig) -> list[tuple[str, ModelConfig]]:
    rows = []
    for res in (True, False):
        for intra in (True, False):
            for cross in (True, False):
                name = (f"residual={'on' if res else 'off'},"
                        f"intra={'on' if intra else 'off'},"
                        f"cross={'on' if cross else 'off'}")
                rows.append((name, replace(base, use_residual=res, use_intra_attn=intra,
                                           use_cross_attn=cross)))
    return rows


def full_grid(base: ModelConfig) -> list[tuple[str, ModelConfig]]:
    return view_grid(base) + component_product_grid(base)


def run_ablation(dataset: Dataset, grid: list[tuple[str, ModelConfig]], seed: int,
                 epochs: int = 5, batch_size: int = 10, lr: float = 5e-4,
                 token_buckets: int = 1024,
                 log=lambda msg: print(msg, file=sys.stderr)) -> list[AblationRow]:
    rows = []
    for name, config in grid:
        log(f"ablation variant: {name}")
        result = train(dataset, config, seed, epochs=epochs, batch_size=batch_size,
                       lr=lr, token_buckets=token_buckets, log=log)
        metrics = evaluate(result.checkpoint, dataset, result.sigma,
                           pairs=result.test_pairs)
        rows.append(AblationRow(name=name, config=config, sigma=result.sigma,
                                metrics=metrics, n_test_pairs=len(result.test_pairs)))
    return rows


def ablation_tsv(rows: list[AblationRow]) -> str:
    lines = ["variant\tviews\tresidual\tintra_attn\tcross_attn\tpooling\tsigma"
             "\tprecision\trecall\tf1\tn_test_pairs"]
    for row in rows:
        c = row.config
        m = row.metrics
        lines.append("\t".join([
            row.name, "+".join(c.views), str(c.use_residual), str(c.use_intra_attn),
            str(c.use_cross_attn), c.pooling, f"{row.sigma:.6f}",
            f"{m.precision:.4f}", f"{m.recall:.4f}", f"{m.f1:.4f}", str(row.n_test_pairs),
        ]))
    return "\n".join(lines) + "\n"
