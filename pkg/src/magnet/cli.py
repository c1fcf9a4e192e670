"""Command-line interface.

Exit codes: 0 success, 1 user/data error, 2 internal invariant violation.
stdout carries machine-parseable output only (JSON, or the one-line compare
format); human diagnostics go to stderr. A key=value config file can supply
defaults for any flag; explicit flags win. MAGNET_SEED is the seed fallback.
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
from click.core import ParameterSource

from .ablation import (ablation_tsv, component_grid, full_grid, run_ablation, view_grid)
from .bundle import build_bundle
from .checkpoint import load_checkpoint, save_checkpoint
from .dataset import load_dataset
from .errors import (CheckpointError, DegenerateLabels, FormatError, LexError,
                     MagnetError, ParseError, UnsupportedConstruct)
from .evaluate import compute_metrics, score_pairs, tune_threshold
from .export import to_dot, to_json
from .featurize import DEFAULT_TOKEN_BUCKETS, featurize_bundle
from .network import ModelConfig, forward_pair
from .report import save_ablation_figure, save_history_figure
from .training import (DEFAULT_BATCH_SIZE, DEFAULT_EPOCHS, DEFAULT_LR, history_csv, train)
from . import toygen

_USER_ERRORS = (LexError, ParseError, UnsupportedConstruct, FormatError,
                CheckpointError, DegenerateLabels, OSError)


class CliFailure(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _warn(msg: str):
    print(msg, file=sys.stderr)


def _emit(obj):
    print(json.dumps(obj, sort_keys=True))


def _load_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliFailure(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _merged(ctx: click.Context, file_cfg: dict[str, str]):
    """Resolve each option: explicit flag > config file > declared default."""
    known = {p.name: p for p in ctx.command.params}
    for key in file_cfg:
        if key not in known or key == "config":
            raise CliFailure(f"config file: unknown key {key!r}")
    merged = dict(ctx.params)
    for name, param in known.items():
        if name in ("config",) or name not in file_cfg:
            continue
        if ctx.get_parameter_source(name) == ParameterSource.COMMANDLINE:
            continue
        merged[name] = param.type.convert(file_cfg[name], param, ctx)
    return merged


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("MAGNET_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliFailure(f"MAGNET_SEED must be an integer, got {env!r}")
    return 0


def _parse_views(text: str) -> tuple[str, ...]:
    views = tuple(v.strip().upper() for v in text.split(",") if v.strip())
    if not views:
        raise CliFailure("--views must name at least one of ast,cfg,dfg")
    return views


def _build_config(opts) -> ModelConfig:
    try:
        return ModelConfig(views=_parse_views(opts["views"]),
                           use_residual=not opts["no_residual"],
                           use_intra_attn=not opts["no_intra_attn"],
                           use_cross_attn=not opts["no_cross_attn"],
                           pooling=opts["pooling"])
    except ValueError as exc:
        raise CliFailure(str(exc))


def _frontend_diag(path: str, exc: MagnetError) -> str:
    line = getattr(exc, "line", None)
    col = getattr(exc, "col", None)
    if line is not None:
        message = getattr(exc, "message", None) or str(exc).split(": ", 1)[-1]
        return f"{path}:{line}:{col}: {message}"
    return f"{path}: {exc}"


@click.group(name="magnet")
def cli():
    """Multi-graph code clone detection toolkit."""


_config_option = click.option("--config", type=click.Path(exists=True, dir_okay=False),
                              default=None, help="key=value file with flag defaults")


@cli.command("graph")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--view", type=click.Choice(["ast", "cfg", "dfg", "all"]), default="all")
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot")
@click.option("--out", required=True, type=click.Path())
@_config_option
@click.pass_context
def cmd_graph(ctx, input_path, view, fmt, out, config):
    """Export AST/CFG/DFG graphs of one source file."""
    opts = _merged(ctx, _load_config_file(config))
    view, fmt, out = opts["view"], opts["fmt"], opts["out"]
    source = Path(opts["input_path"]).read_text(encoding="utf-8")
    try:
        bundle = build_bundle(source, Path(opts["input_path"]).stem)
    except (LexError, ParseError, UnsupportedConstruct) as exc:
        raise CliFailure(_frontend_diag(opts["input_path"], exc))
    render = to_dot if fmt == "dot" else to_json
    written = []
    if view == "all":
        for name in ("ast", "cfg", "dfg"):
            path = f"{out}.{name}"
            Path(path).write_text(render(bundle.view(name.upper())), encoding="utf-8")
            written.append(path)
    else:
        Path(out).write_text(render(bundle.view(view.upper())), encoding="utf-8")
        written.append(out)
    _emit({"written": written})


@cli.command("train")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path())
@click.option("--epochs", type=int, default=DEFAULT_EPOCHS, show_default=True)
@click.option("--batch", type=int, default=DEFAULT_BATCH_SIZE, show_default=True)
@click.option("--lr", type=float, default=DEFAULT_LR, show_default=True)
@click.option("--seed", type=int, default=None, help="falls back to MAGNET_SEED, then 0")
@click.option("--views", default="ast,cfg,dfg", show_default=True)
@click.option("--no-residual", is_flag=True)
@click.option("--no-intra-attn", is_flag=True)
@click.option("--no-cross-attn", is_flag=True)
@click.option("--pooling", type=click.Choice(["set2set", "mean", "global_attn"]),
              default="set2set", show_default=True)
@click.option("--token-buckets", type=int, default=DEFAULT_TOKEN_BUCKETS, show_default=True)
@_config_option
@click.pass_context
def cmd_train(ctx, **kwargs):
    """Train a model; writes checkpoint, history CSV, and history figure."""
    opts = _merged(ctx, _load_config_file(kwargs["config"]))
    seed = _resolve_seed(opts["seed"])
    config = _build_config(opts)
    dataset = load_dataset(opts["manifest"], opts["pairs"], warn=_warn)
    result = train(dataset, config, seed, epochs=opts["epochs"], batch_size=opts["batch"],
                   lr=opts["lr"], token_buckets=opts["token_buckets"], log=_warn)
    out = opts["out"]
    save_checkpoint(result.checkpoint, out)
    csv_path = f"{out}.history.csv"
    png_path = f"{out}.history.png"
    Path(csv_path).write_text(history_csv(result.history), encoding="utf-8")
    save_history_figure(result.history, png_path)
    _emit({
        "checkpoint": out,
        "seed": seed,
        "epochs": opts["epochs"],
        "best_val_loss": result.checkpoint.best_val_loss,
        "sigma": result.sigma,
        "history_csv": csv_path,
        "history_png": png_path,
        "n_train_pairs": len(result.train_pairs),
        "n_val_pairs": len(result.val_pairs),
        "n_test_pairs": len(result.test_pairs),
    })


@cli.command("eval")
@click.option("--ckpt", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sigma", type=float, default=None,
              help="decision threshold (default 0.0 unless --tune-sigma)")
@click.option("--tune-sigma", is_flag=True, help="pick the F1-maximizing threshold")
@_config_option
@click.pass_context
def cmd_eval(ctx, **kwargs):
    """Score labeled pairs and print metrics JSON."""
    opts = _merged(ctx, _load_config_file(kwargs["config"]))
    ckpt = load_checkpoint(opts["ckpt"])
    dataset = load_dataset(opts["manifest"], opts["pairs"], warn=_warn)
    if not dataset.pairs:
        raise CliFailure("no pairs")
    scores = score_pairs(ckpt, dataset)
    if opts["tune_sigma"]:
        sigma = tune_threshold(scores, [p.label for p in dataset.pairs])
    elif opts["sigma"] is not None:
        sigma = opts["sigma"]
    else:
        sigma = 0.0
    metrics = compute_metrics(scores, dataset.pairs, sigma)
    _emit(metrics.to_json_dict(sigma, len(dataset.pairs)))


@cli.command("compare")
@click.option("--ckpt", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--a", "path_a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sigma", type=float, default=0.0, show_default=True)
@_config_option
@click.pass_context
def cmd_compare(ctx, **kwargs):
    """Score one pair of files: prints 'score=<s> clone=<0|1>'."""
    opts = _merged(ctx, _load_config_file(kwargs["config"]))
    ckpt = load_checkpoint(opts["ckpt"])
    bundles = []
    for path in (opts["path_a"], opts["path_b"]):
        try:
            bundles.append(build_bundle(Path(path).read_text(encoding="utf-8"), path))
        except (LexError, ParseError, UnsupportedConstruct) as exc:
            raise CliFailure(_frontend_diag(path, exc))
    params = ckpt.to_params()
    fb1, fb2 = (featurize_bundle(b, ckpt.vocab) for b in bundles)
    score = forward_pair(fb1, fb2, params, ckpt.config, mode="eval").item()
    print(f"score={score:.6f} clone={1 if score > opts['sigma'] else 0}")


@cli.command("ablate")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--grid", type=click.Choice(["views", "components", "full"]),
              default="components", show_default=True)
@click.option("--epochs", type=int, default=DEFAULT_EPOCHS, show_default=True)
@click.option("--batch", type=int, default=DEFAULT_BATCH_SIZE, show_default=True)
@click.option("--lr", type=float, default=DEFAULT_LR, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--token-buckets", type=int, default=DEFAULT_TOKEN_BUCKETS, show_default=True)
@_config_option
@click.pass_context
def cmd_ablate(ctx, **kwargs):
    """Train and evaluate a grid of config variants under one protocol."""
    opts = _merged(ctx, _load_config_file(kwargs["config"]))
    seed = _resolve_seed(opts["seed"])
    dataset = load_dataset(opts["manifest"], opts["pairs"], warn=_warn)
    base = ModelConfig()
    grid = {"views": view_grid, "components": component_grid, "full": full_grid}[opts["grid"]](base)
    rows = run_ablation(dataset, grid, seed, epochs=opts["epochs"], batch_size=opts["batch"],
                        lr=opts["lr"], token_buckets=opts["token_buckets"], log=_warn)
    out_dir = Path(opts["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    tsv_path = out_dir / "ablation.tsv"
    png_path = out_dir / "ablation.png"
    tsv_path.write_text(ablation_tsv(rows), encoding="utf-8")
    save_ablation_figure(rows, png_path)
    _emit({
        "table": str(tsv_path),
        "figure": str(png_path),
        "seed": seed,
        "rows": [{"variant": r.name, "sigma": r.sigma, "precision": r.metrics.precision,
                  "recall": r.metrics.recall, "f1": r.metrics.f1,
                  "n_test_pairs": r.n_test_pairs} for r in rows],
    })


@cli.command("toygen")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--templates", type=int, default=8, show_default=True)
@click.option("--variants", type=int, default=16, show_default=True)
@click.option("--pairs", "n_pairs", type=int, default=2000, show_default=True)
@_config_option
@click.pass_context
def cmd_toygen(ctx, **kwargs):
    """Generate the synthetic clone corpus (sources + manifest + pairs)."""
    opts = _merged(ctx, _load_config_file(kwargs["config"]))
    seed = _resolve_seed(opts["seed"])
    try:
        summary = toygen.generate(opts["out"], seed=seed, n_templates=opts["templates"],
                                  n_variants=opts["variants"], n_pairs=opts["n_pairs"])
    except ValueError as exc:
        raise CliFailure(str(exc))
    _emit(summary)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except CliFailure as exc:
        _warn(f"error: {exc}")
        return exc.code
    except click.UsageError as exc:
        _warn(f"error: {exc.format_message()}")
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        _warn("aborted")
        return 1
    except _USER_ERRORS as exc:
        _warn(f"error: {exc}")
        return 1
    except MagnetError as exc:
        _warn(f"internal error: {exc}")
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort: invariant violation
        _warn(f"internal error: {type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
