"""Named trainable parameters, Adam, plateau LR schedule, and gradient checking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import Rng
from .tensor import Tensor, backward


class ParameterSet:
    """Ordered name -> Tensor map with per-parameter Adam state."""

    def __init__(self):
        self._params: dict[str, Tensor] = {}
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self.step_count = 0

    def add(self, name: str, data: np.ndarray) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(data, requires_grad=True)
        self._params[name] = t
        self._m[name] = np.zeros_like(t.data)
        self._v[name] = np.zeros_like(t.data)
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self):
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def items(self):
        return self._params.items()

    def zero_grad(self):
        for p in self._params.values():
            p.zero_grad()

    def copy(self) -> "ParameterSet":
        """Deep copy of values and optimizer state (for best-epoch snapshots)."""
        out = ParameterSet()
        for name, p in self._params.items():
            out.add(name, p.data.copy())
            out._m[name] = self._m[name].copy()
            out._v[name] = self._v[name].copy()
        out.step_count = self.step_count
        return out

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: p.data for name, p in self._params.items()}


def adam_step(params: ParameterSet, lr: float, betas: tuple[float, float] = (0.9, 0.999),
              eps: float = 1e-8):
    """One bias-corrected Adam update over every parameter; clears gradients."""
    b1, b2 = betas
    params.step_count += 1
    t = params.step_count
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    for name, p in params.items():
        g = p.grad if p.grad is not None else np.zeros_like(p.data)
        m = params._m[name]
        v = params._v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.data -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    params.zero_grad()


class PlateauScheduler:
    """Halve the learning rate when validation loss stalls past the patience window."""

    def __init__(self, lr: float, patience: int = 1, factor: float = 0.5):
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.best: float | None = None
        self.bad_epochs = 0

    def step(self, val_loss: float) -> float:
        if self.best is None or val_loss < self.best:
            self.best = val_loss
            self.bad_epochs = 0
        else:
            self.bad_epochs += 1
            if self.bad_epochs > self.patience:
                self.lr *= self.factor
                self.bad_epochs = 0
        return self.lr


@dataclass
class GradCheckReport:
    max_rel_error: float = 0.0
    worst: str = ""
    entries_checked: int = 0
    per_param: dict[str, float] = field(default_factory=dict)

    def passed(self, tol: float = 1e-4) -> bool:
        return self.max_rel_error < tol


def grad_check(f, params: ParameterSet, h: float = 1e-5, tol: float = 1e-4,
               max_entries_per_tensor: int | None = None, rng: Rng | None = None,
               h_fallbacks: tuple[float, ...] = ()) -> GradCheckReport:
    """Central-difference check of autodiff gradients.

    ``f`` runs a fresh forward pass and returns the scalar loss Tensor. By
    default every parameter entry is perturbed; ``max_entries_per_tensor``
    samples a seeded subset per tensor to bound runtime on large tables.
    Relative error is |a - n| / (|a| + |n| + 1e-12).

    ``h_fallbacks`` lists extra step sizes tried when the base step does not
    reach ``tol`` for an entry; the entry's error is the best across steps.
    Step sweeps are standard hygiene: tiny true gradients drown in roundoff
    at small h, while larger h can straddle a ReLU kink. A wrong analytic
    gradient disagrees at every step size.
    """
    params.zero_grad()
    backward(f())
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for name, p in params.items()}
    params.zero_grad()

    def central_diff(flat, i, step):
        saved = flat[i]
        flat[i] = saved + step
        up = f().item()
        flat[i] = saved - step
        down = f().item()
        flat[i] = saved
        return (up - down) / (2.0 * step)

    report = GradCheckReport()
    for name in sorted(analytic):
        p = params[name]
        flat = p.data.reshape(-1)
        n_entries = flat.size
        if max_entries_per_tensor is not None and n_entries > max_entries_per_tensor:
            if rng is None:
                rng = Rng(0)
            chosen = sorted({rng.below(n_entries) for _ in range(max_entries_per_tensor)})
        else:
            chosen = range(n_entries)
        worst_here = 0.0
        for i in chosen:
            a = analytic[name].reshape(-1)[i]
            rel = None
            for step in (h, *h_fallbacks):
                numeric = central_diff(flat, i, step)
                candidate = abs(a - numeric) / (abs(a) + abs(numeric) + 1e-12)
                rel = candidate if rel is None else min(rel, candidate)
                if rel < tol:
                    break
            worst_here = max(worst_here, rel)
            report.entries_checked += 1
            if rel > report.max_rel_error:
                report.max_rel_error = rel
                report.worst = f"{name}[{i}]"
        report.per_param[name] = worst_here
    return report
