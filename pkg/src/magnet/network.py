"""The clone-scoring network.

Per view and per fragment: embed nodes, residual GCN stack, node self-attention,
then gated cross-attention against the partner fragment's same view. Node states
from all enabled views are concatenated row-wise and pooled (Set2Set by default)
into one vector per fragment; the score is the cosine of the two vectors. All
weights are shared across fragments and views (Siamese setup), so the score is
symmetric in its arguments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import EmptyGraph, IndexOutOfVocab, LengthMismatch, ViewMismatch, ZeroVector
from .featurize import FeaturizedBundle, FeaturizedGraph, Vocab
from .optim import ParameterSet
from .rng import Rng
from .tensor import Tensor

CANONICAL_VIEWS = ("AST", "CFG", "DFG")
POOLING_MODES = ("set2set", "mean", "global_attn")


@dataclass
class ModelConfig:
    d: int = 128
    gcn_layers: int = 3
    heads: int = 8
    head_dim: int = 64
    dropout: float = 0.1
    ffn_mult: int = 4
    set2set_steps: int = 3
    use_residual: bool = True
    use_intra_attn: bool = True
    use_cross_attn: bool = True
    use_tokens: bool = True
    pooling: str = "set2set"
    views: tuple[str, ...] = CANONICAL_VIEWS
    attn_scale: str = "head"  # "head": 1/sqrt(head_dim); "model": 1/sqrt(d)

    def __post_init__(self):
        self.views = tuple(v.upper() for v in self.views)
        if not self.views or any(v not in CANONICAL_VIEWS for v in self.views):
            raise ValueError(f"views must be a non-empty subset of {CANONICAL_VIEWS}")
        # keep canonical order regardless of how the subset was written
        self.views = tuple(v for v in CANONICAL_VIEWS if v in self.views)
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}")
        if self.attn_scale not in ("head", "model"):
            raise ValueError("attn_scale must be 'head' or 'model'")
        if min(self.d, self.gcn_layers, self.heads, self.head_dim, self.set2set_steps) <= 0:
            raise ValueError("dimensions and depths must be positive")

    def to_dict(self) -> dict:
        return {
            "d": self.d, "gcn_layers": self.gcn_layers, "heads": self.heads,
            "head_dim": self.head_dim, "dropout": self.dropout, "ffn_mult": self.ffn_mult,
            "set2set_steps": self.set2set_steps, "use_residual": self.use_residual,
            "use_intra_attn": self.use_intra_attn, "use_cross_attn": self.use_cross_attn,
            "use_tokens": self.use_tokens, "pooling": self.pooling,
            "views": list(self.views), "attn_scale": self.attn_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["views"] = tuple(d["views"])
        return cls(**d)


def _uniform(rng: Rng, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(shape, -bound, bound)


def init_params(config: ModelConfig, vocab: Vocab, rng: Rng) -> ParameterSet:
    """Create all trainable tensors for the enabled components, in a fixed order."""
    d = config.d
    hd = config.heads * config.head_dim
    params = ParameterSet()
    params.add("embed.kind", rng.normal((vocab.n_kinds, d), 0.0, 0.02))
    if config.use_tokens:
        params.add("embed.token", rng.normal((vocab.token_bucket_count, d), 0.0, 0.02))
    for layer in range(1, config.gcn_layers + 1):
        params.add(f"gcn.w{layer}", _uniform(rng, (d, d), d))

    def attention_block(prefix: str):
        params.add(f"{prefix}.ln1.g", np.ones(d))
        params.add(f"{prefix}.ln1.b", np.zeros(d))
        for name in ("wq", "wk", "wv"):
            params.add(f"{prefix}.{name}", _uniform(rng, (d, hd), d))
        params.add(f"{prefix}.wo", _uniform(rng, (hd, d), hd))
        params.add(f"{prefix}.ln2.g", np.ones(d))
        params.add(f"{prefix}.ln2.b", np.zeros(d))
        params.add(f"{prefix}.ffn.w1", _uniform(rng, (d, config.ffn_mult * d), d))
        params.add(f"{prefix}.ffn.b1", np.zeros(config.ffn_mult * d))
        params.add(f"{prefix}.ffn.w2", _uniform(rng, (config.ffn_mult * d, d), config.ffn_mult * d))
        params.add(f"{prefix}.ffn.b2", np.zeros(d))

    if config.use_intra_attn:
        attention_block("intra")
    if config.use_cross_attn:
        attention_block("cross")
        for gate in ("z", "r", "h"):
            params.add(f"gru.w{gate}", _uniform(rng, (d, d), d))
            params.add(f"gru.u{gate}", _uniform(rng, (d, d), d))
            params.add(f"gru.b{gate}", np.zeros(d))
    if config.pooling == "set2set":
        for gate in ("i", "f", "g", "o"):
            params.add(f"s2s.w{gate}", _uniform(rng, (2 * d, d), 2 * d))
            params.add(f"s2s.u{gate}", _uniform(rng, (d, d), d))
            params.add(f"s2s.b{gate}", np.zeros(d))
    if config.pooling == "global_attn":
        params.add("pool.q", _uniform(rng, (d, 1), d))
    return params


# ---------------------------------------------------------------------------
# stages

def embed_nodes(fg: FeaturizedGraph, params: ParameterSet, config: ModelConfig) -> Tensor:
    """Initial node states: kind embedding, plus token embedding where present,
    plus the mean of member-statement kind embeddings for basic blocks."""
    kind_table = params["embed.kind"]
    n_kinds = kind_table.data.shape[0]
    if fg.kind_indices.size and int(fg.kind_indices.max()) >= n_kinds:
        raise IndexOutOfVocab(f"kind index {int(fg.kind_indices.max())} >= {n_kinds}")
    h = T.gather_rows(kind_table, fg.kind_indices)

    if config.use_tokens and "embed.token" in params:
        tok_table = params["embed.token"]
        buckets = tok_table.data.shape[0]
        has_token = fg.token_indices >= 0
        if has_token.any():
            if int(fg.token_indices.max()) >= buckets:
                raise IndexOutOfVocab(f"token index {int(fg.token_indices.max())} >= {buckets}")
            idx = np.where(has_token, fg.token_indices, 0)
            mask = Tensor(has_token.astype(np.float64)[:, None])
            h = T.add(h, T.elementwise_mul(T.gather_rows(tok_table, idx), mask))

    if fg.block_members:
        rows = []
        member_idx = []
        for row, members in sorted(fg.block_members.items()):
            for m in members:
                rows.append((row, 1.0 / len(members)))
                member_idx.append(m)
        weights = np.zeros((fg.n_nodes, len(member_idx)))
        for col, (row, w) in enumerate(rows):
            weights[row, col] = w
        mem = T.matmul(Tensor(weights), T.gather_rows(kind_table, np.array(member_idx)))
        h = T.add(h, mem)
    return h


def residual_gcn(h0: Tensor, adj: Tensor, params: ParameterSet, config: ModelConfig) -> Tensor:
    """Stacked graph convolutions; layer outputs are summed unless residuals are off."""
    h = h0
    total = None
    for layer in range(1, config.gcn_layers + 1):
        h = T.relu(T.matmul(T.matmul(adj, h), params[f"gcn.w{layer}"]))
        total = h if total is None else T.add(total, h)
    return total if config.use_residual else h


def _attn_scale(config: ModelConfig) -> float:
    dim = config.head_dim if config.attn_scale == "head" else config.d
    return 1.0 / np.sqrt(dim)


def _split_heads(x: Tensor, config: ModelConfig) -> Tensor:
    n = x.data.shape[0]
    return T.transpose(T.reshape(x, (n, config.heads, config.head_dim)), (1, 0, 2))


def _merge_heads(x: Tensor, config: ModelConfig) -> Tensor:
    n = x.data.shape[1]
    return T.reshape(T.transpose(x, (1, 0, 2)), (n, config.heads * config.head_dim))


def _multi_head(q_src: Tensor, kv_src: Tensor, params: ParameterSet, prefix: str,
                config: ModelConfig) -> Tensor:
    q = _split_heads(T.matmul(q_src, params[f"{prefix}.wq"]), config)
    k = _split_heads(T.matmul(kv_src, params[f"{prefix}.wk"]), config)
    v = _split_heads(T.matmul(kv_src, params[f"{prefix}.wv"]), config)
    scores = T.scale(T.matmul(q, T.transpose(k, (0, 2, 1))), _attn_scale(config))
    ctx = T.matmul(T.row_softmax(scores), v)
    return T.matmul(_merge_heads(ctx, config), params[f"{prefix}.wo"])


def _ffn(x: Tensor, params: ParameterSet, prefix: str) -> Tensor:
    inner = T.relu(T.add(T.matmul(x, params[f"{prefix}.w1"]), params[f"{prefix}.b1"]))
    return T.add(T.matmul(inner, params[f"{prefix}.w2"]), params[f"{prefix}.b2"])


def intra_attention(h_gcn: Tensor, params: ParameterSet, config: ModelConfig,
                    mode: str = "eval", rng: Rng | None = None) -> Tensor:
    """Pre-norm self-attention with residuals and a feed-forward block."""
    normed = T.layer_norm(h_gcn, params["intra.ln1.g"], params["intra.ln1.b"])
    attended = _multi_head(normed, normed, params, "intra", config)
    h1 = T.add(T.dropout(attended, config.dropout, mode, rng), h_gcn)
    f = _ffn(T.layer_norm(h1, params["intra.ln2.g"], params["intra.ln2.b"]), params, "intra.ffn")
    return T.add(T.dropout(f, config.dropout, mode, rng), h1)


def cross_attention(h1: Tensor, h2: Tensor, params: ParameterSet, config: ModelConfig,
                    view1: str | None = None, view2: str | None = None) -> tuple[Tensor, Tensor]:
    """Bidirectional attention between paired fragments; weights shared both ways."""
    if view1 is not None and view2 is not None and view1 != view2:
        raise ViewMismatch(f"cross attention pairs matching views, got {view1} vs {view2}")
    x1 = T.layer_norm(h1, params["cross.ln1.g"], params["cross.ln1.b"])
    x2 = T.layer_norm(h2, params["cross.ln1.g"], params["cross.ln1.b"])
    o1 = _multi_head(x1, x2, params, "cross", config)
    o2 = _multi_head(x2, x1, params, "cross", config)
    m1 = _ffn(T.layer_norm(o1, params["cross.ln2.g"], params["cross.ln2.b"]), params, "cross.ffn")
    m2 = _ffn(T.layer_norm(o2, params["cross.ln2.g"], params["cross.ln2.b"]), params, "cross.ffn")
    return m1, m2


def gru_update(m: Tensor, h: Tensor, params: ParameterSet) -> Tensor:
    """Row-wise GRU cell: m is the input, h the previous state."""
    z = T.sigmoid(T.add(T.add(T.matmul(m, params["gru.wz"]), T.matmul(h, params["gru.uz"])),
                        params["gru.bz"]))
    r = T.sigmoid(T.add(T.add(T.matmul(m, params["gru.wr"]), T.matmul(h, params["gru.ur"])),
                        params["gru.br"]))
    cand = T.tanh(T.add(T.add(T.matmul(m, params["gru.wh"]),
                              T.matmul(T.elementwise_mul(r, h), params["gru.uh"])),
                        params["gru.bh"]))
    one_minus_z = T.sub(Tensor(1.0), z)
    return T.add(T.elementwise_mul(one_minus_z, h), T.elementwise_mul(z, cand))


def _lstm_cell(x: Tensor, h: Tensor, c: Tensor, params: ParameterSet) -> tuple[Tensor, Tensor]:
    def gate(name, activation):
        return activation(T.add(T.add(T.matmul(x, params[f"s2s.w{name}"]),
                                      T.matmul(h, params[f"s2s.u{name}"])),
                                params[f"s2s.b{name}"]))
    i = gate("i", T.sigmoid)
    f = gate("f", T.sigmoid)
    g = gate("g", T.tanh)
    o = gate("o", T.sigmoid)
    c_new = T.add(T.elementwise_mul(f, c), T.elementwise_mul(i, g))
    return T.elementwise_mul(o, T.tanh(c_new)), c_new


def fuse_and_pool(states: list[Tensor], params: ParameterSet, config: ModelConfig) -> Tensor:
    """Concatenate per-view node states row-wise and pool to one (1, 2d) vector."""
    h_all = T.concat_rows(states) if len(states) > 1 else states[0]
    n = h_all.data.shape[0]
    if n == 0:
        raise EmptyGraph("cannot pool an empty node set")
    d = config.d

    if config.pooling == "mean":
        m = T.mean_rows(h_all)
        return T.concat_cols([m, m])

    if config.pooling == "global_attn":
        e = T.matmul(h_all, params["pool.q"])          # (n, 1)
        attn = T.row_softmax(T.transpose(e))           # (1, n)
        readout = T.matmul(attn, h_all)                # (1, d)
        return T.concat_cols([readout, readout])

    # Set2Set: an LSTM-driven query attends over the node set for T steps;
    # the state carried between steps is [query || readout].
    q_star = Tensor(np.zeros((1, 2 * d)))
    h_lstm = Tensor(np.zeros((1, d)))
    c_lstm = Tensor(np.zeros((1, d)))
    for _ in range(config.set2set_steps):
        h_lstm, c_lstm = _lstm_cell(q_star, h_lstm, c_lstm, params)
        q = h_lstm
        energies = T.matmul(h_all, T.transpose(q))     # (n, 1)
        attn = T.row_softmax(T.transpose(energies))    # (1, n)
        readout = T.matmul(attn, h_all)                # (1, d)
        q_star = T.concat_cols([q, readout])
    return q_star


def similarity(h1: Tensor, h2: Tensor) -> Tensor:
    """Cosine similarity of two pooled vectors, as a scalar tensor."""
    if h1.data.shape != h2.data.shape:
        raise LengthMismatch(f"similarity: {h1.data.shape} vs {h2.data.shape}")
    n1 = T.sqrt(T.sum_all(T.elementwise_mul(h1, h1)))
    n2 = T.sqrt(T.sum_all(T.elementwise_mul(h2, h2)))
    if n1.item() < 1e-12 or n2.item() < 1e-12:
        raise ZeroVector("cosine undefined for (near-)zero vectors")
    return T.divide(T.sum_all(T.elementwise_mul(h1, h2)), T.elementwise_mul(n1, n2))


def mse_loss(scores: list[Tensor], labels: list[float]) -> Tensor:
    """Mean squared error between scalar scores and +-1 targets."""
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    if not scores:
        raise LengthMismatch("need at least one score")
    total = None
    for s, y in zip(scores, labels):
        diff = T.sub(s, Tensor(float(y)))
        sq = T.elementwise_mul(diff, diff)
        total = sq if total is None else T.add(total, sq)
    return T.scale(total, 1.0 / len(scores))


def encode_fragment_views(fb: FeaturizedBundle, params: ParameterSet, config: ModelConfig,
                          mode: str, rng: Rng | None):
    """Embed + GCN + self-attention for each enabled view of one fragment."""
    out = {}
    for view in config.views:
        fg = fb.views[view]
        h0 = embed_nodes(fg, params, config)
        hg = residual_gcn(h0, Tensor(fg.adj_norm), params, config)
        out[view] = intra_attention(hg, params, config, mode, rng) if config.use_intra_attn else hg
    return out


def forward_pair(fb1: FeaturizedBundle, fb2: FeaturizedBundle, params: ParameterSet,
                 config: ModelConfig, mode: str = "eval", rng: Rng | None = None) -> Tensor:
    """Score one fragment pair; returns the cosine similarity as a scalar tensor."""
    enc1 = encode_fragment_views(fb1, params, config, mode, rng)
    enc2 = encode_fragment_views(fb2, params, config, mode, rng)
    states1, states2 = [], []
    for view in config.views:
        h1, h2 = enc1[view], enc2[view]
        if config.use_cross_attn:
            m1, m2 = cross_attention(h1, h2, params, config, view, view)
            h1 = gru_update(m1, enc1[view], params)
            h2 = gru_update(m2, enc2[view], params)
        states1.append(h1)
        states2.append(h2)
    pooled1 = fuse_and_pool(states1, params, config)
    pooled2 = fuse_and_pool(states2, params, config)
    return similarity(pooled1, pooled2)
