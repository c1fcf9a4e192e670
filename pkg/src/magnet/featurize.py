"""Vocabulary, initial node feature indices, and normalized adjacency.

Token strings are bucketed with FNV-1a (64-bit) modulo the bucket count, so
feature indices are stable across runs and machines. The adjacency is the
symmetrically normalized matrix D^{-1/2} (A + A^T + I) D^{-1/2} over the 0/1
directed adjacency A, which keeps the spectrum inside [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import GraphBundle
from .codegraph import CodeGraph

DEFAULT_TOKEN_BUCKETS = 1024

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass
class Vocab:
    kind_to_index: dict[str, int]
    token_bucket_count: int = DEFAULT_TOKEN_BUCKETS

    @property
    def unk_index(self) -> int:
        return len(self.kind_to_index)

    @property
    def n_kinds(self) -> int:
        """Embedding-table row count: all known kinds plus the UNK slot."""
        return len(self.kind_to_index) + 1

    def kind_index(self, label: str) -> int:
        return self.kind_to_index.get(label, self.unk_index)

    def token_index(self, token: str) -> int:
        return fnv1a64(token) % self.token_bucket_count

    def to_dict(self) -> dict:
        kinds = sorted(self.kind_to_index, key=self.kind_to_index.get)
        return {"kinds": kinds, "token_bucket_count": self.token_bucket_count}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocab":
        return cls(kind_to_index={k: i for i, k in enumerate(d["kinds"])},
                   token_bucket_count=int(d["token_bucket_count"]))


def build_vocab(corpus: list[GraphBundle], token_bucket_count: int = DEFAULT_TOKEN_BUCKETS) -> Vocab:
    """Index every kind-label seen in the corpus, in sorted order."""
    if not corpus:
        raise ValueError("empty corpus")
    labels = set()
    for b in corpus:
        for g in (b.ast, b.cfg, b.dfg):
            for n in g.nodes:
                labels.add(n.kind)
                for _, member_kind in n.members:
                    labels.add(member_kind)
    return Vocab(kind_to_index={k: i for i, k in enumerate(sorted(labels))},
                 token_bucket_count=token_bucket_count)


@dataclass
class FeaturizedGraph:
    kind_indices: np.ndarray                 # (n,) int
    token_indices: np.ndarray                # (n,) int, -1 where absent
    block_members: dict[int, list[int]]      # node row -> member kind indices
    adj_norm: np.ndarray                     # (n, n) float64
    n_nodes: int = field(init=False)

    def __post_init__(self):
        self.n_nodes = len(self.kind_indices)


@dataclass
class FeaturizedBundle:
    views: dict[str, FeaturizedGraph]
    source_id: str


def normalized_adjacency(g: CodeGraph) -> np.ndarray:
    """D^{-1/2} (A + A^T + I) D^{-1/2}; rows/cols follow node list order."""
    n = len(g.nodes)
    if n < 1:
        raise ValueError("graph must have at least one node")
    index = g.node_index()
    a = np.zeros((n, n), dtype=np.float64)
    for src, dst, _ in g.edges:
        a[index[src], index[dst]] = 1.0
    s = a + a.T + np.eye(n)
    deg = s.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    return s * inv_sqrt[:, None] * inv_sqrt[None, :]


def featurize(g: CodeGraph, vocab: Vocab) -> FeaturizedGraph:
    """Per-node kind/token indices plus the normalized adjacency."""
    kinds = np.array([vocab.kind_index(n.kind) for n in g.nodes], dtype=np.int64)
    tokens = np.array([vocab.token_index(n.token) if n.token is not None else -1
                       for n in g.nodes], dtype=np.int64)
    members = {row: [vocab.kind_index(mk) for _, mk in n.members]
               for row, n in enumerate(g.nodes) if n.members}
    return FeaturizedGraph(kind_indices=kinds, token_indices=tokens,
                           block_members=members, adj_norm=normalized_adjacency(g))


def featurize_bundle(b: GraphBundle, vocab: Vocab) -> FeaturizedBundle:
    return FeaturizedBundle(
        views={name: featurize(b.view(name), vocab) for name in ("AST", "CFG", "DFG")},
        source_id=b.source_id,
    )
