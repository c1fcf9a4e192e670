import os

# the determinism contract is stated for single-threaded runs; pin before numpy loads
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from magnet.bundle import GraphBundle, build_bundle  # noqa: E402
from magnet.codegraph import CodeGraph  # noqa: E402
from magnet.featurize import Vocab, build_vocab  # noqa: E402
from magnet.network import ModelConfig  # noqa: E402
from magnet.rng import Rng  # noqa: E402


def small_config(**overrides) -> ModelConfig:
    base = dict(d=12, gcn_layers=2, heads=2, head_dim=4, ffn_mult=2, set2set_steps=2,
                dropout=0.1)
    base.update(overrides)
    return ModelConfig(**base)


_SNIPPETS = [
    "int f(int a){ a = a + 1; return a; }",
    "int f(int a, int b){ int c = a + b; if(c > 0) c = c - 1; return c; }",
    "int f(int n){ int s = 0; while(n > 0){ s = s + n; n = n - 1; } return s; }",
    "int f(int x){ if(x > 2) return x; return 0; }",
    "int f(int[] a, int n){ int m = a[0]; for(int i = 1; i < n; i = i + 1) m = m + a[i]; return m; }",
    "int f(int p, int q){ int r = p % q; while(r != 0){ p = q; q = r; r = p % q; } return q; }",
]


def snippet_bundle(i: int, source_id: str | None = None) -> GraphBundle:
    src = _SNIPPETS[i % len(_SNIPPETS)]
    return build_bundle(src, source_id or f"s{i}")


def random_branch_program(rng: Rng, max_stmts: int = 12) -> str:
    """Loop-free random program (assignments and if/else) for dataflow oracles."""
    names = ["a", "b", "c", "d"]
    budget = [rng.below(max_stmts - 1) + 1]
    lines: list[str] = []

    def expr() -> str:
        picks = [rng.choice(names) if rng.below(3) else str(rng.below(9))
                 for _ in range(rng.below(2) + 1)]
        return " + ".join(picks)

    def emit(depth: int, indent: str):
        while budget[0] > 0:
            budget[0] -= 1
            if depth < 2 and rng.below(3) == 0 and budget[0] >= 2:
                lines.append(f"{indent}if ({rng.choice(names)} > {rng.below(5)}) {{")
                budget[0] -= 1
                inner = budget[0]
                emit(depth + 1, indent + "    ")
                if rng.below(2) and budget[0] > 0:
                    lines.append(f"{indent}}} else {{")
                    emit(depth + 1, indent + "    ")
                lines.append(f"{indent}}}")
                if inner == budget[0]:  # guarantee a non-empty branch
                    lines.append(f"{indent}{rng.choice(names)} = {expr()};")
            else:
                lines.append(f"{indent}{rng.choice(names)} = {expr()};")
            if rng.below(4) == 0:
                return

    emit(0, "    ")
    body = "\n".join(lines) or "    a = 1;"
    return "int f(int a, int b) {\n" + body + "\n}\n"


def random_code_graph(view: str, n: int, rng: Rng, kinds: list[str]) -> CodeGraph:
    """Random small graph with view-legal edge kinds (for model-level tests)."""
    from magnet.codegraph import GraphNode, VIEW_EDGE_KINDS

    legal = sorted(VIEW_EDGE_KINDS[view])
    nodes = []
    for i in range(n):
        token = f"v{rng.below(6)}" if rng.below(2) else None
        members = ()
        kind = rng.choice(kinds)
        if view == "CFG":
            if i == 0:
                kind = "Entry"
            elif i == n - 1:
                kind = "Exit"
            else:
                kind = "BasicBlock"
                members = tuple((j, rng.choice(kinds)) for j in range(rng.below(3) + 1))
            token = None
        nodes.append(GraphNode(id=i, kind=kind, token=token, members=members))
    edges = set()
    for _ in range(max(n - 1, rng.below(2 * n) + 1)):
        src, dst = rng.below(n), rng.below(n)
        edges.add((src, dst, rng.choice(legal)))
    return CodeGraph(view=view, nodes=nodes, edges=sorted(edges))


def random_featurized_bundle(rng: Rng, vocab: Vocab, n_lo: int = 3, n_hi: int = 8):
    """Random featurized bundle with n_lo..n_hi nodes per view."""
    from magnet.featurize import featurize, FeaturizedBundle

    kinds = sorted(vocab.kind_to_index)
    views = {}
    for view in ("AST", "CFG", "DFG"):
        n = n_lo + rng.below(n_hi - n_lo + 1)
        views[view] = featurize(random_code_graph(view, max(n, 3), rng, kinds), vocab)
    return FeaturizedBundle(views=views, source_id=f"rand{rng.below(10**6)}")


def model_vocab() -> Vocab:
    """Vocabulary covering the snippet pool (shared by model-level tests)."""
    bundles = [snippet_bundle(i) for i in range(len(_SNIPPETS))]
    return build_vocab(bundles, token_bucket_count=32)


@pytest.fixture(scope="session")
def shared_vocab() -> Vocab:
    return model_vocab()


@pytest.fixture(scope="session")
def snippet_bundles():
    return [snippet_bundle(i) for i in range(len(_SNIPPETS))]


def permute_graph(g: CodeGraph, perm: list[int]) -> CodeGraph:
    """Reorder the node list (feature/adjacency rows) without touching ids."""
    return CodeGraph(view=g.view, nodes=[g.nodes[p] for p in perm], edges=list(g.edges))


def assert_close(a, b, tol, label="value"):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    worst = float(np.max(np.abs(a - b))) if a.size else 0.0
    assert worst <= tol, f"{label}: max abs diff {worst} > {tol}"
