"""Generic directed graph over code, one instance per view (AST / CFG / DFG)."""
from __future__ import annotations

from dataclasses import dataclass, field

from .parser import Ast

VIEW_AST = "AST"
VIEW_CFG = "CFG"
VIEW_DFG = "DFG"
VIEWS = (VIEW_AST, VIEW_CFG, VIEW_DFG)

EDGE_CHILD = "Child"
EDGE_SEQ = "Seq"
EDGE_BRANCH_TRUE = "BranchTrue"
EDGE_BRANCH_FALSE = "BranchFalse"
EDGE_LOOP_BACK = "LoopBack"
EDGE_EXIT = "Exit"
EDGE_DATA_DEP = "DataDep"

# edge kinds legal per view
VIEW_EDGE_KINDS = {
    VIEW_AST: frozenset({EDGE_CHILD}),
    VIEW_CFG: frozenset({EDGE_SEQ, EDGE_BRANCH_TRUE, EDGE_BRANCH_FALSE, EDGE_LOOP_BACK, EDGE_EXIT}),
    VIEW_DFG: frozenset({EDGE_DATA_DEP}),
}


@dataclass
class GraphNode:
    id: int
    kind: str
    token: str | None = None
    stmt_ref: int | None = None
    # for CFG basic blocks: (ast statement id, statement kind) per member, in order
    members: tuple[tuple[int, str], ...] = ()


@dataclass
class CodeGraph:
    view: str
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[tuple[int, int, str]] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self):
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise ValueError(f"{self.view} graph: duplicate node ids")
        legal = VIEW_EDGE_KINDS[self.view]
        seen = set()
        for src, dst, kind in self.edges:
            if src not in ids or dst not in ids:
                raise ValueError(f"{self.view} graph: edge ({src},{dst}) references missing node")
            if kind not in legal:
                raise ValueError(f"{self.view} graph: illegal edge kind {kind}")
            if (src, dst, kind) in seen:
                raise ValueError(f"{self.view} graph: duplicate edge ({src},{dst},{kind})")
            seen.add((src, dst, kind))

    def node_index(self) -> dict[int, int]:
        """Node id -> row position; row order is the node list order."""
        return {n.id: i for i, n in enumerate(self.nodes)}

    def __len__(self):
        return len(self.nodes)


def ast_to_graph(ast: Ast) -> CodeGraph:
    """Project an Ast onto the AST view: one node per tree node, Child edges."""
    nodes = []
    edges = []
    for n in ast.nodes:
        nodes.append(GraphNode(id=n.id, kind=n.kind, token=n.token, stmt_ref=n.id))
        for c in n.children:
            edges.append((n.id, c, EDGE_CHILD))
    nodes.sort(key=lambda n: n.id)
    edges.sort()
    return CodeGraph(view=VIEW_AST, nodes=nodes, edges=edges)
