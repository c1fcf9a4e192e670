"""Bundle the three graph views of one code fragment."""
from __future__ import annotations

from dataclasses import dataclass

from .codegraph import CodeGraph, ast_to_graph, VIEW_AST, VIEW_CFG, VIEW_DFG
from .cfg import build_cfg
from .dataflow import build_dfg, def_use
from .parser import Ast, parse_source


@dataclass
class GraphBundle:
    ast: CodeGraph
    cfg: CodeGraph
    dfg: CodeGraph
    source_id: str

    def view(self, name: str) -> CodeGraph:
        return {VIEW_AST: self.ast, VIEW_CFG: self.cfg, VIEW_DFG: self.dfg}[name]


def bundle_from_ast(ast: Ast, source_id: str) -> GraphBundle:
    cfg = build_cfg(ast)
    info = def_use(ast)
    dfg = build_dfg(ast, cfg, info)
    return GraphBundle(ast=ast_to_graph(ast), cfg=cfg, dfg=dfg, source_id=source_id)


def build_bundle(source: str, source_id: str) -> GraphBundle:
    """Parse a fragment and derive all three views; errors propagate."""
    return bundle_from_ast(parse_source(source), source_id)
