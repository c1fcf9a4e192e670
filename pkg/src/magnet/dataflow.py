"""Def/use extraction, reaching definitions, and DFG construction.

Statements are the same units the CFG tracks (declarations, expression
statements, returns, and the test node of each if/while/for/switch, whose
condition variables count as uses). Method parameters are defs of a
synthetic entry statement whose id is the MethodDeclaration node.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import parser as P
from .codegraph import CodeGraph, GraphNode, EDGE_DATA_DEP, VIEW_DFG
from .parser import Ast


@dataclass
class DefUseInfo:
    defs: dict[int, frozenset[str]] = field(default_factory=dict)
    uses: dict[int, frozenset[str]] = field(default_factory=dict)
    entry_stmt: int = -1
    entry_defs: frozenset[str] = frozenset()

    def statements(self) -> list[int]:
        return sorted(self.defs)


def _idents(ast: Ast, node_id: int) -> set[str]:
    return set(ast.subtree_tokens(node_id, P.IDENTIFIER))


def _base_leaf(ast: Ast, node_id: int) -> int | None:
    """Leftmost Identifier leaf of an lvalue chain (a[i].f -> the `a` node)."""
    node = ast.node(node_id)
    if node.kind == P.IDENTIFIER:
        return node.id
    if node.kind in (P.ARRAY_ACCESS, P.FIELD_ACCESS):
        return _base_leaf(ast, node.children[0])
    return None


def _stmt_expr_def_use(ast: Ast, node_id: int) -> tuple[set[str], set[str]]:
    node = ast.node(node_id)
    if node.kind == P.ASSIGNMENT:
        target, value = node.children
        defs: set[str] = set()
        uses = _idents(ast, value)
        tnode = ast.node(target)
        if tnode.kind == P.IDENTIFIER:
            defs.add(tnode.token)
            if node.token != "=":
                uses.add(tnode.token)
        else:
            base = _base_leaf(ast, target)
            if base is not None:
                name = ast.node(base).token
                defs.add(name)
                # index/receiver identifiers are reads; the base leaf is the write
                uses |= {n.token for n in ast.preorder(target)
                         if n.kind == P.IDENTIFIER and n.id != base}
                if node.token != "=":
                    uses.add(name)
        return defs, uses
    if node.kind == P.UNARY_OPERATION and node.token in ("++", "--"):
        operand = node.children[0]
        base = _base_leaf(ast, operand)
        defs = {ast.node(base).token} if base is not None else set()
        return defs, _idents(ast, operand)
    if node.kind == P.METHOD_INVOCATION:
        return set(), _idents(ast, node_id)
    return set(), _idents(ast, node_id)


def _decl_def_use(ast: Ast, node_id: int) -> tuple[set[str], set[str]]:
    defs: set[str] = set()
    uses: set[str] = set()
    for child in ast.children(node_id):
        if child.kind != P.VARIABLE_DECLARATOR:
            continue
        if child.children:  # only initialized declarators define a value
            defs.add(child.token)
            uses |= _idents(ast, child.children[0])
    return defs, uses


def def_use(ast: Ast) -> DefUseInfo:
    """Per-statement def/use sets, plus parameter defs on the entry statement."""
    info = DefUseInfo(entry_stmt=ast.root)
    root = ast.node(ast.root)
    info.entry_defs = frozenset(c.token for c in ast.children(ast.root)
                                if c.kind == P.PARAMETER)

    def record(sid: int, defs: set[str], uses: set[str]):
        info.defs[sid] = frozenset(defs)
        info.uses[sid] = frozenset(uses)

    for node in ast.preorder():
        k = node.kind
        if k == P.LOCAL_VARIABLE_DECLARATION:
            record(node.id, *_decl_def_use(ast, node.id))
        elif k == P.EXPRESSION_STATEMENT:
            record(node.id, *_stmt_expr_def_use(ast, node.children[0]))
        elif k == P.RETURN_STATEMENT:
            record(node.id, set(), _idents(ast, node.children[0]) if node.children else set())
        elif k in (P.BREAK_STATEMENT, P.CONTINUE_STATEMENT):
            record(node.id, set(), set())
        elif k in (P.IF_STATEMENT, P.WHILE_STATEMENT, P.SWITCH_STATEMENT):
            record(node.id, set(), _idents(ast, node.children[0]))
        elif k == P.FOR_STATEMENT:
            record(node.id, set(), _idents(ast, node.children[1]))
            init, _, update, _ = node.children
            init_node = ast.node(init)
            if init_node.kind == P.LOCAL_VARIABLE_DECLARATION:
                record(init, *_decl_def_use(ast, init))
            else:
                record(init, *_stmt_expr_def_use(ast, init))
            record(update, *_stmt_expr_def_use(ast, update))
    return info


def reaching_definitions(cfg: CodeGraph, info: DefUseInfo) -> dict[int, set[tuple[int, str]]]:
    """IN set per statement: (def-site statement id, variable) pairs that reach it.

    Standard forward fixed point over blocks (IN = union of predecessor OUTs,
    OUT = gen + (IN - kill)), then a within-block walk for per-statement INs.
    """
    blocks = {n.id: [sid for sid, _ in n.members] for n in cfg.nodes}
    preds: dict[int, list[int]] = {n.id: [] for n in cfg.nodes}
    succs: dict[int, list[int]] = {n.id: [] for n in cfg.nodes}
    for src, dst, _ in cfg.edges:
        preds[dst].append(src)
        succs[src].append(dst)

    entry_block = next(n.id for n in cfg.nodes if n.kind == "Entry")
    entry_out = {(info.entry_stmt, v) for v in info.entry_defs}

    def transfer(facts: set[tuple[int, str]], sid: int) -> set[tuple[int, str]]:
        gen = {(sid, v) for v in info.defs.get(sid, ())}
        kill_vars = info.defs.get(sid, frozenset())
        return gen | {f for f in facts if f[1] not in kill_vars}

    out: dict[int, set[tuple[int, str]]] = {b: set() for b in blocks}
    out[entry_block] = set(entry_out)
    changed = True
    while changed:
        changed = False
        for b in sorted(blocks):
            facts = set(entry_out) if b == entry_block else set()
            for p in preds[b]:
                facts |= out[p]
            for sid in blocks[b]:
                facts = transfer(facts, sid)
            if facts != out[b]:
                out[b] = facts
                changed = True

    result: dict[int, set[tuple[int, str]]] = {}
    for b in sorted(blocks):
        facts = set(entry_out) if b == entry_block else set()
        for p in preds[b]:
            facts |= out[p]
        for sid in blocks[b]:
            result[sid] = set(facts)
            facts = transfer(facts, sid)
    return result


def build_dfg(ast: Ast, cfg: CodeGraph, info: DefUseInfo) -> CodeGraph:
    """Data-dependence graph: def-site -> use-site edges justified by reaching defs."""
    reach = reaching_definitions(cfg, info)
    order = {node.id: i for i, node in enumerate(ast.preorder())}
    stmt_ids = sorted(reach, key=lambda s: order[s])

    nodes = [GraphNode(id=info.entry_stmt, kind=ast.node(info.entry_stmt).kind,
                       stmt_ref=info.entry_stmt)]
    nodes += [GraphNode(id=sid, kind=ast.node(sid).kind, stmt_ref=sid)
              for sid in stmt_ids if sid != info.entry_stmt]

    edges: set[tuple[int, int, str]] = set()
    for sid in stmt_ids:
        for var in info.uses.get(sid, ()):
            for def_site, def_var in reach[sid]:
                if def_var == var:
                    edges.add((def_site, sid, EDGE_DATA_DEP))
    return CodeGraph(view=VIEW_DFG, nodes=nodes, edges=sorted(edges))
