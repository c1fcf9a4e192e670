"""Control flow graph construction.

Statements are lowered to a statement-level flow graph first, then
coalesced into maximal basic blocks. Dedicated empty Entry/Exit blocks
bracket the graph. Edge kinds:

  Seq          fall-through between blocks (also break -> after-target)
  BranchTrue   conditional/loop test or switch case taken
  BranchFalse  conditional/loop test not taken; switch default arm
  LoopBack     end of a loop body (or continue) back to the loop test
  Exit         return, or falling off the end of the method

Branch edges keep their kind even when the target is the Exit block.
Statements unreachable from Entry (e.g. code after return) are pruned.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import parser as P
from .codegraph import (CodeGraph, GraphNode, EDGE_BRANCH_FALSE, EDGE_BRANCH_TRUE,
                        EDGE_EXIT, EDGE_LOOP_BACK, EDGE_SEQ, VIEW_CFG)
from .errors import UnsupportedConstruct
from .parser import Ast

_EXIT = -1

_SIMPLE_KINDS = frozenset({P.LOCAL_VARIABLE_DECLARATION, P.EXPRESSION_STATEMENT,
                           P.ASSIGNMENT, P.METHOD_INVOCATION, P.UNARY_OPERATION})


@dataclass
class BasicBlock:
    id: int
    stmts: list[int]  # Ast statement node ids, in execution order


class _Lowering:
    """Produces statement-level nodes and kinded edges for one method body."""

    def __init__(self, ast: Ast):
        self.ast = ast
        self.stmts: list[int] = []
        self.edges: set[tuple[int, int, str]] = set()
        # (break_target stmt id or _EXIT, continue_target or None)
        self.loop_stack: list[tuple[int, int | None]] = []

    def add_stmt(self, sid: int):
        self.stmts.append(sid)

    def add_edge(self, src: int, dst: int, kind: str):
        self.edges.add((src, dst, kind))

    def lower_seq(self, stmt_ids: list[int], cont: tuple[int, str]) -> int:
        """Lower a statement sequence; returns its entry point (cont target if empty)."""
        nxt = cont
        for sid in reversed(stmt_ids):
            entry = self.lower(sid, nxt)
            nxt = (entry, EDGE_SEQ)
        return nxt[0]

    def lower(self, sid: int, cont: tuple[int, str]) -> int:
        node = self.ast.node(sid)
        kind = node.kind
        if kind == P.BLOCK:
            return self.lower_seq(node.children, cont)
        if kind in _SIMPLE_KINDS:
            self.add_stmt(sid)
            self.add_edge(sid, cont[0], cont[1])
            return sid
        if kind == P.RETURN_STATEMENT:
            self.add_stmt(sid)
            self.add_edge(sid, _EXIT, EDGE_EXIT)
            return sid
        if kind == P.BREAK_STATEMENT:
            if not self.loop_stack:
                raise UnsupportedConstruct("break outside loop/switch", node.line, node.col)
            self.add_stmt(sid)
            self.add_edge(sid, self.loop_stack[-1][0], EDGE_SEQ)
            return sid
        if kind == P.CONTINUE_STATEMENT:
            target = next((c for _, c in reversed(self.loop_stack) if c is not None), None)
            if target is None:
                raise UnsupportedConstruct("continue outside loop", node.line, node.col)
            self.add_stmt(sid)
            self.add_edge(sid, target, EDGE_LOOP_BACK)
            return sid
        if kind == P.IF_STATEMENT:
            self.add_stmt(sid)
            then_entry = self.lower(node.children[1], cont)
            self.add_edge(sid, then_entry, EDGE_BRANCH_TRUE)
            if len(node.children) == 3:
                else_entry = self.lower(node.children[2], cont)
                self.add_edge(sid, else_entry, EDGE_BRANCH_FALSE)
            else:
                self.add_edge(sid, cont[0], EDGE_BRANCH_FALSE)
            return sid
        if kind == P.WHILE_STATEMENT:
            self.add_stmt(sid)
            self.loop_stack.append((cont[0], sid))
            body_entry = self.lower(node.children[1], (sid, EDGE_LOOP_BACK))
            self.loop_stack.pop()
            self.add_edge(sid, body_entry, EDGE_BRANCH_TRUE)
            self.add_edge(sid, cont[0], EDGE_BRANCH_FALSE)
            return sid
        if kind == P.FOR_STATEMENT:
            init_id, _, update_id, body_id = node.children
            self.add_stmt(sid)
            self.add_stmt(update_id)
            self.add_edge(update_id, sid, EDGE_LOOP_BACK)
            self.loop_stack.append((cont[0], sid))
            body_entry = self.lower(body_id, (update_id, EDGE_SEQ))
            self.loop_stack.pop()
            self.add_edge(sid, body_entry, EDGE_BRANCH_TRUE)
            self.add_edge(sid, cont[0], EDGE_BRANCH_FALSE)
            return self.lower(init_id, (sid, EDGE_SEQ))
        if kind == P.SWITCH_STATEMENT:
            self.add_stmt(sid)
            arms = node.children[1:]
            self.loop_stack.append((cont[0], None))
            # lower last-to-first so each arm can fall through into the next
            entries: list[tuple[int, str]] = []
            nxt = cont[0]
            for arm_id in reversed(arms):
                arm = self.ast.node(arm_id)
                body = arm.children[1:] if arm.token == "case" else arm.children
                entry = self.lower_seq(body, (nxt, EDGE_SEQ))
                entries.append((entry, arm.token))
                nxt = entry
            self.loop_stack.pop()
            entries.reverse()
            has_default = False
            for entry, word in entries:
                if word == "default":
                    self.add_edge(sid, entry, EDGE_BRANCH_FALSE)
                    has_default = True
                else:
                    self.add_edge(sid, entry, EDGE_BRANCH_TRUE)
            if not has_default:
                self.add_edge(sid, cont[0], EDGE_BRANCH_FALSE)
            return sid
        raise UnsupportedConstruct(kind, node.line, node.col)


def _preorder_index(ast: Ast) -> dict[int, int]:
    return {node.id: i for i, node in enumerate(ast.preorder())}


def lower_method(ast: Ast) -> tuple[list[int], set[tuple[int, int, str]], int]:
    """Statement-level flow graph of the method body: (stmts, edges, entry sid or -1)."""
    root = ast.node(ast.root)
    if root.kind != P.METHOD_DECLARATION:
        raise ValueError("root must be a MethodDeclaration")
    body = root.children[-1]
    low = _Lowering(ast)
    entry = low.lower(body, (_EXIT, EDGE_EXIT))
    return low.stmts, low.edges, entry


def build_blocks(ast: Ast) -> tuple[list[BasicBlock], set[tuple[int, int, str]], dict[int, int]]:
    """Coalesce reachable statements into maximal basic blocks.

    Returns (blocks incl. Entry(0)/Exit(last), block edges, stmt id -> block id).
    """
    stmts, edges, entry = lower_method(ast)

    # prune statements unreachable from the method entry
    succs: dict[int, list[tuple[int, str]]] = {s: [] for s in stmts}
    for src, dst, kind in edges:
        succs[src].append((dst, kind))
    reachable: set[int] = set()
    work = [entry] if entry != _EXIT else []
    while work:
        s = work.pop()
        if s == _EXIT or s in reachable:
            continue
        reachable.add(s)
        for dst, _ in succs[s]:
            if dst != _EXIT and dst not in reachable:
                work.append(dst)
    stmts = [s for s in stmts if s in reachable]
    edges = {(u, v, k) for (u, v, k) in edges if u in reachable and (v == _EXIT or v in reachable)}

    preds: dict[int, list[tuple[int, str]]] = {s: [] for s in stmts}
    out_deg: dict[int, int] = {s: 0 for s in stmts}
    for src, dst, kind in edges:
        out_deg[src] += 1
        if dst != _EXIT:
            preds[dst].append((src, kind))

    def is_leader(s: int) -> bool:
        if s == entry:
            return True
        ps = preds[s]
        if len(ps) != 1:
            return True
        src, kind = ps[0]
        return kind != EDGE_SEQ or out_deg[src] != 1

    seq_succ: dict[int, int] = {}
    for src, dst, kind in edges:
        if kind == EDGE_SEQ and dst != _EXIT and out_deg[src] == 1:
            seq_succ[src] = dst

    order = _preorder_index(ast)
    leaders = sorted((s for s in stmts if is_leader(s)), key=lambda s: order[s])
    blocks: list[BasicBlock] = [BasicBlock(id=0, stmts=[])]  # Entry
    stmt_block: dict[int, int] = {}
    for leader in leaders:
        bid = len(blocks)
        members = [leader]
        stmt_block[leader] = bid
        cur = leader
        while cur in seq_succ and not is_leader(seq_succ[cur]):
            cur = seq_succ[cur]
            members.append(cur)
            stmt_block[cur] = bid
        blocks.append(BasicBlock(id=bid, stmts=members))
    exit_id = len(blocks)
    blocks.append(BasicBlock(id=exit_id, stmts=[]))  # Exit

    block_edges: set[tuple[int, int, str]] = set()
    if entry == _EXIT:
        block_edges.add((0, exit_id, EDGE_EXIT))
    else:
        block_edges.add((0, stmt_block[entry], EDGE_SEQ))
    for src, dst, kind in edges:
        if dst == _EXIT:
            block_edges.add((stmt_block[src], exit_id, kind))
        elif stmt_block[src] != stmt_block[dst] or kind != EDGE_SEQ:
            block_edges.add((stmt_block[src], stmt_block[dst], kind))
    return blocks, block_edges, stmt_block


def build_cfg(ast: Ast) -> CodeGraph:
    """CFG over basic blocks with dedicated Entry and Exit nodes."""
    blocks, block_edges, _ = build_blocks(ast)
    nodes = []
    for b in blocks:
        if not b.stmts:
            label = "Entry" if b.id == 0 else "Exit"
            nodes.append(GraphNode(id=b.id, kind=label))
        else:
            members = tuple((sid, ast.node(sid).kind) for sid in b.stmts)
            nodes.append(GraphNode(id=b.id, kind="BasicBlock", stmt_ref=b.stmts[0],
                                   members=members))
    return CodeGraph(view=VIEW_CFG, nodes=nodes, edges=sorted(block_edges))
