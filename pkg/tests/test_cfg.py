"""Golden CFGs, hand-traced statement by statement, plus well-formedness checks.

Blocks are identified by the source-order ranks of their member statements
(rank = position in the preorder statement sequence), so the expectations are
independent of internal node numbering.
"""
import pytest

from magnet.cfg import build_cfg
from magnet.errors import UnsupportedConstruct
from magnet.parser import Ast, AstNode, parse_source

from conftest import random_branch_program
from magnet.rng import Rng

STMT_KINDS = {"LocalVariableDeclaration", "ExpressionStatement", "ReturnStatement",
              "BreakStatement", "ContinueStatement", "IfStatement", "WhileStatement",
              "ForStatement", "SwitchStatement", "Assignment", "MethodInvocation",
              "UnaryOperation"}


def canonical(src):
    """CFG as ({block repr}, {(src repr, dst repr, kind)}); blocks are rank tuples."""
    ast = parse_source(src)
    cfg = build_cfg(ast)
    all_sids = [sid for n in cfg.nodes for sid, _ in n.members]
    order = {node.id: i for i, node in enumerate(ast.preorder())}
    rank = {sid: r for r, sid in enumerate(sorted(all_sids, key=lambda s: order[s]))}

    def block_repr(node):
        if node.kind == "Entry":
            return "ENTRY"
        if node.kind == "Exit":
            return "EXIT"
        return tuple(rank[sid] for sid, _ in node.members)

    by_id = {n.id: block_repr(n) for n in cfg.nodes}
    return set(by_id.values()), {(by_id[s], by_id[d], k) for s, d, k in cfg.edges}


def test_sequence():
    blocks, edges = canonical("int f(){ int a = 1; int b = 2; }")
    assert blocks == {"ENTRY", (0, 1), "EXIT"}
    assert edges == {("ENTRY", (0, 1), "Seq"), ((0, 1), "EXIT", "Exit")}


def test_if_else_diamond():
    blocks, edges = canonical(
        "int f(int c){ int x = 9; if(c > 0) x = 1; else x = 2; return x; }")
    assert blocks == {"ENTRY", (0, 1), (2,), (3,), (4,), "EXIT"}
    assert edges == {
        ("ENTRY", (0, 1), "Seq"),
        ((0, 1), (2,), "BranchTrue"),
        ((0, 1), (3,), "BranchFalse"),
        ((2,), (4,), "Seq"),
        ((3,), (4,), "Seq"),
        ((4,), "EXIT", "Exit"),
    }


def test_while_loop():
    blocks, edges = canonical("int f(int c){ while(c > 0) c = c - 1; return c; }")
    assert blocks == {"ENTRY", (0,), (1,), (2,), "EXIT"}
    assert edges == {
        ("ENTRY", (0,), "Seq"),
        ((0,), (1,), "BranchTrue"),
        ((1,), (0,), "LoopBack"),
        ((0,), (2,), "BranchFalse"),
        ((2,), "EXIT", "Exit"),
    }


def test_for_loop():
    # ranks: 0 decl, 1 for-test, 2 init, 3 update, 4 body, 5 return
    blocks, edges = canonical(
        "int f(int n){ int d = 9; for(int i = 0; i < n; i = i + 1) d = d + i; return d; }")
    assert blocks == {"ENTRY", (0, 2), (1,), (4, 3), (5,), "EXIT"}
    assert edges == {
        ("ENTRY", (0, 2), "Seq"),
        ((0, 2), (1,), "Seq"),
        ((1,), (4, 3), "BranchTrue"),
        ((4, 3), (1,), "LoopBack"),
        ((1,), (5,), "BranchFalse"),
        ((5,), "EXIT", "Exit"),
    }


def test_switch_with_fallthrough_and_default():
    # ranks: 0 decl, 1 switch, 2 r=1, 3 break, 4 r=2 (falls through), 5 default r=3, 6 return
    blocks, edges = canonical(
        "int f(int x){ int r = 0;"
        " switch(x){ case 1: r = 1; break; case 2: r = 2; default: r = 3; }"
        " return r; }")
    assert blocks == {"ENTRY", (0, 1), (2, 3), (4,), (5,), (6,), "EXIT"}
    assert edges == {
        ("ENTRY", (0, 1), "Seq"),
        ((0, 1), (2, 3), "BranchTrue"),
        ((0, 1), (4,), "BranchTrue"),
        ((0, 1), (5,), "BranchFalse"),
        ((2, 3), (6,), "Seq"),
        ((4,), (5,), "Seq"),
        ((5,), (6,), "Seq"),
        ((6,), "EXIT", "Exit"),
    }


def test_break_jumps_to_loop_exit():
    # ranks: 0 decl, 1 while, 2 if, 3 break, 4 c=c-1, 5 return
    blocks, edges = canonical(
        "int f(int n){ int c = 9; while(c > 0){ if(c == 5) break; c = c - 1; } return c; }")
    assert blocks == {"ENTRY", (0,), (1,), (2,), (3,), (4,), (5,), "EXIT"}
    assert edges == {
        ("ENTRY", (0,), "Seq"),
        ((0,), (1,), "Seq"),
        ((1,), (2,), "BranchTrue"),
        ((1,), (5,), "BranchFalse"),
        ((2,), (3,), "BranchTrue"),
        ((2,), (4,), "BranchFalse"),
        ((3,), (5,), "Seq"),
        ((4,), (1,), "LoopBack"),
        ((5,), "EXIT", "Exit"),
    }


def test_continue_jumps_to_loop_test():
    # ranks: 0 decl, 1 while, 2 c=c-1, 3 if, 4 continue, 5 c=c-2, 6 return
    blocks, edges = canonical(
        "int f(int n){ int c = 9;"
        " while(c > 0){ c = c - 1; if(c == 3) continue; c = c - 2; }"
        " return c; }")
    assert blocks == {"ENTRY", (0,), (1,), (2, 3), (4,), (5,), (6,), "EXIT"}
    assert edges == {
        ("ENTRY", (0,), "Seq"),
        ((0,), (1,), "Seq"),
        ((1,), (2, 3), "BranchTrue"),
        ((1,), (6,), "BranchFalse"),
        ((2, 3), (4,), "BranchTrue"),
        ((2, 3), (5,), "BranchFalse"),
        ((4,), (1,), "LoopBack"),
        ((5,), (1,), "LoopBack"),
        ((6,), "EXIT", "Exit"),
    }


def test_early_return():
    # ranks: 0 if, 1 return 0, 2 c=1, 3 return c
    blocks, edges = canonical("int f(int c){ if(c > 0) return 0; c = 1; return c; }")
    assert blocks == {"ENTRY", (0,), (1,), (2, 3), "EXIT"}
    assert edges == {
        ("ENTRY", (0,), "Seq"),
        ((0,), (1,), "BranchTrue"),
        ((0,), (2, 3), "BranchFalse"),
        ((1,), "EXIT", "Exit"),
        ((2, 3), "EXIT", "Exit"),
    }


def test_empty_body():
    blocks, edges = canonical("void f(){ }")
    assert blocks == {"ENTRY", "EXIT"}
    assert edges == {("ENTRY", "EXIT", "Exit")}


def test_unreachable_code_is_pruned():
    blocks, edges = canonical("int f(){ return 1; int a = 2; }")
    assert blocks == {"ENTRY", (0,), "EXIT"}
    assert edges == {("ENTRY", (0,), "Seq"), ((0,), "EXIT", "Exit")}


def test_break_outside_loop_rejected():
    with pytest.raises(UnsupportedConstruct):
        build_cfg(parse_source("int f(){ break; }"))
    with pytest.raises(UnsupportedConstruct):
        build_cfg(parse_source("int f(){ continue; }"))


def test_unknown_statement_kind_rejected():
    ast = Ast(nodes=[
        AstNode(0, "TypeName", "int", []),
        AstNode(1, "LambdaThing", None, []),
        AstNode(2, "Block", None, [1]),
        AstNode(3, "MethodDeclaration", "f", [0, 2]),
    ], root=3)
    with pytest.raises(UnsupportedConstruct):
        build_cfg(ast)


def check_wellformed(cfg, ast):
    ids = {n.id for n in cfg.nodes}
    in_deg = {i: 0 for i in ids}
    out_deg = {i: 0 for i in ids}
    succs = {}
    for s, d, k in cfg.edges:
        out_deg[s] += 1
        in_deg[d] += 1
        succs.setdefault(s, []).append((d, k))
    entry = next(n for n in cfg.nodes if n.kind == "Entry")
    exit_node = next(n for n in cfg.nodes if n.kind == "Exit")
    assert in_deg[entry.id] == 0
    assert out_deg[exit_node.id] == 0
    # reachability from Entry
    seen = set()
    stack = [entry.id]
    while stack:
        b = stack.pop()
        if b in seen:
            continue
        seen.add(b)
        stack.extend(d for d, _ in succs.get(b, []))
    assert seen == ids
    # conditional blocks (non-switch) branch exactly once each way
    for node in cfg.nodes:
        if not node.members:
            assert node.kind in ("Entry", "Exit")
            continue
        last_kind = node.members[-1][1]
        kinds = [k for _, k in succs.get(node.id, [])]
        if last_kind in ("IfStatement", "WhileStatement", "ForStatement"):
            assert kinds.count("BranchTrue") == 1, node
            assert kinds.count("BranchFalse") == 1, node
        elif last_kind == "SwitchStatement":
            assert kinds.count("BranchTrue") >= 1
            assert kinds.count("BranchFalse") == 1


def test_wellformedness_random_programs():
    rng = Rng(5)
    for _ in range(40):
        ast = parse_source(random_branch_program(rng))
        check_wellformed(build_cfg(ast), ast)


def test_wellformedness_loop_programs():
    sources = [
        "int f(int n){ while(n > 0){ if(n == 2) break; n = n - 1; } return n; }",
        "int f(int n){ int s = 0; for(int i = 0; i < n; i = i + 1){ if(i == 3) continue; s = s + i; } return s; }",
        "int f(int x){ switch(x){ case 1: x = 2; case 2: x = 3; break; } return x; }",
        "int f(int n){ while(n > 0){ n = n - 1; } return n; }",
    ]
    for src in sources:
        ast = parse_source(src)
        check_wellformed(build_cfg(ast), ast)


def test_determinism():
    src = "int f(int n){ int s = 0; for(int i = 0; i < n; i = i + 1) s = s + i; return s; }"
    c1, c2 = build_cfg(parse_source(src)), build_cfg(parse_source(src))
    assert [(n.id, n.kind, n.members) for n in c1.nodes] == \
           [(n.id, n.kind, n.members) for n in c2.nodes]
    assert c1.edges == c2.edges
