import json

from magnet.bundle import build_bundle
from magnet.export import to_dot, to_json


def test_dot_straight_line_cfg():
    bundle = build_bundle("int f(){ int a = 1; int b = a; }", "x")
    dot = to_dot(bundle.cfg, "x")
    assert dot.startswith('digraph "x" {')
    assert '[label="Entry"]' in dot
    assert '[label="Exit"]' in dot
    assert "BasicBlock|LocalVariableDeclaration;LocalVariableDeclaration" in dot
    assert '[label="Seq"]' in dot
    assert '[label="Exit"];' in dot
    assert dot.rstrip().endswith("}")


def test_dot_node_labels_carry_tokens():
    bundle = build_bundle("int f(int x){ return x; }", "x")
    dot = to_dot(bundle.ast)
    assert '[label="Identifier:x"]' in dot
    assert '[label="Child"]' in dot


def test_json_schema_and_order():
    bundle = build_bundle("int f(){ int a = 1; int b = a; }", "x")
    doc = json.loads(to_json(bundle.dfg))
    assert list(doc) == ["view", "nodes", "edges"]
    assert doc["view"] == "DFG"
    assert all(list(n) == ["id", "kind", "token", "stmt_ref"] for n in doc["nodes"])
    assert all(list(e) == ["src", "dst", "kind"] for e in doc["edges"])
    ids = [n["id"] for n in doc["nodes"]]
    assert ids == sorted(ids)
    assert all(e["kind"] == "DataDep" for e in doc["edges"])


def test_json_stable_across_runs():
    src = "int f(int n){ while(n > 0) n = n - 1; return n; }"
    a = to_json(build_bundle(src, "x").cfg)
    b = to_json(build_bundle(src, "x").cfg)
    assert a == b


def test_dot_escapes_quotes():
    bundle = build_bundle('String f(){ return "a\\"b"; }', "x")
    dot = to_dot(bundle.ast)
    assert "digraph" in dot  # renders without raising, quotes escaped
    assert '\\"' in dot
