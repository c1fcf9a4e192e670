"""Graph export: DOT for visualization, JSON for tooling.

JSON schema (stable key order, nodes sorted by id):
  {"view": ..., "nodes": [{"id", "kind", "token", "stmt_ref"}, ...],
   "edges": [{"src", "dst", "kind"}, ...]}
"""
from __future__ import annotations

import json

from .codegraph import CodeGraph


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _node_label(node) -> str:
    label = node.kind
    if node.token is not None:
        label += f":{node.token}"
    if node.members:
        label += "|" + ";".join(kind for _, kind in node.members)
    return label


def to_dot(g: CodeGraph, name: str = "code") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{']
    lines.append(f'  label="{g.view}";')
    for node in sorted(g.nodes, key=lambda n: n.id):
        lines.append(f'  n{node.id} [label="{_dot_escape(_node_label(node))}"];')
    for src, dst, kind in sorted(g.edges):
        lines.append(f'  n{src} -> n{dst} [label="{kind}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: CodeGraph) -> str:
    doc = {
        "view": g.view,
        "nodes": [{"id": n.id, "kind": n.kind, "token": n.token, "stmt_ref": n.stmt_ref}
                  for n in sorted(g.nodes, key=lambda n: n.id)],
        "edges": [{"src": s, "dst": d, "kind": k} for s, d, k in sorted(g.edges)],
    }
    return json.dumps(doc, indent=2) + "\n"
