"""Synthetic clone corpus generator.

Each template is a family of single-method programs computing one function.
Variants are derived by construction: formatting/comment changes, systematic
renaming (plus free literal/type slots), light and heavy statement edits, and
an alternative algorithm. A pair of variants from the same template is a clone;
its type label is the coarser of the two variants' edit levels (an upper bound
by construction). Cross-template pairs are nonclones.

Placeholders: ``$x`` names are substituted per variant ($f is the method name,
$K a free integer literal, $T a free numeric type; everything else a variable).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .bundle import build_bundle
from .rng import Rng

_PLACEHOLDER = re.compile(r"\$([A-Za-z]\w*)")

_VAR_POOL = ["a", "b", "c", "d", "e", "g", "h", "k", "m", "p", "q", "r", "s", "t",
             "u", "v", "w", "x", "y", "z", "acc", "arg", "buf", "cnt", "cur", "idx",
             "len", "num", "pos", "res", "tmp", "val"]
_METHOD_POOL = ["run", "calc", "apply", "process", "compute", "evaluate", "solve",
                "work", "handle", "measure", "reduce", "scan"]
_LITERAL_POOL = ["1", "2", "3", "5", "7"]
_TYPE_POOL = ["int", "long"]

LEVEL_NAMES = ("T1", "T2", "ST3", "MT3", "WT3T4")


@dataclass
class Template:
    name: str
    base: str      # canonical implementation
    st3: str       # light statement edits, same algorithm
    mt3: str       # heavier restructuring, same algorithm
    alt: str       # different algorithm, same function


TEMPLATES: list[Template] = [
    Template(
        name="array_sum",
        base="""\
$T $f(int[] $a, int $n) {
    $T $s = 0;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        $s = $s + $a[$i];
    }
    return $s;
}
""",
        st3="""\
$T $f(int[] $a, int $n) {
    $T $s = 0;
    int $u = $K;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        $s = $s + $a[$i];
        $u = $u + 1;
    }
    return $s;
}
""",
        mt3="""\
$T $f(int[] $a, int $n) {
    $T $s = 0;
    int $i = $n;
    while ($i > 0) {
        $i = $i - 1;
        $s = $s + $a[$i];
    }
    return $s;
}
""",
        alt="""\
$T $f(int[] $a, int $n) {
    $T $s = 0;
    int $i = 0;
    while ($i < $n) {
        $T $v = $a[$i];
        if ($v != 0) {
            $s = $s + $v;
        }
        $i = $i + 1;
    }
    return $s;
}
""",
    ),
    Template(
        name="max_search",
        base="""\
int $f(int[] $a, int $n) {
    int $m = $a[0];
    for (int $i = 1; $i < $n; $i = $i + 1) {
        if ($a[$i] > $m) {
            $m = $a[$i];
        }
    }
    return $m;
}
""",
        st3="""\
int $f(int[] $a, int $n) {
    int $m = $a[0];
    int $c = 0;
    for (int $i = 1; $i < $n; $i = $i + 1) {
        if ($a[$i] > $m) {
            $m = $a[$i];
            $c = $c + 1;
        }
    }
    return $m;
}
""",
        mt3="""\
int $f(int[] $a, int $n) {
    int $b = 0;
    for (int $i = 1; $i < $n; $i = $i + 1) {
        if ($a[$i] > $a[$b]) {
            $b = $i;
        }
    }
    return $a[$b];
}
""",
        alt="""\
int $f(int[] $a, int $n) {
    int $i = $n - 1;
    int $m = $a[$n - 1];
    while ($i >= 0) {
        if ($m < $a[$i]) {
            $m = $a[$i];
        }
        $i = $i - 1;
    }
    return $m;
}
""",
    ),
    Template(
        name="string_reverse",
        base="""\
String $f(String $s) {
    String $r = "";
    for (int $i = $s.length() - 1; $i >= 0; $i = $i - 1) {
        $r = $r + $s.charAt($i);
    }
    return $r;
}
""",
        st3="""\
String $f(String $s) {
    String $r = "";
    int $n = $s.length();
    for (int $i = $n - 1; $i >= 0; $i = $i - 1) {
        $r = $r + $s.charAt($i);
    }
    return $r;
}
""",
        mt3="""\
String $f(String $s) {
    String $r = "";
    int $i = $s.length();
    while ($i > 0) {
        $i = $i - 1;
        String $c = $s.substring($i, $i + 1);
        $r = $r + $c;
    }
    return $r;
}
""",
        alt="""\
String $f(String $s) {
    String $r = "";
    int $i = 0;
    while ($i < $s.length()) {
        $r = $s.charAt($i) + $r;
        $i = $i + 1;
    }
    return $r;
}
""",
    ),
    Template(
        name="gcd",
        base="""\
int $f(int $x, int $y) {
    while ($y != 0) {
        int $t = $y;
        $y = $x % $y;
        $x = $t;
    }
    return $x;
}
""",
        st3="""\
int $f(int $x, int $y) {
    int $s = 0;
    while ($y != 0) {
        int $t = $y;
        $y = $x % $y;
        $x = $t;
        $s = $s + 1;
    }
    return $x;
}
""",
        mt3="""\
int $f(int $x, int $y) {
    int $r = $x % $y;
    while ($r != 0) {
        $x = $y;
        $y = $r;
        $r = $x % $y;
    }
    return $y;
}
""",
        alt="""\
int $f(int $x, int $y) {
    while ($x != $y) {
        if ($x > $y) {
            $x = $x - $y;
        } else {
            $y = $y - $x;
        }
    }
    return $x;
}
""",
    ),
    Template(
        name="bubble_sort",
        base="""\
int[] $f(int[] $a, int $n) {
    for (int $i = 0; $i < $n - 1; $i = $i + 1) {
        for (int $j = 0; $j < $n - 1 - $i; $j = $j + 1) {
            if ($a[$j] > $a[$j + 1]) {
                int $t = $a[$j];
                $a[$j] = $a[$j + 1];
                $a[$j + 1] = $t;
            }
        }
    }
    return $a;
}
""",
        st3="""\
int[] $f(int[] $a, int $n) {
    int $c = 0;
    for (int $i = 0; $i < $n - 1; $i = $i + 1) {
        for (int $j = 0; $j < $n - 1 - $i; $j = $j + 1) {
            if ($a[$j] > $a[$j + 1]) {
                int $t = $a[$j];
                $a[$j] = $a[$j + 1];
                $a[$j + 1] = $t;
                $c = $c + 1;
            }
        }
    }
    return $a;
}
""",
        mt3="""\
int[] $f(int[] $a, int $n) {
    boolean $g = true;
    while ($g) {
        $g = false;
        for (int $j = 0; $j < $n - 1; $j = $j + 1) {
            if ($a[$j] > $a[$j + 1]) {
                int $t = $a[$j];
                $a[$j] = $a[$j + 1];
                $a[$j + 1] = $t;
                $g = true;
            }
        }
    }
    return $a;
}
""",
        alt="""\
int[] $f(int[] $a, int $n) {
    for (int $i = 0; $i < $n - 1; $i = $i + 1) {
        int $b = $i;
        for (int $j = $i + 1; $j < $n; $j = $j + 1) {
            if ($a[$j] < $a[$b]) {
                $b = $j;
            }
        }
        int $t = $a[$i];
        $a[$i] = $a[$b];
        $a[$b] = $t;
    }
    return $a;
}
""",
    ),
    Template(
        name="factorial",
        base="""\
$T $f(int $n) {
    $T $p = 1;
    for (int $i = 2; $i <= $n; $i = $i + 1) {
        $p = $p * $i;
    }
    return $p;
}
""",
        st3="""\
$T $f(int $n) {
    $T $p = 1;
    int $c = $K;
    for (int $i = 2; $i <= $n; $i = $i + 1) {
        $p = $p * $i;
        $c = $c + 1;
    }
    return $p;
}
""",
        mt3="""\
$T $f(int $n) {
    $T $p = 1;
    int $i = 1;
    while ($i <= $n) {
        $p = $p * $i;
        $i = $i + 1;
    }
    return $p;
}
""",
        alt="""\
$T $f(int $n) {
    $T $p = 1;
    while ($n > 1) {
        $p = $p * $n;
        $n = $n - 1;
    }
    return $p;
}
""",
    ),
    Template(
        name="linear_search",
        base="""\
int $f(int[] $a, int $n, int $x) {
    for (int $i = 0; $i < $n; $i = $i + 1) {
        if ($a[$i] == $x) {
            return $i;
        }
    }
    return -$K;
}
""",
        st3="""\
int $f(int[] $a, int $n, int $x) {
    int $s = 0;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        $s = $s + 1;
        if ($a[$i] == $x) {
            return $i;
        }
    }
    return -$K;
}
""",
        mt3="""\
int $f(int[] $a, int $n, int $x) {
    int $r = -$K;
    for (int $i = $n - 1; $i >= 0; $i = $i - 1) {
        if ($a[$i] == $x) {
            $r = $i;
        }
    }
    return $r;
}
""",
        alt="""\
int $f(int[] $a, int $n, int $x) {
    int $r = -$K;
    int $i = 0;
    while ($i < $n) {
        if ($a[$i] == $x) {
            $r = $i;
            break;
        }
        $i = $i + 1;
    }
    return $r;
}
""",
    ),
    Template(
        name="count_matches",
        base="""\
int $f(int[] $a, int $n, int $x) {
    int $c = 0;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        if ($a[$i] == $x) {
            $c = $c + 1;
        }
    }
    return $c;
}
""",
        st3="""\
int $f(int[] $a, int $n, int $x) {
    int $c = 0;
    int $u = $K;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        if ($a[$i] == $x) {
            $c = $c + 1;
        }
        $u = $u + 1;
    }
    return $c;
}
""",
        mt3="""\
int $f(int[] $a, int $n, int $x) {
    int $c = 0;
    for (int $i = 0; $i < $n; $i = $i + 1) {
        if ($a[$i] != $x) {
            $c = $c + 0;
        } else {
            $c = $c + 1;
        }
    }
    return $c;
}
""",
        alt="""\
int $f(int[] $a, int $n, int $x) {
    int $c = 0;
    int $i = 0;
    while ($i < $n) {
        $i = $i + 1;
        if ($a[$i - 1] != $x) {
            continue;
        }
        $c = $c + 1;
    }
    return $c;
}
""",
    ),
    Template(
        name="bucket_select",
        base="""\
int $f(int $x) {
    int $r = 0;
    switch ($x) {
        case 0:
            $r = $K;
            break;
        case 1:
            $r = $K + 10;
            break;
        default:
            $r = -1;
    }
    return $r;
}
""",
        st3="""\
int $f(int $x) {
    int $r = 0;
    int $u = 0;
    switch ($x) {
        case 0:
            $r = $K;
            $u = 1;
            break;
        case 1:
            $r = $K + 10;
            break;
        default:
            $r = -1;
    }
    return $r;
}
""",
        mt3="""\
int $f(int $x) {
    int $r = -1;
    switch ($x) {
        case 1:
            $r = $K + 10;
            break;
        case 0:
            $r = $K;
            break;
        default:
            $r = $r - 0;
    }
    return $r;
}
""",
        alt="""\
int $f(int $x) {
    int $r = -1;
    if ($x == 0) {
        $r = $K;
    } else {
        if ($x == 1) {
            $r = $K + 10;
        }
    }
    return $r;
}
""",
    ),
]


def _instantiate(text: str, mapping: dict[str, str]) -> str:
    return _PLACEHOLDER.sub(lambda m: mapping[m.group(1)], text)


def _fresh_mapping(text: str, rng: Rng) -> dict[str, str]:
    names = sorted(set(_PLACEHOLDER.findall(text)))
    pool = list(_VAR_POOL)
    rng.shuffle(pool)
    mapping = {}
    var_slot = 0
    for name in names:
        if name == "f":
            mapping[name] = _METHOD_POOL[rng.below(len(_METHOD_POOL))]
        elif name == "K":
            mapping[name] = _LITERAL_POOL[rng.below(len(_LITERAL_POOL))]
        elif name == "T":
            mapping[name] = _TYPE_POOL[rng.below(len(_TYPE_POOL))]
        else:
            mapping[name] = pool[var_slot]
            var_slot += 1
    return mapping


def _base_mapping(text: str) -> dict[str, str]:
    names = sorted(set(_PLACEHOLDER.findall(text)))
    return {name: ("1" if name == "K" else "int" if name == "T" else
                   "f" if name == "f" else name) for name in names}


def _reformat(text: str, rng: Rng) -> str:
    """Type-1 edit: comments, blank lines, tab indentation; tokens unchanged."""
    out = ["// reviewed copy"]
    for line in text.split("\n"):
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip(" "))
        body = "\t" * (indent // 4) + line.strip()
        out.append(body)
        if line.strip().endswith(";") and rng.below(3) == 0:
            out.append("\t" * (indent // 4) + "// step")
        if rng.below(5) == 0:
            out.append("")
    return "\n".join(out) + "\n"


# variant kind -> (template text attribute, edit level index into LEVEL_NAMES)
_KIND_CYCLE = [("base", 0), ("t1", 0), ("t2", 1), ("st3", 2), ("mt3", 3), ("alt", 4)]


def make_variant(template: Template, kind: str, rng: Rng) -> str:
    if kind == "base":
        return _instantiate(template.base, _base_mapping(template.base))
    if kind == "t1":
        return _reformat(_instantiate(template.base, _base_mapping(template.base)), rng)
    source_text = {"t2": template.base, "st3": template.st3,
                   "mt3": template.mt3, "alt": template.alt}[kind]
    return _instantiate(source_text, _fresh_mapping(source_text, rng))


def generate(out_dir: str | Path, seed: int = 0, n_templates: int = 8,
             n_variants: int = 16, n_pairs: int = 2000) -> dict:
    """Write sources/, manifest.tsv, and pairs.tsv; returns a summary dict."""
    if not (1 <= n_templates <= len(TEMPLATES)):
        raise ValueError(f"n_templates must be in [1, {len(TEMPLATES)}]")
    if n_variants < 2:
        raise ValueError("need at least 2 variants per template")
    rng = Rng(seed)
    out_dir = Path(out_dir)
    (out_dir / "sources").mkdir(parents=True, exist_ok=True)

    fragments: dict[str, tuple[str, int, str]] = {}  # id -> (template, level, source)
    for template in TEMPLATES[:n_templates]:
        for v in range(n_variants):
            kind, level = _KIND_CYCLE[v % len(_KIND_CYCLE)]
            if v >= len(_KIND_CYCLE) and kind == "base":
                kind, level = "t2", 1  # only one canonical base per template
            source = make_variant(template, kind, rng)
            build_bundle(source, "selfcheck")  # generator must emit parseable code
            frag_id = f"{template.name}_{v:02d}"
            fragments[frag_id] = (template.name, level, source)
            (out_dir / "sources" / f"{frag_id}.java").write_text(source, encoding="utf-8")

    manifest_lines = [f"{fid}\tsources/{fid}.java" for fid in sorted(fragments)]
    (out_dir / "manifest.tsv").write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")

    ids = sorted(fragments)
    clone_candidates = [(i, j) for a, i in enumerate(ids) for j in ids[a + 1:]
                        if fragments[i][0] == fragments[j][0]]
    non_candidates = [(i, j) for a, i in enumerate(ids) for j in ids[a + 1:]
                      if fragments[i][0] != fragments[j][0]]
    rng.shuffle(clone_candidates)
    rng.shuffle(non_candidates)
    per_class = min(n_pairs // 2, len(clone_candidates), len(non_candidates))

    pair_lines = []
    for i, j in sorted(clone_candidates[:per_class]):
        level = max(fragments[i][1], fragments[j][1])
        pair_lines.append(f"{i}\t{j}\t1\t{LEVEL_NAMES[level]}")
    for i, j in sorted(non_candidates[:per_class]):
        pair_lines.append(f"{i}\t{j}\t0")
    (out_dir / "pairs.tsv").write_text("\n".join(pair_lines) + "\n", encoding="utf-8")

    return {
        "out_dir": str(out_dir),
        "seed": seed,
        "templates": n_templates,
        "variants_per_template": n_variants,
        "fragments": len(fragments),
        "clone_pairs": per_class,
        "nonclone_pairs": per_class,
        "manifest": str(out_dir / "manifest.tsv"),
        "pairs": str(out_dir / "pairs.tsv"),
    }
