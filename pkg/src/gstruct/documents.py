"""JSON documents for algebras and models, and report rendering.

Rationals are always ``{"num": p, "den": q}`` with ``q > 0``; plain JSON
integers are accepted as a shorthand.  Floats and strings are rejected.

Algebra document::

    {"name": "...", "degrees": {"-2": 1, "-1": 2},
     "brackets": [{"left": [-1, 0], "right": [-1, 1],
                   "out": [{"index": 0, "num": 1, "den": 1}]}],
     "g0": {"mode": "full-derivations"},
     "truncation": 3}

``g0`` is only allowed when all degrees are negative.  Explicit generators
are lists of ``{degree: matrix}`` where column ``j`` of a matrix is the
image of the ``j``-th basis vector of that degree.

Model document::

    {"name": "...", "base": "algebra.json" | {...inline algebra...},
     "truncation": 2, "start": "bracket" | "zero",
     "gamma": [{"left": [a, i], "right": [b, j],
                "out": [{"degree": c, "index": k, "num": 1, "den": 1}]}]}

Gamma entries are added to the starting table (the base bracket by
default); listing both orders of a pair is allowed when they agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import SchemaError
from .glacore import (GradedLieAlgebra, GradedVectorSpace, Metric, MatrixLieAlgebra,
                      derivations_degree0, matrix_algebra)
from .linalg import Vector

G0_MODES = ("full-derivations", "metric-orthogonal", "explicit")
MODEL_STARTS = ("bracket", "zero")


class DocumentError(SchemaError):
    """Schema error carrying a list of field-precise diagnostics."""

    def __init__(self, diagnostics: List[str]) -> None:
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


class _Diag:
    def __init__(self) -> None:
        self.items: List[str] = []

    def add(self, path: str, msg: str) -> None:
        self.items.append(f"{path}: {msg}")

    def raise_if_any(self) -> None:
        if self.items:
            raise DocumentError(self.items)


def load_json(text: Any, source: str = "<input>") -> Any:
    """Parse bytes or text; syntax errors become line/column diagnostics."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError([f"{source}: not UTF-8 ({exc.reason} at byte {exc.start})"]) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from None


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_rational(x: Any, path: str, diag: _Diag) -> Optional[Fraction]:
    if _is_int(x):
        return Fraction(x)
    if isinstance(x, dict):
        extra = set(x) - {"num", "den"}
        if extra:
            diag.add(path, f"unexpected keys {sorted(extra)}")
        num, den = x.get("num"), x.get("den", 1)
        if not _is_int(num):
            diag.add(path + ".num", "must be an integer")
            return None
        if not _is_int(den):
            diag.add(path + ".den", "must be an integer")
            return None
        if den <= 0:
            diag.add(path + ".den", f"denominator must be positive, got {den}")
            return None
        return Fraction(num, den)
    diag.add(path, "rational must be an integer or {num, den}")
    return None


def rational_json(x: Fraction) -> Dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _rational_fields(entry: dict, path: str, diag: _Diag) -> Optional[Fraction]:
    return parse_rational({"num": entry.get("num"), "den": entry.get("den", 1)}, path, diag)


# ---------------------------------------------------------------------------
# algebra documents

@dataclass
class AlgebraSpec:
    """Parsed algebra document."""
    name: str
    algebra: GradedLieAlgebra
    g0: Optional[MatrixLieAlgebra]
    g0_mode: Optional[str]
    metric: Optional[Metric]
    truncation: Optional[int]

    @property
    def negative_only(self) -> bool:
        return all(p < 0 for p in self.algebra.space.degrees)


def _parse_degrees(doc: dict, diag: _Diag) -> Dict[int, int]:
    raw = doc.get("degrees")
    if not isinstance(raw, dict) or not raw:
        diag.add("degrees", "must be a nonempty object mapping degree to dimension")
        return {}
    out = {}
    for k, v in raw.items():
        try:
            p = int(k)
        except ValueError:
            diag.add(f"degrees[{k!r}]", "degree key must be an integer")
            continue
        if not _is_int(v) or v < 0:
            diag.add(f"degrees[{k!r}]", "dimension must be a nonnegative integer")
            continue
        out[p] = v
    return out


def _basis_ref(x: Any, path: str, dims: Dict[int, int], diag: _Diag) -> Optional[Tuple[int, int]]:
    if not (isinstance(x, list) and len(x) == 2 and all(_is_int(t) for t in x)):
        diag.add(path, "must be [degree, index]")
        return None
    p, i = x
    if p not in dims or not 0 <= i < dims[p]:
        diag.add(path, f"no basis element {x}")
        return None
    return p, i


def _parse_matrix(m: Any, size: int, path: str, diag: _Diag) -> Optional[List[List[Fraction]]]:
    if not isinstance(m, list) or len(m) != size or any(
            not isinstance(r, list) or len(r) != size for r in m):
        diag.add(path, f"must be a {size}x{size} matrix")
        return None
    out = []
    for r, row in enumerate(m):
        vals = [parse_rational(x, f"{path}[{r}][{c}]", diag) for c, x in enumerate(row)]
        out.append([x if x is not None else Fraction(0) for x in vals])
    return out


def parse_algebra(doc: Any) -> AlgebraSpec:
    diag = _Diag()
    if not isinstance(doc, dict):
        raise DocumentError(["<root>: algebra document must be an object"])
    known = {"name", "degrees", "brackets", "g0", "truncation"}
    for k in sorted(set(doc) - known):
        diag.add(k, f"unknown field (allowed: {sorted(known)})")
    name = doc.get("name", "")
    if not isinstance(name, str):
        diag.add("name", "must be a string")
        name = ""
    dims = _parse_degrees(doc, diag)
    trunc = doc.get("truncation")
    if trunc is not None and not _is_int(trunc):
        diag.add("truncation", "must be an integer")
        trunc = None
    diag.raise_if_any()
    sp = GradedVectorSpace(dims)
    entries: Dict[Tuple[int, int], Vector] = {}
    brackets = doc.get("brackets", [])
    if not isinstance(brackets, list):
        diag.add("brackets", "must be a list")
        brackets = []
    for n, b in enumerate(brackets):
        path = f"brackets[{n}]"
        if not isinstance(b, dict):
            diag.add(path, "must be an object")
            continue
        left = _basis_ref(b.get("left"), path + ".left", dims, diag)
        right = _basis_ref(b.get("right"), path + ".right", dims, diag)
        outs = b.get("out", [])
        if not isinstance(outs, list):
            diag.add(path + ".out", "must be a list")
            continue
        if left is None or right is None:
            continue
        target = left[0] + right[0]
        vec: Vector = {}
        for m, o in enumerate(outs):
            opath = f"{path}.out[{m}]"
            if not isinstance(o, dict) or not _is_int(o.get("index")):
                diag.add(opath, "must be {index, num, den}")
                continue
            if not 0 <= o["index"] < dims.get(target, 0):
                diag.add(opath + ".index", f"degree {target} has no index {o['index']}")
                continue
            c = _rational_fields(o, opath, diag)
            if c is not None:
                w = sp.index[(target, o["index"])]
                vec[w] = vec.get(w, Fraction(0)) + c
        u, v = sp.index[left], sp.index[right]
        if u == v:
            if any(vec.values()):
                diag.add(path, "bracket of an element with itself must vanish")
            continue
        if u > v:
            u, v = v, u
            vec = {w: -c for w, c in vec.items()}
        vec = {w: c for w, c in vec.items() if c}
        if (u, v) in entries and entries[(u, v)] != vec:
            diag.add(path, "conflicts with an earlier entry for the same pair")
            continue
        entries[(u, v)] = vec
    diag.raise_if_any()
    g0_doc = doc.get("g0")
    negative = all(p < 0 for p in dims)
    if g0_doc is not None and not negative:
        diag.add("g0", "only allowed when all degrees are negative")
    diag.raise_if_any()
    alg = GradedLieAlgebra(sp, {k: v for k, v in entries.items() if v}, order=trunc, name=name)
    g0 = None
    mode = None
    metric = None
    if g0_doc is not None:
        if not isinstance(g0_doc, dict):
            raise DocumentError(["g0: must be an object"])
        mode = g0_doc.get("mode")
        if mode not in G0_MODES:
            raise DocumentError([f"g0.mode: unknown mode {mode!r} (allowed: {', '.join(G0_MODES)})"])
        n1 = dims.get(-1, 0)
        if mode == "metric-orthogonal":
            mat = _parse_matrix(g0_doc.get("metric"), n1, "g0.metric", diag)
            diag.raise_if_any()
            if any(mat[i][j] != mat[j][i] for i in range(n1) for j in range(n1)):
                raise DocumentError(["g0.metric: must be symmetric"])
            metric = Metric(mat)
            g0 = derivations_degree0(alg, metric)
        elif mode == "full-derivations":
            g0 = derivations_degree0(alg)
        else:
            gens = g0_doc.get("generators")
            if not isinstance(gens, list):
                raise DocumentError(["g0.generators: must be a list"])
            maps = []
            for n, gdoc in enumerate(gens):
                path = f"g0.generators[{n}]"
                if not isinstance(gdoc, dict):
                    diag.add(path, "must map degree to matrix")
                    continue
                m: Dict[int, Vector] = {}
                for key, mat in gdoc.items():
                    try:
                        p = int(key)
                    except ValueError:
                        diag.add(f"{path}[{key!r}]", "degree key must be an integer")
                        continue
                    if p not in dims:
                        diag.add(f"{path}[{key!r}]", f"no degree {p}")
                        continue
                    dense = _parse_matrix(mat, dims[p], f"{path}[{key!r}]", diag)
                    if dense is None:
                        continue
                    o = sp.offset[p]
                    for j in range(dims[p]):
                        img = {o + r: dense[r][j] for r in range(dims[p]) if dense[r][j]}
                        if img:
                            m[o + j] = img
                maps.append(m)
            diag.raise_if_any()
            g0 = matrix_algebra(alg, maps)
    return AlgebraSpec(name, alg, g0, mode, metric, trunc)


def algebra_json(alg: GradedLieAlgebra, g0_mode: Optional[str] = None) -> dict:
    """Inverse of :func:`parse_algebra` for algebras without a separate g0."""
    basis = alg.space.basis
    out = []
    for (u, v), vec in sorted(alg.table.items()):
        if not vec:
            continue
        out.append({"left": list(basis[u]), "right": list(basis[v]),
                    "out": [dict(index=basis[w][1], **rational_json(c))
                            for w, c in sorted(vec.items())]})
    doc = {"name": alg.name, "degrees": {str(p): n for p, n in alg.space.dims.items()},
           "brackets": out}
    if g0_mode:
        doc["g0"] = {"mode": g0_mode}
    if alg.order is not None:
        doc["truncation"] = alg.order
    return doc


# ---------------------------------------------------------------------------
# model documents

@dataclass
class ModelSpec:
    name: str
    base_doc: AlgebraSpec
    truncation: int
    start: str
    entries: Dict[Tuple[Tuple[int, int], Tuple[int, int]], Dict[Tuple[int, int], Fraction]]


def parse_model(doc: Any, base_dir: Optional[Path] = None,
                reader: Optional[Callable[[str], bytes]] = None) -> ModelSpec:
    """Parse a model document.  A string ``base`` is read relative to
    ``base_dir``, or through ``reader`` when one is given."""
    diag = _Diag()
    if not isinstance(doc, dict):
        raise DocumentError(["<root>: model document must be an object"])
    known = {"name", "base", "truncation", "start", "gamma"}
    for k in sorted(set(doc) - known):
        diag.add(k, f"unknown field (allowed: {sorted(known)})")
    name = doc.get("name", "")
    if not isinstance(name, str):
        diag.add("name", "must be a string")
    trunc = doc.get("truncation")
    if not _is_int(trunc) or trunc < 0:
        diag.add("truncation", "must be a nonnegative integer")
    start = doc.get("start", "bracket")
    if start not in MODEL_STARTS:
        diag.add("start", f"unknown start {start!r} (allowed: {', '.join(MODEL_STARTS)})")
    base = doc.get("base")
    if isinstance(base, str):
        if reader is not None:
            raw = reader(base)
        else:
            path = Path(base)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            try:
                raw = path.read_bytes()
            except OSError as exc:
                raise FileNotFoundError(f"base: cannot read {base!r}: {exc.strerror}") from None
        base_spec = parse_algebra(load_json(raw, str(base)))
    elif isinstance(base, dict):
        try:
            base_spec = parse_algebra(base)
        except DocumentError as exc:
            raise DocumentError([f"base.{d}" for d in exc.diagnostics]) from None
    else:
        diag.add("base", "must be a file name or an inline algebra document")
        base_spec = None
    gamma = doc.get("gamma", [])
    if not isinstance(gamma, list):
        diag.add("gamma", "must be a list")
        gamma = []
    diag.raise_if_any()
    entries: Dict = {}
    for n, e in enumerate(gamma):
        path = f"gamma[{n}]"
        if not isinstance(e, dict):
            diag.add(path, "must be an object")
            continue
        refs = []
        for side in ("left", "right"):
            x = e.get(side)
            if not (isinstance(x, list) and len(x) == 2 and all(_is_int(t) for t in x)):
                diag.add(f"{path}.{side}", "must be [degree, index]")
            else:
                refs.append(tuple(x))
        outs = e.get("out", [])
        if len(refs) != 2 or not isinstance(outs, list):
            if not isinstance(outs, list):
                diag.add(path + ".out", "must be a list")
            continue
        vec: Dict[Tuple[int, int], Fraction] = {}
        for m, o in enumerate(outs):
            opath = f"{path}.out[{m}]"
            if not isinstance(o, dict) or not _is_int(o.get("degree")) or not _is_int(o.get("index")):
                diag.add(opath, "must be {degree, index, num, den}")
                continue
            c = _rational_fields(o, opath, diag)
            if c is not None:
                key = (o["degree"], o["index"])
                vec[key] = vec.get(key, Fraction(0)) + c
        a, b = refs
        if a == b:
            if any(vec.values()):
                diag.add(path, "gamma of an element with itself must vanish")
            continue
        if (b, a) in entries:
            if entries[(b, a)] != {k: -c for k, c in vec.items()}:
                diag.add(path, "not alternating: disagrees with the reversed pair")
            continue
        if (a, b) in entries and entries[(a, b)] != vec:
            diag.add(path, "conflicts with an earlier entry for the same pair")
            continue
        entries[(a, b)] = vec
    diag.raise_if_any()
    return ModelSpec(name or base_spec.name, base_spec, trunc, start, entries)


# ---------------------------------------------------------------------------
# reports

def to_jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return rational_json(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def render_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def _is_rational(x: Any) -> bool:
    return isinstance(x, dict) and set(x) == {"num", "den"}


def flatten(x: Any, prefix: str = "") -> List[Tuple[str, str]]:
    """``(key.path, value)`` pairs in document order; rationals as ``p/q``."""
    out: List[Tuple[str, str]] = []
    if _is_rational(x):
        s = str(x["num"]) if x["den"] == 1 else f"{x['num']}/{x['den']}"
        return [(prefix, s)]
    if isinstance(x, dict):
        if not x:
            return [(prefix, "{}")]
        for k, v in x.items():
            out.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(x, list):
        if not x:
            return [(prefix, "[]")]
        for i, v in enumerate(x):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    if x is None:
        return [(prefix, "null")]
    if isinstance(x, bool):
        return [(prefix, "true" if x else "false")]
    return [(prefix, str(x))]


def render_text(report: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in flatten(to_jsonable(report)))


def parse_text(text: str) -> List[Tuple[str, str]]:
    """Read back :func:`render_text` output."""
    out = []
    for line in text.splitlines():
        k, sep, v = line.partition(" = ")
        if sep:
            out.append((k, v))
    return out


def model_json(gam, base: Any, start: str = "bracket") -> dict:
    """Model document for ``gam``; entries are the difference from the
    starting table."""
    g = gam.base
    basis = g.space.basis
    entries = []
    for (u, v) in sorted(set(gam.table) | (set(g.table) if start == "bracket" else set())):
        vec = dict(gam.gamma(u, v))
        if start == "bracket":
            for w, c in g.br(u, v).items():
                vec[w] = vec.get(w, Fraction(0)) - c
        vec = {w: c for w, c in vec.items() if c}
        if vec:
            entries.append({"left": list(basis[u]), "right": list(basis[v]),
                            "out": [dict(degree=basis[w][0], index=basis[w][1], **rational_json(c))
                                    for w, c in sorted(vec.items())]})
    return {"name": gam.name, "base": base, "truncation": g.top, "start": start,
            "gamma": entries}
