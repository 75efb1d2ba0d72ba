"""Graded Lie algebras with exact rational structure constants.

A graded space has a finite number of degrees, each with a dimension.  Basis
vectors are addressed either by a pair ``(degree, index)`` or by a global
integer; global order is degree ascending, then index ascending.  Brackets are
stored sparsely for canonically ordered pairs only; the reflected entry is
obtained with a sign.

A *truncated* algebra of order ``k`` carries degrees ``<= k`` and knows the
bracket ``[g_p, g_q]`` only when ``p + q <= k``.  An algebra with ``order=None``
is complete: brackets landing above the top degree are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ValidationError, NonTransitiveError
from .linalg import (ONE, ZERO, Echelon, Vector, determinant, nullspace, rank,
                     vec_iadd)

Basis = Tuple[int, int]


class GradedVectorSpace:
    """Finite-dimensional graded vector space with a fixed ordered basis."""

    def __init__(self, dims: Mapping[int, int]) -> None:
        clean = {int(p): int(n) for p, n in dims.items() if int(n) > 0}
        for p, n in dims.items():
            if int(n) < 0:
                raise ValidationError(f"negative dimension in degree {p}")
        self.dims: Dict[int, int] = dict(sorted(clean.items()))
        self.basis: List[Basis] = [(p, i) for p, n in self.dims.items() for i in range(n)]
        self.index: Dict[Basis, int] = {b: k for k, b in enumerate(self.basis)}
        self.deg: List[int] = [p for p, _ in self.basis]
        self.offset: Dict[int, int] = {}
        k = 0
        for p, n in self.dims.items():
            self.offset[p] = k
            k += n

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def dim_of(self, p: int) -> int:
        return self.dims.get(p, 0)

    def indices(self, p: int) -> range:
        """Global indices of the basis of degree ``p``."""
        n = self.dims.get(p, 0)
        o = self.offset.get(p, 0)
        return range(o, o + n)

    @property
    def degrees(self) -> List[int]:
        return list(self.dims)

    @property
    def min_degree(self) -> int:
        return min(self.dims) if self.dims else 0

    @property
    def max_degree(self) -> int:
        return max(self.dims) if self.dims else 0

    def negative(self) -> List[int]:
        return [k for k, p in enumerate(self.deg) if p < 0]

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedVectorSpace) and self.dims == other.dims

    def __repr__(self) -> str:
        return f"GradedVectorSpace({self.dims})"


@dataclass
class Metric:
    """Symmetric bilinear form on the degree -1 part, as a dense matrix."""

    matrix: List[List[Fraction]]

    def __post_init__(self) -> None:
        self.matrix = [[Fraction(v) for v in row] for row in self.matrix]
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise ValidationError("metric matrix is not square")
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValidationError("metric matrix is not symmetric",
                                          witness=[i, j])
        if determinant(self.matrix) == 0:
            raise ValidationError("metric matrix is degenerate")

    @property
    def positive_definite(self) -> bool:
        n = len(self.matrix)
        return all(determinant([r[:k] for r in self.matrix[:k]]) > 0
                   for k in range(1, n + 1))

    @classmethod
    def euclidean(cls, n: int) -> "Metric":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


class GradedLieAlgebra:
    """Graded Lie algebra, possibly truncated, with a sparse bracket table.

    ``table`` maps canonically ordered global index pairs ``(u, v)`` with
    ``u < v`` to the sparse vector ``[e_u, e_v]``.
    """

    def __init__(self, space: GradedVectorSpace,
                 table: Optional[Mapping[Tuple[int, int], Vector]] = None,
                 order: Optional[int] = None, name: str = "") -> None:
        self.space = space
        self.order = order
        self.name = name
        self.table: Dict[Tuple[int, int], Vector] = {}
        self.cache: Dict[object, object] = {}
        if order is not None and space.dims and space.max_degree > order:
            raise ValidationError(
                f"degree {space.max_degree} exceeds truncation order {order}")
        for (u, v), out in (table or {}).items():
            self.set_bracket(u, v, out)

    # basic accessors ---------------------------------------------------
    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def deg(self) -> List[int]:
        return self.space.deg

    @property
    def complete(self) -> bool:
        return self.order is None

    @property
    def top(self) -> int:
        """Largest degree that may carry elements."""
        if self.order is not None:
            return self.order
        return self.space.max_degree if self.space.dims else -1

    @property
    def depth(self) -> int:
        return -self.space.min_degree if self.space.dims and self.space.min_degree < 0 else 0

    def negative_part(self) -> "GradedLieAlgebra":
        """The subalgebra of negative degrees (a complete algebra)."""
        dims = {p: n for p, n in self.space.dims.items() if p < 0}
        sub = GradedLieAlgebra(GradedVectorSpace(dims), name=self.name)
        neg = self.space.negative()
        for (u, v), out in self.table.items():
            if u in neg and v in neg:
                sub.table[(u, v)] = dict(out)
        return sub

    def defined(self, p: int, q: int) -> bool:
        """Whether ``[g_p, g_q]`` is part of the structure."""
        return self.order is None or p + q <= self.order

    def set_bracket(self, u: int, v: int, out: Vector) -> None:
        if u == v:
            if out:
                raise ValidationError("bracket of a basis vector with itself must vanish")
            return
        sign = ONE
        if u > v:
            u, v, sign = v, u, -ONE
        deg = self.space.deg
        target = deg[u] + deg[v]
        if not self.defined(deg[u], deg[v]):
            if any(out.values()):
                raise ValidationError(
                    f"bracket into degree {target} is outside the truncation",
                    witness=[list(self.space.basis[u]), list(self.space.basis[v])])
            return
        clean = {}
        for w, c in out.items():
            if not c:
                continue
            if deg[w] != target:
                raise ValidationError(
                    "bracket does not respect the grading",
                    witness=[list(self.space.basis[u]), list(self.space.basis[v]),
                             list(self.space.basis[w])])
            clean[w] = sign * Fraction(c)
        if clean:
            self.table[(u, v)] = clean
        else:
            self.table.pop((u, v), None)

    def br(self, u: int, v: int) -> Vector:
        """Bracket of two basis vectors given by global index."""
        if u < v:
            return self.table.get((u, v), {})
        if u > v:
            out = self.table.get((v, u))
            return {w: -c for w, c in out.items()} if out else {}
        return {}

    def bracket(self, x: Vector, y: Vector) -> Vector:
        """Bilinear extension of the bracket to sparse vectors."""
        out: Vector = {}
        for u, a in x.items():
            for v, b in y.items():
                r = self.br(u, v)
                if r:
                    vec_iadd(out, r, a * b)
        return out

    def vec(self, coords: Mapping[Basis, object]) -> Vector:
        """Vector from ``{(degree, index): coefficient}``."""
        idx = self.space.index
        return {idx[tuple(b)]: Fraction(c) for b, c in coords.items() if c}

    def named(self, v: Vector) -> Dict[Basis, Fraction]:
        return {self.space.basis[k]: c for k, c in sorted(v.items())}

    def ad_on_negative(self, x: Vector) -> Vector:
        """Restriction of ``ad x`` to the negative part, flattened.

        Coordinates are ``u * dim + w`` for the coefficient of ``e_w`` in
        ``[x, e_u]`` with ``e_u`` negative.
        """
        n = self.dim
        out: Vector = {}
        for u in self.space.negative():
            for w, c in self.bracket(x, {u: ONE}).items():
                out[u * n + w] = c
        return out

    def __repr__(self) -> str:
        o = "complete" if self.order is None else f"order {self.order}"
        return f"GradedLieAlgebra({self.name!r}, dims={self.space.dims}, {o})"


def TruncatedGLA(space: GradedVectorSpace, table=None, order: int = 0,
                 name: str = "") -> GradedLieAlgebra:
    """Shorthand for a truncated algebra of the given order."""
    return GradedLieAlgebra(space, table, order=order, name=name)


# ---------------------------------------------------------------------------
# validation

@dataclass
class JacobiReport:
    ok: bool
    triples_checked: int
    witness: Optional[Tuple[Basis, Basis, Basis]] = None
    residual: Dict[Basis, Fraction] = field(default_factory=dict)


def _jacobi_range(alg: GradedLieAlgebra, p: int, q: int, r: int) -> bool:
    if alg.order is None:
        return True
    k = alg.order
    return p + q <= k and q + r <= k and p + r <= k and p + q + r <= k


def jacobi_residual(alg: GradedLieAlgebra, u: int, v: int, w: int) -> Vector:
    """Cyclic sum ``[[u,v],w] + [[v,w],u] + [[w,u],v]`` on basis vectors."""
    out: Vector = {}
    for a, b, c in ((u, v, w), (v, w, u), (w, u, v)):
        for s, x in alg.br(a, b).items():
            r = alg.br(s, c)
            if r:
                vec_iadd(out, r, x)
    return out


def check_jacobi(alg: GradedLieAlgebra) -> JacobiReport:
    """Check the Jacobi identity on every basis triple in range.

    The witness is the first failing triple in global basis order.
    """
    deg = alg.deg
    count = 0
    for u, v, w in combinations(range(alg.dim), 3):
        if not _jacobi_range(alg, deg[u], deg[v], deg[w]):
            continue
        count += 1
        res = jacobi_residual(alg, u, v, w)
        if res:
            b = alg.space.basis
            return JacobiReport(False, count, (b[u], b[v], b[w]), alg.named(res))
    return JacobiReport(True, count)


@dataclass
class TransitivityReport:
    ok: bool
    failing_degree: Optional[int] = None
    kernel_element: Dict[Basis, Fraction] = field(default_factory=dict)


def check_transitivity(alg: GradedLieAlgebra) -> TransitivityReport:
    """Check that ``ad`` restricted to the negative part is injective on
    every nonnegative degree."""
    for p in alg.space.degrees:
        if p < 0:
            continue
        idx = list(alg.space.indices(p))
        images = [alg.ad_on_negative({k: ONE}) for k in idx]
        # columns = basis elements of g_p; find a kernel vector
        rows: Dict[int, Vector] = {}
        for j, img in enumerate(images):
            for c, x in img.items():
                rows.setdefault(c, {})[j] = x
        ker = nullspace(rows.values(), len(idx))
        if ker:
            elt = {idx[j]: x for j, x in ker[0].items()}
            return TransitivityReport(False, p, alg.named(elt))
    return TransitivityReport(True)


def require_transitive(alg: GradedLieAlgebra) -> None:
    rep = check_transitivity(alg)
    if not rep.ok:
        raise NonTransitiveError(
            f"degree {rep.failing_degree} contains an element acting trivially "
            "on the negative part",
            witness={"degree": rep.failing_degree,
                     "element": [[list(b), str(c)] for b, c in rep.kernel_element.items()]})


def generated_dims(alg: GradedLieAlgebra) -> Dict[int, int]:
    """Dimensions of the subspaces spanned by iterated brackets of degree -1."""
    sp = alg.space
    gens = list(sp.indices(-1))
    layer: List[Vector] = [{k: ONE} for k in gens]
    out = {-1: len(gens)}
    p = -1
    while p - 1 >= sp.min_degree:
        p -= 1
        ech = Echelon()
        new: List[Vector] = []
        for g in gens:
            for x in layer:
                y = alg.bracket({g: ONE}, x)
                if y and ech.add(y):
                    new.append(y)
        out[p] = ech.rank
        layer = new
    return out


def is_fundamental(alg: GradedLieAlgebra) -> bool:
    """Whether the negative part is generated by degree -1."""
    gen = generated_dims(alg)
    return all(gen.get(p, 0) == n for p, n in alg.space.dims.items() if p < 0)


# ---------------------------------------------------------------------------
# degree-zero derivations

@dataclass
class MatrixLieAlgebra:
    """Lie algebra of degree-preserving maps of a negative graded part.

    Each element of ``basis`` maps global index ``u`` (negative degree) to a
    sparse vector ``{w: c}`` of the same degree.  ``structure`` gives the
    commutator ``[A_i, A_j]`` in the basis, for ``i < j``.
    """

    gminus: GradedLieAlgebra
    basis: List[Dict[int, Vector]]
    structure: Dict[Tuple[int, int], Vector] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrices(self, i: int) -> Dict[int, List[List[Fraction]]]:
        """Element ``i`` as one dense matrix per degree (column = image)."""
        sp = self.gminus.space
        out = {}
        for p in sp.degrees:
            idx = list(sp.indices(p))
            m = [[ZERO] * len(idx) for _ in idx]
            for j, u in enumerate(idx):
                for w, c in self.basis[i].get(u, {}).items():
                    m[w - idx[0]][j] = c
            out[p] = m
        return out


def _flatten(m: Mapping[int, Vector], n: int) -> Vector:
    return {u * n + w: c for u, img in m.items() for w, c in img.items() if c}


def _compose(a: Mapping[int, Vector], b: Mapping[int, Vector]) -> Dict[int, Vector]:
    out: Dict[int, Vector] = {}
    for u, img in b.items():
        acc: Vector = {}
        for w, c in img.items():
            if w in a:
                vec_iadd(acc, a[w], c)
        if acc:
            out[u] = acc
    return out


def matrix_algebra(gminus: GradedLieAlgebra,
                   maps: Sequence[Mapping[int, Vector]]) -> MatrixLieAlgebra:
    """Wrap degree-0 maps; checks that they are derivations closed under
    the commutator and linearly independent."""
    n = gminus.dim
    maps = [{u: dict(v) for u, v in m.items() if v} for m in maps]
    for i, m in enumerate(maps):
        bad = _derivation_defect(gminus, m)
        if bad is not None:
            raise ValidationError(f"map {i} is not a degree-0 derivation", witness=bad)
    from .linalg import SpanSolver
    solver = SpanSolver([_flatten(m, n) for m in maps])
    if solver.dependent:
        raise ValidationError("degree-0 maps are linearly dependent",
                              witness={"dependent": solver.dependent})
    struct: Dict[Tuple[int, int], Vector] = {}
    for i, j in combinations(range(len(maps)), 2):
        ab = _compose(maps[i], maps[j])
        ba = _compose(maps[j], maps[i])
        comm = {}
        for u in set(ab) | set(ba):
            v = dict(ab.get(u, {}))
            vec_iadd(v, ba.get(u, {}), -1)
            if v:
                comm[u] = v
        c = solver.coords(_flatten(comm, n))
        if c is None:
            raise ValidationError("degree-0 maps are not closed under the commutator",
                                  witness=[i, j])
        if c:
            struct[(i, j)] = c
    return MatrixLieAlgebra(gminus, maps, struct)


def _derivation_defect(g: GradedLieAlgebra, m: Mapping[int, Vector]):
    deg = g.deg
    for u, img in m.items():
        for w in img:
            if deg[w] != deg[u]:
                return {"reason": "not degree preserving", "source": u, "target": w}
    neg = g.space.negative()
    for u, v in combinations(neg, 2):
        lhs: Vector = {}
        for s, c in g.br(u, v).items():
            vec_iadd(lhs, m.get(s, {}), c)
        vec_iadd(lhs, g.bracket(m.get(u, {}), {v: ONE}), -1)
        vec_iadd(lhs, g.bracket({u: ONE}, m.get(v, {})), -1)
        if lhs:
            return {"reason": "Leibniz rule fails", "pair": [u, v]}
    return None


def derivation_equations(g: GradedLieAlgebra, shift: int,
                         unknowns: Sequence[Tuple[int, int]]) -> List[Vector]:
    """Linear equations for ``a in Hom(g_-, g)_shift`` to satisfy
    ``a([u,v]) = [a(u), v] + [u, a(v)]``.

    ``unknowns`` lists the coordinates ``(u, w)`` meaning "coefficient of
    ``e_w`` in ``a(e_u)``".
    """
    pos = {uw: k for k, uw in enumerate(unknowns)}
    by_src: Dict[int, List[Tuple[int, int]]] = {}
    for u, w in unknowns:
        by_src.setdefault(u, []).append((u, w))
    rows: List[Vector] = []
    neg = g.space.negative()
    for u, v in combinations(neg, 2):
        eq: Dict[int, Vector] = {}  # output basis -> row
        for s, c in g.br(u, v).items():
            for key in by_src.get(s, ()):
                eq.setdefault(key[1], {})
                vec_iadd(eq[key[1]], {pos[key]: c})
        for key in by_src.get(u, ()):
            for o, c in g.br(key[1], v).items():
                eq.setdefault(o, {})
                vec_iadd(eq[o], {pos[key]: -c})
        for key in by_src.get(v, ()):
            for o, c in g.br(u, key[1]).items():
                eq.setdefault(o, {})
                vec_iadd(eq[o], {pos[key]: -c})
        rows.extend(r for _, r in sorted(eq.items()) if r)
    return rows


def derivations_degree0(gminus: GradedLieAlgebra,
                        metric: Optional[Metric] = None) -> MatrixLieAlgebra:
    """All degree-0 derivations of the negative part.

    With a metric on degree -1, only derivations whose degree -1 block is
    skew for the metric are kept.
    """
    sp = gminus.space
    if any(p >= 0 for p in sp.degrees):
        raise ValidationError("expected an algebra concentrated in negative degrees")
    unknowns = [(u, w) for p in sp.degrees for u in sp.indices(p) for w in sp.indices(p)]
    rows = derivation_equations(gminus, 0, unknowns)
    if metric is not None:
        idx = list(sp.indices(-1))
        if len(metric.matrix) != len(idx):
            raise ValidationError("metric size does not match degree -1")
        pos = {uw: k for k, uw in enumerate(unknowns)}
        o = idx[0] if idx else 0
        # g(A e_a, e_b) + g(e_a, A e_b) = 0 with A e_a = sum_w x_{a,w} e_w
        for a in idx:
            for b in idx:
                if b < a:
                    continue
                row: Vector = {}
                for w in idx:
                    c1 = metric.matrix[w - o][b - o]
                    if c1:
                        vec_iadd(row, {pos[(a, w)]: c1})
                    c2 = metric.matrix[a - o][w - o]
                    if c2:
                        vec_iadd(row, {pos[(b, w)]: c2})
                if row:
                    rows.append(row)
    ker = nullspace(rows, len(unknowns))
    maps = []
    for vec in ker:
        m: Dict[int, Vector] = {}
        for k, c in vec.items():
            u, w = unknowns[k]
            m.setdefault(u, {})[w] = c
        maps.append(m)
    return matrix_algebra(gminus, maps)


def with_degree_zero(gminus: GradedLieAlgebra, g0: MatrixLieAlgebra,
                     name: str = "") -> GradedLieAlgebra:
    """The truncated algebra ``g_- + g_0`` of order 0 with ``[A, X] = A(X)``."""
    dims = dict(gminus.space.dims)
    if g0.dim:
        dims[0] = g0.dim
    sp = GradedVectorSpace(dims)
    alg = GradedLieAlgebra(sp, order=0, name=name or gminus.name)
    old = gminus.space
    remap = {k: sp.index[b] for k, b in enumerate(old.basis)}
    for (u, v), out in gminus.table.items():
        alg.table[(remap[u], remap[v])] = {remap[w]: c for w, c in out.items()}
    zero = list(sp.indices(0))
    for i, m in enumerate(g0.basis):
        for u, img in m.items():
            # [X_u, A_i] = -A_i(X_u); X_u has the smaller global index
            if img:
                alg.table[(remap[u], zero[i])] = {remap[w]: -c for w, c in img.items()}
    for (i, j), c in g0.structure.items():
        alg.table[(zero[i], zero[j])] = {zero[k]: x for k, x in c.items()}
    return alg


def truncate(alg: GradedLieAlgebra, order: int) -> GradedLieAlgebra:
    """Truncation ``g[order]`` of an algebra."""
    dims = {p: n for p, n in alg.space.dims.items() if p <= order}
    sp = GradedVectorSpace(dims)
    out = GradedLieAlgebra(sp, order=order, name=alg.name)
    remap = {k: sp.index[b] for k, b in enumerate(alg.space.basis) if b in sp.index}
    deg = alg.deg
    for (u, v), img in alg.table.items():
        if u in remap and v in remap and deg[u] + deg[v] <= order:
            out.table[(remap[u], remap[v])] = {remap[w]: c for w, c in img.items()}
    return out
