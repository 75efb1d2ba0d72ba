"""Standard algebras and seeded generators of constant structure functions.

The generators produce:

* Jacobi-valid admissible models, by a filtration-preserving change of basis
  ``e_p -> e_p + (higher degree terms)`` of a complete graded Lie algebra;
* admissible models with random perturbations in admissible slots;
* curvature models ``so(n) + R^n`` with ``[X, Y] = c X^Y``, whose tau is flat.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .glacore import (GradedLieAlgebra, GradedVectorSpace, Metric, MatrixLieAlgebra,
                      derivations_degree0, matrix_algebra, with_degree_zero)
from .linalg import ONE, ZERO, SpanSolver, Vector, inverse, vec_iadd
from .models import ConstantStructureFunction, kind_of
from .prolong import prolong_full


def heisenberg() -> GradedLieAlgebra:
    """Three-dimensional Heisenberg algebra, degrees -2 (one) and -1 (two)."""
    sp = GradedVectorSpace({-2: 1, -1: 2})
    return GradedLieAlgebra(sp, {(1, 2): {0: ONE}}, name="heisenberg")


def symbol_235() -> GradedLieAlgebra:
    """Free 3-step nilpotent algebra on two generators truncated to dims
    (2, 1, 2): ``[X1,X2] = X3, [X1,X3] = X4, [X2,X3] = X5``."""
    sp = GradedVectorSpace({-3: 2, -2: 1, -1: 2})
    x4, x5, x3, x1, x2 = 0, 1, 2, 3, 4
    return GradedLieAlgebra(sp, {(x1, x2): {x3: ONE}, (x3, x1): {x4: -ONE},
                                 (x3, x2): {x5: -ONE}}, name="g235")


def abelian(n: int) -> GradedLieAlgebra:
    return GradedLieAlgebra(GradedVectorSpace({-1: n}), name=f"abelian{n}")


def riemannian(n: int) -> GradedLieAlgebra:
    """Complete algebra ``R^n + so(n)`` (its own full prolongation)."""
    res = prolong_full(abelian(n), cap=2, metric=Metric.euclidean(n))
    res.algebra.name = f"riemannian{n}"
    return res.algebra


def g2() -> GradedLieAlgebra:
    res = prolong_full(symbol_235(), cap=6)
    res.algebra.name = "g2"
    return res.algebra


def graded_sl(weights: Sequence[int], name: str = "") -> GradedLieAlgebra:
    """``sl(m)`` graded by ``deg E_ij = w_i - w_j``.

    Basis: off-diagonal matrix units and ``H_k = E_kk - E_{k+1,k+1}``.
    """
    m = len(weights)
    elems: List[Tuple[int, Dict[Tuple[int, int], int]]] = []
    for i in range(m):
        for j in range(m):
            if i != j:
                elems.append((weights[i] - weights[j], {(i, j): 1}))
    for k in range(m - 1):
        elems.append((0, {(k, k): 1, (k + 1, k + 1): -1}))
    elems.sort(key=lambda e: e[0])
    dims: Dict[int, int] = {}
    for d, _ in elems:
        dims[d] = dims.get(d, 0) + 1
    sp = GradedVectorSpace(dims)

    def flat(mat):
        return {i * m + j: Fraction(c) for (i, j), c in mat.items() if c}

    solver = SpanSolver([flat(e[1]) for e in elems])
    table = {}
    for u, v in combinations(range(len(elems)), 2):
        a, b = elems[u][1], elems[v][1]
        prod: Dict[Tuple[int, int], int] = {}
        for (i, j), x in a.items():
            for (k, l), y in b.items():
                if j == k:
                    prod[(i, l)] = prod.get((i, l), 0) + x * y
                if l == i:
                    prod[(k, j)] = prod.get((k, j), 0) - x * y
        c = solver.coords(flat(prod))
        assert c is not None
        if c:
            table[(u, v)] = c
    return GradedLieAlgebra(sp, table, name=name or f"sl{m}")


def catalogue() -> Dict[str, GradedLieAlgebra]:
    """Complete transitive graded Lie algebras of dimension at most 14."""
    return {
        "sl2": graded_sl([1, 0], "sl2"),
        "riemannian2": riemannian(2),
        "riemannian3": riemannian(3),
        "sl3_contact": graded_sl([1, 0, -1], "sl3_contact"),
        "sl3_projective": graded_sl([1, 0, 0], "sl3_projective"),
        "g2": g2(),
    }


# ---------------------------------------------------------------------------
# structure function generators

def _rand_q(rng: random.Random, lo: int = -2, hi: int = 2) -> Fraction:
    while True:
        x = rng.randint(lo, hi)
        if x:
            return Fraction(x, rng.choice([1, 1, 1, 2]))


def transform(gam: ConstantStructureFunction, T: Sequence[Vector],
              base: Optional[GradedLieAlgebra] = None) -> ConstantStructureFunction:
    """``gamma'(e_u, e_v) = T^{-1} gamma(T e_u, T e_v)``.

    ``T[u]`` is the image of ``e_u``.  ``base`` replaces the base algebra
    when ``T`` also changes the graded bracket.
    """
    n = gam.dim
    dense = [[T[u].get(w, ZERO) for u in range(n)] for w in range(n)]
    Tinv = inverse(dense)
    table = {}
    for u, v in combinations(range(n), 2):
        img = gam.apply(T[u], T[v])
        out: Vector = {}
        for w, c in img.items():
            for i in range(n):
                x = Tinv[i][w]
                if x:
                    vec_iadd(out, {i: x * c})
        if out:
            table[(u, v)] = out
    return ConstantStructureFunction(base or gam.base, table, gam.complete, gam.name)


def unipotent_change(g: GradedLieAlgebra, rng: random.Random,
                     density: float = 0.3) -> List[Vector]:
    """Random ``T = 1 + N`` with ``N`` raising degree strictly."""
    deg = g.deg
    T: List[Vector] = []
    for u in range(g.dim):
        col: Vector = {u: ONE}
        for w in range(g.dim):
            if deg[w] > deg[u] and rng.random() < density:
                col[w] = _rand_q(rng)
        T.append(col)
    return T


def random_filtered_model(g: GradedLieAlgebra, rng: random.Random,
                          density: float = 0.3) -> ConstantStructureFunction:
    """Jacobi-valid admissible model: the bracket of ``g`` in a randomly
    filtered basis."""
    gam = ConstantStructureFunction.from_bracket(g)
    return transform(gam, unipotent_change(g, rng, density))


def admissible_slots(g: GradedLieAlgebra, normal: bool = True
                     ) -> List[Tuple[int, int, int]]:
    """Slots ``(u, v, w)`` with ``u < v`` that an admissible gamma may change
    away from the bracket."""
    deg = g.deg
    out = []
    for u, v in combinations(range(g.dim), 2):
        a, b = deg[u], deg[v]
        kd = kind_of(a, b)
        for w in range(g.dim):
            c = deg[w]
            if kd == "sigma":
                lo = max(a, b) if normal else max(a, b) - 1
                if c >= lo:
                    out.append((u, v, w))
            elif c - a - b >= 1:
                out.append((u, v, w))
    return out


def random_admissible(g: GradedLieAlgebra, rng: random.Random, nslots: int = 3,
                      start: Optional[ConstantStructureFunction] = None,
                      slots: Optional[Sequence[Tuple[int, int, int]]] = None
                      ) -> ConstantStructureFunction:
    """Perturb ``start`` (default: the bracket) in ``nslots`` admissible slots."""
    gam = (start or ConstantStructureFunction.from_bracket(g)).copy()
    pool = list(slots if slots is not None else admissible_slots(g))
    for u, v, w in rng.sample(pool, min(nslots, len(pool))):
        gam.add(u, v, w, _rand_q(rng))
    return gam


def curvature_model(n: int, c=1) -> ConstantStructureFunction:
    """``R^n + so(n)`` with ``gamma(X_i, X_j) = c E_ij`` in degree 0.

    For ``c != 0`` this is ``so(n+1)`` or ``so(n,1)``; tau is flat and kappa
    has a single slice of modified degree 2.
    """
    g = riemannian(n)
    gam = ConstantStructureFunction.from_bracket(g)
    neg = list(g.space.indices(-1))
    zero = list(g.space.indices(0))
    # E_ij acts by X_j -> X_i, X_i -> -X_j; find it among the g_0 basis
    gens = []
    for A in zero:
        gens.append({u * g.dim + w: cf for u in neg for w, cf in g.br(A, u).items()})
    solver = SpanSolver(gens)
    for i, j in combinations(range(n), 2):
        xi, xj = neg[i], neg[j]
        target = {xj * g.dim + xi: ONE, xi * g.dim + xj: -ONE}
        coords = solver.coords(target)
        gam.set(xi, xj, {zero[k]: Fraction(c) * x for k, x in coords.items()})
    return gam


def degree_preserving_change(g: GradedLieAlgebra, rng: random.Random) -> List[Vector]:
    """Random invertible block-diagonal ``T`` (one block per degree)."""
    T: List[Vector] = [dict() for _ in range(g.dim)]
    for p in g.space.degrees:
        idx = list(g.space.indices(p))
        while True:
            m = [[Fraction(rng.randint(-2, 2)) for _ in idx] for _ in idx]
            try:
                inverse(m)
                break
            except ZeroDivisionError:
                continue
        for j, u in enumerate(idx):
            T[u] = {idx[i]: m[i][j] for i in range(len(idx)) if m[i][j]}
    return T


def conjugate_model(gam: ConstantStructureFunction, T: Sequence[Vector]
                    ) -> ConstantStructureFunction:
    """Transport a model and its base algebra along a degree-preserving ``T``."""
    base = ConstantStructureFunction.from_bracket(gam.base)
    newbase_gam = transform(base, T)
    g2_ = GradedLieAlgebra(gam.base.space, newbase_gam.table, order=gam.base.order,
                           name=gam.base.name)
    return transform(gam, T, base=g2_)
