"""Tanaka prolongation of a truncated transitive graded Lie algebra.

Degree ``m`` of the prolongation consists of the degree-``m`` maps from the
negative part into the algebra built so far which satisfy the Leibniz rule.
Brackets between two nonnegative elements ``x, y`` are then forced by
transitivity::

    [[x, y], u] = [[x, u], y] + [x, [y, u]]      for u negative,

and every term on the right has strictly smaller total degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import BracketInconsistencyError, TruncationError, ValidationError
from .glacore import (GradedLieAlgebra, GradedVectorSpace, MatrixLieAlgebra, Metric,
                      derivation_equations, derivations_degree0, is_fundamental,
                      matrix_algebra, require_transitive, truncate, with_degree_zero)
from .linalg import Echelon, Vector, nullspace, nullspace_free, vec_iadd

FINITE = "finite_type"
INFINITE = "infinite_type_at_cap"
UNKNOWN = "unknown_at_cap"


def hom_coordinates(alg: GradedLieAlgebra, shift: int) -> List[Tuple[int, int]]:
    """Coordinates ``(u, w)`` of degree-``shift`` maps from the negative part."""
    sp = alg.space
    return [(u, w) for u in sp.negative() for w in sp.indices(sp.deg[u] + shift)]


def _as_map(vec: Vector, coords: Sequence[Tuple[int, int]]) -> Dict[int, Vector]:
    m: Dict[int, Vector] = {}
    for k, c in vec.items():
        u, w = coords[k]
        m.setdefault(u, {})[w] = c
    return m


def extend_brackets(alg: GradedLieAlgebra, m: int,
                    free: Sequence[int], coords: Sequence[Tuple[int, int]],
                    basis: Sequence[Vector]) -> None:
    """Fill in ``[g_a, g_b]`` for ``a, b >= 0`` and ``a + b = m``.

    ``basis`` lists the elements of ``g_m`` as vectors over ``coords`` and
    ``free[j]`` is the coordinate where element ``j`` has entry 1 while all
    other elements vanish.  Raises when the recursion leaves ``g_m``.
    """
    sp = alg.space
    pos = {uw: k for k, uw in enumerate(coords)}
    top = list(sp.indices(m))
    neg = sp.negative()
    for a in range(0, m // 2 + 1):
        b = m - a
        for x in sp.indices(a):
            for y in sp.indices(b):
                if a == b and y <= x:
                    continue
                phi: Vector = {}
                for u in neg:
                    img: Vector = {}
                    for s, c in alg.br(x, u).items():
                        vec_iadd(img, alg.br(s, y), c)
                    for s, c in alg.br(y, u).items():
                        vec_iadd(img, alg.br(x, s), c)
                    for w, c in img.items():
                        k = pos.get((u, w))
                        if k is None:
                            raise BracketInconsistencyError(
                                "bracket recursion left the graded range",
                                witness=[list(sp.basis[x]), list(sp.basis[y])])
                        phi[k] = c
                cf = {j: phi[f] for j, f in enumerate(free) if f in phi}
                check: Vector = {}
                for j, c in cf.items():
                    vec_iadd(check, basis[j], c)
                if check != phi:
                    raise BracketInconsistencyError(
                        "bracket recursion produced a map outside the prolongation",
                        witness=[list(sp.basis[x]), list(sp.basis[y])])
                out = {top[j]: c for j, c in cf.items() if c}
                if out:
                    alg.table[(x, y)] = out


def prolong_step(alg: GradedLieAlgebra) -> GradedLieAlgebra:
    """Compute ``g[k+1]`` from a transitive truncated algebra ``g[k]``."""
    if alg.order is None:
        raise ValidationError("prolong_step expects a truncated algebra")
    if alg.order < 0:
        raise ValidationError("prolong_step expects truncation order >= 0")
    require_transitive(alg)
    m = alg.order + 1
    coords = hom_coordinates(alg, m)
    rows = derivation_equations(alg, m, coords)
    ker, free = nullspace_free(rows, len(coords))
    dims = dict(alg.space.dims)
    if ker:
        dims[m] = len(ker)
    sp = GradedVectorSpace(dims)
    new = GradedLieAlgebra(sp, order=m, name=alg.name)
    new.table = {k: dict(v) for k, v in alg.table.items()}
    top = list(sp.indices(m))
    for j, vec in enumerate(ker):
        for u, img in _as_map(vec, coords).items():
            new.table[(u, top[j])] = {w: -c for w, c in img.items()}
    extend_brackets(new, m, free, coords, ker)
    return new


@dataclass
class ProlongationResult:
    algebra: GradedLieAlgebra
    dims_by_degree: Dict[int, int]
    verdict: str
    heuristic: bool
    fundamental: bool
    cap: int

    @property
    def total_dim(self) -> int:
        return sum(self.dims_by_degree.values())

    @property
    def positive_dims(self) -> Dict[int, int]:
        return {p: n for p, n in self.dims_by_degree.items() if p >= 1}


def _start(gminus: GradedLieAlgebra, g0, metric: Optional[Metric]) -> GradedLieAlgebra:
    if any(p >= 0 for p in gminus.space.degrees):
        if g0 is not None or metric is not None:
            raise ValidationError("algebra already contains nonnegative degrees")
        if gminus.order is None:
            return truncate(gminus, gminus.space.max_degree)
        return gminus
    if g0 is None:
        g0 = derivations_degree0(gminus, metric)
    elif not isinstance(g0, MatrixLieAlgebra):
        g0 = matrix_algebra(gminus, g0)
    return with_degree_zero(gminus, g0)


def _restriction_injective(alg: GradedLieAlgebra, p: int) -> bool:
    """Whether ``g_{p+1} -> Hom(g_{-1}, g_p)`` is injective."""
    sp = alg.space
    ech = Echelon()
    n = alg.dim
    for x in sp.indices(p + 1):
        img = {}
        for u in sp.indices(-1):
            for w, c in alg.br(x, u).items():
                img[u * n + w] = c
        if not ech.add(img):
            return False
    return True


def prolong_full(gminus: GradedLieAlgebra, g0=None, cap: int = 6,
                 metric: Optional[Metric] = None) -> ProlongationResult:
    """Prolong up to degree ``cap``.

    ``gminus`` is either a negatively graded algebra (then ``g0`` gives the
    degree-0 part, defaulting to all degree-0 derivations, optionally skew for
    ``metric``) or a truncated algebra already containing degrees ``0..k``.

    The verdict is ``finite_type`` only when the negative part is fundamental
    and some nonnegative degree vanishes.  Otherwise ``infinite_type_at_cap``
    is reported when the last three dimensions grow strictly and the
    restriction to degree -1 stays injective (a heuristic), else
    ``unknown_at_cap``.
    """
    alg = _start(gminus, g0, metric)
    require_transitive(alg)
    fund = is_fundamental(alg)
    if cap < alg.order:
        alg = truncate(alg, cap)

    def vanished(a: GradedLieAlgebra) -> bool:
        return fund and any(a.space.dim_of(p) == 0 for p in range(0, a.order + 1))

    while not vanished(alg) and alg.order < cap:
        alg = prolong_step(alg)
    dims = {p: alg.space.dim_of(p) for p in range(alg.space.min_degree, alg.order + 1)}
    if vanished(alg):
        last = max(p for p, n in alg.space.dims.items()) if alg.space.dims else -1
        dims = {p: n for p, n in dims.items() if p <= last}
        done = GradedLieAlgebra(alg.space, order=None, name=alg.name)
        done.table = alg.table
        return ProlongationResult(done, dims, FINITE, False, fund, cap)
    verdict = UNKNOWN
    if cap >= 2:
        seq = [dims.get(cap - 2, 0), dims.get(cap - 1, 0), dims.get(cap, 0)]
        grows = seq[0] < seq[1] < seq[2]
        if grows and all(_restriction_injective(alg, p) for p in (cap - 2, cap - 1)):
            verdict = INFINITE
    return ProlongationResult(alg, dims, verdict, verdict == INFINITE, fund, cap)


def tanaka_finite_type_reduction(gminus: GradedLieAlgebra,
                                 g0: Optional[MatrixLieAlgebra] = None
                                 ) -> Tuple[GradedLieAlgebra, MatrixLieAlgebra]:
    """Pair ``(f_-, f_0)`` with ``f_-`` the abelian algebra on degree -1 and
    ``f_0`` the elements of ``g_0`` acting trivially below degree -1,
    restricted to degree -1."""
    if not is_fundamental(gminus):
        raise ValidationError("the negative part is not fundamental")
    if g0 is None:
        g0 = derivations_degree0(gminus)
    sp = gminus.space
    deep = [u for u in sp.negative() if sp.deg[u] < -1]
    n = gminus.dim
    rows: Dict[int, Vector] = {}
    for i, m in enumerate(g0.basis):
        for u in deep:
            for w, c in m.get(u, {}).items():
                rows.setdefault(u * n + w, {})[i] = c
    ker = nullspace(rows.values(), g0.dim)
    n1 = sp.dim_of(-1)
    fminus = GradedLieAlgebra(GradedVectorSpace({-1: n1}), name="abelian")
    o = sp.offset.get(-1, 0)
    maps = []
    for vec in ker:
        m: Dict[int, Vector] = {}
        for i, c in vec.items():
            for u in sp.indices(-1):
                for w, x in g0.basis[i].get(u, {}).items():
                    vec_iadd(m.setdefault(u - o, {}), {w - o: c * x})
        maps.append({u: v for u, v in m.items() if v})
    return fminus, matrix_algebra(fminus, maps)


def universal_fiber_dims(neg_dims: Mapping[int, int], known: Sequence[int],
                         ell_max: int) -> Dict[int, int]:
    """Dimensions of the universal fibers for ``ell`` up to ``ell_max``.

    ``known`` lists the dimensions of degrees ``0..k``.  For ``ell > k``::

        dim G_ell = sum_{p<0} dim g_p * dim G_{p+ell}
                    + (dim G_0 + ... + dim G_{ell-2}) * dim G_{ell-1}

    where ``G_j`` stands for ``g_j`` when ``j < 0`` or ``j <= k``.
    """
    k = len(known) - 1
    if ell_max <= k:
        raise ValidationError("ell_max must exceed the highest known degree")
    neg = {int(p): int(n) for p, n in neg_dims.items() if int(p) < 0}
    dims: Dict[int, int] = dict(neg)
    for i, n in enumerate(known):
        dims[i] = int(n)
    out: Dict[int, int] = {}
    for ell in range(k + 1, ell_max + 1):
        first = sum(n * dims.get(p + ell, 0) for p, n in neg.items())
        second = sum(dims.get(i, 0) for i in range(0, ell - 1)) * dims.get(ell - 1, 0)
        dims[ell] = first + second
        out[ell] = dims[ell]
    return out


def cumulative_dims(neg_dims: Mapping[int, int], fibers: Mapping[int, int]) -> Dict[int, int]:
    """Running totals ``dim g_- + sum_{0 <= i <= ell} fibers[i]``."""
    total = sum(n for p, n in neg_dims.items() if p < 0)
    out = {}
    for ell in sorted(fibers):
        total += fibers[ell]
        out[ell] = total
    return out


def hom_dim(neg_dims: Mapping[int, int], dims: Mapping[int, int], shift: int) -> int:
    """Dimension of degree-``shift`` maps from the negative part into ``dims``."""
    return sum(n * dims.get(p + shift, 0) for p, n in neg_dims.items() if p < 0)


def gl_prolongation_dim(n: int, p: int) -> int:
    """Dimension of degree ``p`` in the prolongation of ``(R^n, gl(n))``."""
    return n * comb(n + p, p + 1)
