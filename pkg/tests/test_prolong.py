import random
import time
from fractions import Fraction

import pytest
import sympy

from gstruct.errors import NonTransitiveError, ValidationError
from gstruct.families import abelian, heisenberg, symbol_235
from gstruct.glacore import (GradedLieAlgebra, GradedVectorSpace, Metric, check_jacobi,
                             check_transitivity, derivation_equations, derivations_degree0,
                             with_degree_zero)
from gstruct.linalg import vec_iadd
from gstruct.prolong import (FINITE, INFINITE, UNKNOWN, cumulative_dims, gl_prolongation_dim,
                             hom_coordinates, hom_dim, prolong_full, prolong_step,
                             tanaka_finite_type_reduction, universal_fiber_dims)

from oracles import contact_dims, g2_graded_dims, gl_dims


def test_g2_matches_cartan_matrix_oracle():
    t = time.perf_counter()
    res = prolong_full(symbol_235(), cap=6)
    assert time.perf_counter() - t < 5
    assert res.dims_by_degree == g2_graded_dims()
    assert list(res.dims_by_degree.values()) == [2, 1, 2, 4, 2, 1, 2]
    assert res.total_dim == 14 and res.verdict == FINITE and not res.heuristic
    assert res.algebra.complete
    assert check_jacobi(res.algebra).ok


def test_riemannian_finite_type():
    for n in (2, 3, 4):
        res = prolong_full(abelian(n), cap=3, metric=Metric.euclidean(n))
        assert res.verdict == FINITE
        assert res.total_dim == n + n * (n - 1) // 2
        assert res.positive_dims == {}


def test_heisenberg_contact_counts():
    res = prolong_full(heisenberg(), cap=4)
    for p in range(1, 5):
        assert res.dims_by_degree[p] == contact_dims(p)
    assert [res.dims_by_degree[p] for p in (1, 2, 3)] == [6, 9, 12]
    assert res.verdict == INFINITE and res.heuristic


def test_gl_tower():
    res = prolong_full(abelian(2), cap=3)
    for p in (1, 2, 3):
        assert res.dims_by_degree[p] == gl_dims(2, p) == gl_prolongation_dim(2, p)
    assert [res.dims_by_degree[p] for p in (1, 2, 3)] == [6, 8, 10]


def test_gl3_closed_form():
    res = prolong_full(abelian(3), cap=2)
    assert [res.dims_by_degree[p] for p in (1, 2)] == [gl_dims(3, 1), gl_dims(3, 2)]


def test_small_cap_is_unknown():
    res = prolong_full(heisenberg(), cap=1)
    assert res.verdict == UNKNOWN


def test_non_fundamental_never_finite():
    # degree -2 not generated by degree -1: g_1 vanishes but no verdict is drawn
    g = GradedLieAlgebra(GradedVectorSpace({-2: 1, -1: 1}))
    res = prolong_full(g, cap=3)
    assert not res.fundamental
    assert res.verdict != FINITE


def test_prolong_step_output_is_valid():
    alg = with_degree_zero(heisenberg(), derivations_degree0(heisenberg()))
    for _ in range(3):
        alg = prolong_step(alg)
        assert check_jacobi(alg).ok
        assert check_transitivity(alg).ok


def _leibniz_defect(alg, m, alpha):
    """alpha([u,v]) - [alpha(u), v] - [u, alpha(v)] computed from brackets."""
    neg = alg.space.negative()
    for u in neg:
        for v in neg:
            if v <= u:
                continue
            lhs = {}
            for s, c in alg.br(u, v).items():
                vec_iadd(lhs, alpha.get(s, {}), c)
            vec_iadd(lhs, alg.bracket(alpha.get(u, {}), {v: 1}), -1)
            vec_iadd(lhs, alg.bracket({u: 1}, alpha.get(v, {})), -1)
            if lhs:
                return lhs
    return {}


def test_prolongation_is_maximal():
    alg = prolong_step(with_degree_zero(abelian(2), derivations_degree0(abelian(2))))
    m = alg.order + 1
    coords = hom_coordinates(alg, m)
    rows = derivation_equations(alg, m, coords)
    nxt = prolong_step(alg)
    mat = sympy.Matrix([[r.get(j, 0) for j in range(len(coords))] for r in rows])
    assert nxt.space.dim_of(m) == len(coords) - mat.rank()
    rng = random.Random(1)
    # random maps are derivations iff they satisfy the equations
    for _ in range(20):
        vec = {k: Fraction(rng.randint(-2, 2)) for k in range(len(coords)) if rng.random() < 0.3}
        alpha = {}
        for k, c in vec.items():
            if c:
                u, w = coords[k]
                alpha.setdefault(u, {})[w] = c
        sat = all(sum(r.get(k, 0) * c for k, c in vec.items()) == 0 for r in rows)
        assert sat == (not _leibniz_defect(alg, m, alpha))


def test_prolong_step_rejects_complete_or_nontransitive():
    with pytest.raises(ValidationError):
        prolong_step(heisenberg())
    sp = GradedVectorSpace({-1: 1, 0: 1})
    with pytest.raises(NonTransitiveError):
        prolong_step(GradedLieAlgebra(sp, order=0))


def test_tanaka_reduction():
    fm, f0 = tanaka_finite_type_reduction(heisenberg())
    assert fm.dim == 2 and f0.dim == 3
    fm, f0 = tanaka_finite_type_reduction(symbol_235())
    assert f0.dim == 0
    # abelian: f0 is all of g0
    fm, f0 = tanaka_finite_type_reduction(abelian(2))
    assert f0.dim == 4
    with pytest.raises(ValidationError):
        tanaka_finite_type_reduction(GradedLieAlgebra(GradedVectorSpace({-2: 1, -1: 1})))


def test_universal_fiber_dims_hand_counts():
    assert universal_fiber_dims({-1: 2}, [4], 1) == {1: 8}
    # ell = 2: Hom(g_-1, gbar_1) + Hom(gbar_0, gbar_1) = 2*8 + 4*8
    assert universal_fiber_dims({-1: 2}, [4], 2)[2] == 48
    # base case: nothing known above the negative part
    assert universal_fiber_dims({-1: 2}, [], 0) == {0: 4}
    with pytest.raises(ValidationError):
        universal_fiber_dims({-1: 2}, [4], 0)


def test_universal_dominates_normal():
    for gm, g0, cap in ((abelian(2), None, 3), (heisenberg(), None, 3), (symbol_235(), None, 4)):
        res = prolong_full(gm, g0, cap=cap)
        neg = {p: n for p, n in res.dims_by_degree.items() if p < 0}
        ubar = universal_fiber_dims(neg, [res.dims_by_degree[0]], cap)
        for ell in range(1, cap + 1):
            assert ubar[ell] >= res.dims_by_degree.get(ell, 0)


def test_bookkeeping_helpers():
    assert hom_dim({-1: 2}, {-1: 2, 0: 4}, 1) == 8
    assert cumulative_dims({-1: 2}, {0: 4, 1: 6}) == {0: 6, 1: 12}
