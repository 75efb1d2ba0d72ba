from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from gstruct.linalg import (Echelon, SpanSolver, determinant, inverse, mat_vec, nullspace,
                            nullspace_free, orthogonal_complement, rank, rref)

entries = st.integers(-3, 3).map(Fraction) | st.fractions(min_value=-2, max_value=2, max_denominator=4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    dense = [[draw(entries) for _ in range(n)] for _ in range(m)]
    return dense, n


def sparse(dense):
    return [{j: x for j, x in enumerate(row) if x} for row in dense]


@given(matrices())
def test_rank_matches_sympy(mn):
    dense, n = mn
    assert rank(sparse(dense)) == sympy.Matrix(dense).rank()


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(mn):
    dense, n = mn
    rows = sparse(dense)
    ker = nullspace(rows, n)
    assert len(ker) == n - rank(rows)
    for v in ker:
        assert not mat_vec(rows, v)
    assert rank(ker) == len(ker)


@given(matrices())
def test_nullspace_free_columns_are_unit(mn):
    dense, n = mn
    ker, free = nullspace_free(sparse(dense), n)
    for v, f in zip(ker, free):
        assert v[f] == 1
        assert all(v.get(g, 0) == 0 for g in free if g != f)


@given(matrices())
def test_rref_matches_sympy(mn):
    dense, n = mn
    rows, pivots = rref(sparse(dense))
    ref, piv = sympy.Matrix(dense).rref()
    assert pivots == list(piv)
    for i, row in enumerate(rows):
        assert [row.get(j, 0) for j in range(n)] == [Fraction(str(x)) for x in ref.row(i)]


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_determinant_and_inverse(dense):
    n = len(dense)
    d = determinant(dense)
    assert d == Fraction(str(sympy.Matrix(dense).det()))
    if d == 0:
        with pytest.raises(ZeroDivisionError):
            inverse(dense)
    else:
        inv = inverse(dense)
        for i in range(n):
            for j in range(n):
                assert sum(dense[i][k] * inv[k][j] for k in range(n)) == (1 if i == j else 0)


@given(matrices())
def test_orthogonal_complement_is_complement(mn):
    dense, n = mn
    rows = sparse(dense)
    comp = orthogonal_complement(rows, n)
    assert len(comp) + rank(rows) == n
    assert rank(rows + comp) == n
    for w in comp:
        for r in rows:
            assert sum(w.get(j, 0) * x for j, x in r.items()) == 0


def test_orthogonal_complement_with_gram():
    gram = [{0: Fraction(2), 1: Fraction(1)}, {0: Fraction(1), 1: Fraction(1)}]
    comp = orthogonal_complement([{0: Fraction(1)}], 2, gram)
    (w,) = comp
    # <e0, w>_G = 2 w0 + w1 = 0
    assert 2 * w.get(0, 0) + w.get(1, 0) == 0


@given(matrices())
def test_span_solver_round_trip(mn):
    dense, n = mn
    rows = sparse(dense)
    s = SpanSolver(rows)
    assert s.rank == rank(rows)
    combo = {}
    for i, r in enumerate(rows):
        for j, x in r.items():
            combo[j] = combo.get(j, 0) + (i + 1) * x
    combo = {j: x for j, x in combo.items() if x}
    c = s.coords(combo)
    assert c is not None
    rebuilt = {}
    for i, x in c.items():
        for j, y in rows[i].items():
            rebuilt[j] = rebuilt.get(j, 0) + x * y
    assert {j: x for j, x in rebuilt.items() if x} == combo


def test_span_solver_rejects_outside_vector():
    s = SpanSolver([{0: Fraction(1)}])
    assert s.coords({1: Fraction(1)}) is None


def test_echelon_contains():
    e = Echelon()
    assert e.add({0: Fraction(1), 1: Fraction(2)})
    assert not e.add({0: Fraction(2), 1: Fraction(4)})
    assert e.contains({0: Fraction(-1, 3), 1: Fraction(-2, 3)})
    assert e.rank == 1
