"""Exact sparse linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` with zero entries omitted.  Matrices are
lists of such row dicts.  Rank uses fraction-free elimination on integer rows
(each row is cleared of denominators and kept primitive), so no intermediate
fractions are formed.  Pivots are always the leading (first nonzero) column of
a row, which makes every result deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[int, Fraction]
Matrix = List[Vector]

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_add(a: Vector, b: Vector, scale=1) -> Vector:
    """Return ``a + scale * b`` as a new vector."""
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, ZERO) + scale * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vec_iadd(acc: Vector, b: Vector, scale=1) -> None:
    """In-place ``acc += scale * b``."""
    if not scale:
        return
    for k, v in b.items():
        s = acc.get(k, ZERO) + scale * v
        if s:
            acc[k] = s
        else:
            del acc[k]


def vec_scale(a: Vector, s) -> Vector:
    if not s:
        return {}
    return {k: s * v for k, v in a.items()}


def _to_int_row(row: Vector) -> Dict[int, int]:
    """Clear denominators and divide out the content of a rational row."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {k: int(Fraction(v) * den) for k, v in row.items() if v}
    return _primitive(out)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    lead = min(row)
    if row[lead] < 0:
        row = {k: -v for k, v in row.items()}
    return row


class Echelon:
    """Incrementally maintained row echelon form over the integers.

    Rows are inserted one at a time and reduced against the existing pivots in
    increasing pivot order.  A row that survives gets a new pivot at its leading
    column.
    """

    def __init__(self) -> None:
        self.pivots: Dict[int, Dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Vector) -> Dict[int, int]:
        r = _to_int_row(row)
        while r:
            lead = min(r)
            p = self.pivots.get(lead)
            if p is None:
                # jump to the next column that has a pivot
                cols = [c for c in r if c in self.pivots]
                if not cols:
                    return r
                lead = min(cols)
                p = self.pivots[lead]
            a, b = p[lead], r[lead]
            new = {k: a * v for k, v in r.items()}
            for k, v in p.items():
                s = new.get(k, 0) - b * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            r = _primitive(new) if new else {}
        return r

    def add(self, row: Vector) -> bool:
        """Insert ``row``; return True when it was independent."""
        r = self.reduce(row)
        if not r:
            return False
        self.pivots[min(r)] = r
        return True

    def contains(self, row: Vector) -> bool:
        return not self.reduce(row)


def rank(rows: Iterable[Vector]) -> int:
    """Rank of the matrix whose rows are ``rows``."""
    ech = Echelon()
    for r in rows:
        if r:
            ech.add(r)
    return ech.rank


def rref(rows: Iterable[Vector]) -> Tuple[List[Vector], List[int]]:
    """Reduced row echelon form with unit pivots.

    Returns the nonzero rows (sorted by pivot column) and the pivot columns.
    """
    ech = Echelon()
    for r in rows:
        if r:
            ech.add(r)
    cols = sorted(ech.pivots)
    red: Dict[int, Vector] = {}
    for c in reversed(cols):
        p = ech.pivots[c]
        row = {k: Fraction(v, p[c]) for k, v in p.items()}
        for c2 in cols:
            if c2 > c and c2 in row:
                f = row[c2]
                vec_iadd(row, red[c2], -f)
        red[c] = row
    return [red[c] for c in cols], cols


def nullspace(rows: Iterable[Vector], ncols: int) -> List[Vector]:
    """Basis of ``{x : M x = 0}`` for ``x`` indexed by ``range(ncols)``.

    One basis vector per free column ``f``; it has entry 1 at ``f`` and 0 at
    every other free column.  Vectors are listed by increasing free column.
    """
    return nullspace_free(rows, ncols)[0]


def nullspace_free(rows: Iterable[Vector], ncols: int) -> Tuple[List[Vector], List[int]]:
    """Like :func:`nullspace` but also return the free columns."""
    red, piv = rref(rows)
    pivset = set(piv)
    basis: List[Vector] = []
    free: List[int] = []
    for f in range(ncols):
        if f in pivset:
            continue
        v: Vector = {f: ONE}
        for row, c in zip(red, piv):
            x = row.get(f)
            if x:
                v[c] = -x
        basis.append(v)
        free.append(f)
    return basis, free


def transpose(rows: Sequence[Vector]) -> Dict[int, Vector]:
    out: Dict[int, Vector] = {}
    for i, r in enumerate(rows):
        for j, v in r.items():
            out.setdefault(j, {})[i] = v
    return out


def mat_vec(rows: Sequence[Vector], x: Vector) -> Vector:
    """Return ``M x`` as a vector indexed by row number."""
    out: Vector = {}
    for i, r in enumerate(rows):
        s = ZERO
        if len(r) < len(x):
            for j, v in r.items():
                y = x.get(j)
                if y:
                    s += v * y
        else:
            for j, y in x.items():
                v = r.get(j)
                if v:
                    s += v * y
        if s:
            out[i] = s
    return out


def mat_mul(a: Sequence[Vector], b: Sequence[Vector]) -> Matrix:
    """Sparse product ``A B`` with both given as row lists."""
    out: Matrix = []
    for r in a:
        acc: Vector = {}
        for j, v in r.items():
            if j < len(b):
                vec_iadd(acc, b[j], v)
        out.append(acc)
    return out


def orthogonal_complement(vectors: Sequence[Vector], ncols: int,
                          gram: Optional[Sequence[Vector]] = None) -> List[Vector]:
    """Basis of the complement ``{w : <w, v> = 0 for all v}``.

    With ``gram`` given the pairing is ``w^T G v``; otherwise it is the
    standard dot product in the given coordinates.
    """
    if gram is None:
        rows = list(vectors)
    else:
        rows = [mat_vec(gram, v) for v in vectors]
    return nullspace(rows, ncols)


class SpanSolver:
    """Express vectors in terms of a fixed list of generators.

    Generators are reduced to echelon form while tracking the combination of
    generators that produced each row.
    """

    def __init__(self, gens: Sequence[Vector]) -> None:
        self.gens = [dict(g) for g in gens]
        self.rows: Dict[int, Tuple[Vector, Vector]] = {}
        self.dependent: List[int] = []
        for i, g in enumerate(self.gens):
            res, comb = self._reduce(dict(g), {i: ONE})
            if res:
                c = min(res)
                f = res[c]
                self.rows[c] = (vec_scale(res, 1 / f), vec_scale(comb, 1 / f))
            else:
                self.dependent.append(i)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: Vector, comb: Vector) -> Tuple[Vector, Vector]:
        v = dict(v)
        while v:
            cols = [c for c in v if c in self.rows]
            if not cols:
                break
            c = min(cols)
            f = v[c]
            row, rc = self.rows[c]
            vec_iadd(v, row, -f)
            vec_iadd(comb, rc, -f)
        return v, comb

    def coords(self, v: Vector) -> Optional[Vector]:
        """Coefficients ``c`` with ``sum c_i gens[i] == v``, or None."""
        res, comb = self._reduce(dict(v), {})
        if res:
            return None
        return {i: -x for i, x in comb.items() if x}


def determinant(mat: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a small dense square matrix (Bareiss)."""
    n = len(mat)
    if n == 0:
        return ONE
    den = 1
    for r in mat:
        for v in r:
            den = lcm(den, Fraction(v).denominator)
    m = [[int(Fraction(v) * den) for v in r] for r in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return Fraction(sign * m[n - 1][n - 1], den ** n)


def inverse(mat: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Inverse of a small dense matrix; raises ZeroDivisionError if singular."""
    n = len(mat)
    aug = [[Fraction(v) for v in mat[i]] + [ONE if i == j else ZERO for j in range(n)]
           for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]
