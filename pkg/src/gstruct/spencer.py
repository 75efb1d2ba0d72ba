"""Generalized Spencer complex ``Hom(L^q g_-, g)_r`` and its cohomology.

A basis cochain is a pair ``(I, t)``: a strictly increasing tuple ``I`` of
global indices of negative basis vectors and a target basis vector ``t`` whose
degree equals the sum of the source degrees plus ``r``.  The coboundary is::

    dc(v_1..v_{q+1}) = sum_i (-1)^(i+1) [v_i, c(..^v_i..)]
                     + sum_{i<j} (-1)^(i+j) c([v_i, v_j], ..^v_i..^v_j..)
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import TruncationError, ValidationError
from .glacore import GradedLieAlgebra
from .linalg import (ONE, Echelon, Matrix, SpanSolver, Vector, mat_mul, mat_vec,
                     orthogonal_complement, rank, transpose, vec_iadd)

Key = Tuple[Tuple[int, ...], int]


@dataclass
class CochainBasis:
    """Indexed basis of ``Hom(L^q g_-, g)_r``."""

    q: int
    r: int
    keys: List[Key]
    position: Dict[Key, int]

    def __len__(self) -> int:
        return len(self.keys)


@dataclass
class Cochain:
    """Element of ``Hom(L^q g_-, g)_r`` as coefficients on a cochain basis."""

    q: int
    r: int
    coefficients: Dict[Key, object] = field(default_factory=dict)

    def as_map(self) -> Dict[Tuple[int, ...], Vector]:
        out: Dict[Tuple[int, ...], Vector] = {}
        for (src, t), c in self.coefficients.items():
            if c:
                out.setdefault(src, {})[t] = c
        return out


def _needed_top(g: GradedLieAlgebra, q: int, r: int) -> Optional[int]:
    """Largest target degree a ``(q, r)`` cochain can have, or None if the
    space is empty for lack of sources."""
    negdeg = sorted((g.deg[u] for u in g.space.negative()), reverse=True)
    if q > len(negdeg):
        return None
    return sum(negdeg[:q]) + r


def cochain_basis(g: GradedLieAlgebra, q: int, r: int) -> CochainBasis:
    """Enumerate basis cochains: wedge multi-indices in lexicographic order,
    then targets in basis order."""
    if q < 0:
        raise ValidationError("form degree must be nonnegative")
    cached = g.cache.get(("basis", q, r))
    if cached is not None:
        return cached
    top = _needed_top(g, q, r)
    if top is not None and g.order is not None and top > g.order:
        raise TruncationError(
            f"Hom(L^{q} g_-, g)_{r} needs degree {top} but the algebra is "
            f"truncated at order {g.order}")
    sp = g.space
    neg = sp.negative()
    keys: List[Key] = []
    for src in combinations(neg, q):
        td = sum(sp.deg[u] for u in src) + r
        for t in sp.indices(td):
            keys.append((src, t))
    cb = CochainBasis(q, r, keys, {k: i for i, k in enumerate(keys)})
    g.cache[("basis", q, r)] = cb
    return cb


def _bracket_preimages(g: GradedLieAlgebra) -> Dict[int, List[Tuple[int, int, object]]]:
    """For each negative basis vector ``m``, the pairs ``a < b`` of negative
    basis vectors with ``[a, b]`` having an ``e_m`` component."""
    cached = g.cache.get("preimages")
    if cached is not None:
        return cached
    out: Dict[int, List[Tuple[int, int, object]]] = {}
    neg = g.space.negative()
    for a, b in combinations(neg, 2):
        for m, c in g.br(a, b).items():
            out.setdefault(m, []).append((a, b, c))
    g.cache["preimages"] = out
    return out


def coboundary_matrix(g: GradedLieAlgebra, q: int, r: int) -> Matrix:
    """Matrix of ``d: Hom(L^q g_-, g)_r -> Hom(L^{q+1} g_-, g)_r``.

    Rows follow ``cochain_basis(g, q+1, r)`` and columns follow
    ``cochain_basis(g, q, r)``.
    """
    cached = g.cache.get(("d", q, r))
    if cached is not None:
        return cached
    src = cochain_basis(g, q, r)
    dst = cochain_basis(g, q + 1, r)
    neg = g.space.negative()
    pre = _bracket_preimages(g)
    rows: Matrix = [dict() for _ in range(len(dst))]
    for col, (I, t) in enumerate(src.keys):
        Iset = set(I)
        # first sum: J = I + {v}
        for v in neg:
            if v in Iset:
                continue
            J = tuple(sorted(I + (v,)))
            i = J.index(v) + 1
            sgn = 1 if i % 2 == 1 else -1
            for w, c in g.br(v, t).items():
                row = dst.position.get((J, w))
                if row is None:
                    continue
                vec_iadd(rows[row], {col: sgn * c})
        # second sum: J = (I - {m}) + {a, b} with [a, b] containing e_m
        for s, m in enumerate(I):
            K = I[:s] + I[s + 1:]
            Kset = set(K)
            sm = -1 if s % 2 else 1
            for a, b, beta in pre.get(m, ()):
                if a in Kset or b in Kset:
                    continue
                J = tuple(sorted(K + (a, b)))
                i = J.index(a) + 1
                j = J.index(b) + 1
                sgn = sm * (1 if (i + j) % 2 == 0 else -1)
                row = dst.position.get((J, t))
                if row is None:
                    continue
                vec_iadd(rows[row], {col: sgn * beta})
    g.cache[("d", q, r)] = rows
    return rows


def coboundary_rank(g: GradedLieAlgebra, q: int, r: int) -> int:
    key = ("rank", q, r)
    if key not in g.cache:
        if q < 0 or _needed_top(g, q, r) is None:
            g.cache[key] = 0
        else:
            g.cache[key] = rank(coboundary_matrix(g, q, r))
    return g.cache[key]


def apply_coboundary(g: GradedLieAlgebra, c: Cochain) -> Cochain:
    """Apply ``d`` to a cochain given by keys."""
    src = cochain_basis(g, c.q, c.r)
    dst = cochain_basis(g, c.q + 1, c.r)
    x = {}
    for k, v in c.coefficients.items():
        if v:
            if k not in src.position:
                raise ValidationError(f"cochain entry {k} has the wrong degree")
            x[src.position[k]] = v
    y = mat_vec(coboundary_matrix(g, c.q, c.r), x)
    return Cochain(c.q + 1, c.r, {dst.keys[i]: v for i, v in y.items()})


def cohomology_dim(g: GradedLieAlgebra, q: int, r: int) -> int:
    """``dim ker d^q_r - rank d^{q-1}_r``."""
    if _needed_top(g, q, r) is None:
        return 0
    if q >= 1:
        cochain_basis(g, q - 1, r)  # raises if degrees are missing
    n = len(cochain_basis(g, q, r))
    if n == 0:
        return 0
    return n - coboundary_rank(g, q, r) - (coboundary_rank(g, q - 1, r) if q else 0)


@dataclass
class SpencerSlice:
    """All coboundaries of a fixed degree ``r`` with cached ranks."""

    r: int
    matrices: Dict[int, Matrix]
    ranks: Dict[int, int]
    dims: Dict[int, int]

    def cohomology(self, q: int) -> int:
        return self.dims.get(q, 0) - self.ranks.get(q, 0) - self.ranks.get(q - 1, 0)

    def check_square_zero(self) -> bool:
        for q in self.matrices:
            if q + 1 in self.matrices:
                prod = mat_mul(self.matrices[q + 1], self.matrices[q])
                if any(prod):
                    return False
        return True


def spencer_slice(g: GradedLieAlgebra, r: int, q_max: Optional[int] = None) -> SpencerSlice:
    n = len(g.space.negative())
    if q_max is None:
        q_max = n
    mats, ranks, dims = {}, {}, {}
    for q in range(0, q_max + 1):
        dims[q] = len(cochain_basis(g, q, r))
        if q + 1 <= n:
            mats[q] = coboundary_matrix(g, q, r)
            ranks[q] = coboundary_rank(g, q, r)
    return SpencerSlice(r, mats, ranks, dims)


# ---------------------------------------------------------------------------
# complements

@dataclass
class ComplementChoice:
    """Bases of ``W1[l]`` (in ``Hom(g_-, g)_l``) and ``W2[l+1]`` (in
    ``Hom(L^2 g_-, g)_{l+1}``), as vectors in cochain basis coordinates."""

    W1: Dict[int, List[Vector]] = field(default_factory=dict)
    W2: Dict[int, List[Vector]] = field(default_factory=dict)
    label: str = "orthogonal (canonical cochain basis orthonormal)"


def _image_vectors(g: GradedLieAlgebra, q: int, r: int) -> List[Vector]:
    cols = transpose(coboundary_matrix(g, q, r))
    n = len(cochain_basis(g, q, r))
    return [cols.get(j, {}) for j in range(n)]


def complement_select(g: GradedLieAlgebra, ells: Sequence[int],
                      gram1: Optional[Mapping[int, Sequence[Vector]]] = None,
                      gram2: Optional[Mapping[int, Sequence[Vector]]] = None
                      ) -> ComplementChoice:
    """Orthogonal complements of ``d g_l`` and ``d Hom(g_-, g)_{l+1}``.

    ``gram1[l]`` and ``gram2[l+1]`` optionally replace the standard inner
    product by a Gram matrix (given as row vectors).
    """
    choice = ComplementChoice()
    if gram1 or gram2:
        choice.label = "orthogonal for a user Gram matrix"
    for ell in ells:
        n1 = len(cochain_basis(g, 1, ell))
        img = _image_vectors(g, 0, ell)
        choice.W1[ell] = orthogonal_complement(img, n1, (gram1 or {}).get(ell))
        n2 = len(cochain_basis(g, 2, ell + 1))
        img2 = _image_vectors(g, 1, ell + 1)
        choice.W2[ell + 1] = orthogonal_complement(img2, n2, (gram2 or {}).get(ell + 1))
    return choice


@dataclass
class ComplementReport:
    ok: bool
    failures: List[Dict[str, object]]
    checked: List[Tuple[str, int]]


def _direct_sum_failure(w: Sequence[Vector], img: Sequence[Vector], total: int):
    wr = rank(w)
    if wr != len(w):
        return "complement basis is linearly dependent"
    ir = rank(img)
    if wr + ir != total:
        return f"dimension mismatch: {wr} + {ir} != {total}"
    if rank(list(w) + list(img)) != total:
        return "complement meets the image"
    return None


def complement_verify(g: GradedLieAlgebra, W: ComplementChoice) -> ComplementReport:
    failures = []
    checked = []
    for ell, vecs in sorted(W.W1.items()):
        checked.append(("W1", ell))
        why = _direct_sum_failure(vecs, _image_vectors(g, 0, ell),
                                  len(cochain_basis(g, 1, ell)))
        if why:
            failures.append({"space": "W1", "degree": ell, "reason": why})
    for ell, vecs in sorted(W.W2.items()):
        checked.append(("W2", ell))
        why = _direct_sum_failure(vecs, _image_vectors(g, 1, ell),
                                  len(cochain_basis(g, 2, ell)))
        if why:
            failures.append({"space": "W2", "degree": ell, "reason": why})
    return ComplementReport(not failures, failures, checked)


# ---------------------------------------------------------------------------
# condition (C)

def _eval2(g: GradedLieAlgebra, phi: Mapping[Tuple[int, ...], Vector],
           x: Vector, y: Vector) -> Vector:
    out: Vector = {}
    for a, ca in x.items():
        for b, cb in y.items():
            if a == b:
                continue
            key, s = ((a, b), 1) if a < b else ((b, a), -1)
            img = phi.get(key)
            if img:
                vec_iadd(out, img, s * ca * cb)
    return out


def rho2(g: GradedLieAlgebra, A: int, c: Cochain) -> Cochain:
    """``(rho(A) phi)(X, Y) = [A, phi(X,Y)] - phi([A,X],Y) - phi(X,[A,Y])``
    for a degree-0 basis element ``A``."""
    if g.deg[A] != 0:
        raise ValidationError("rho2 is only defined here for degree-0 elements")
    phi = c.as_map()
    out: Dict[Key, object] = {}
    cb = cochain_basis(g, 2, c.r)
    for (x, y), _ in _pairs(cb):
        val: Vector = {}
        img = phi.get((x, y))
        if img:
            vec_iadd(val, g.bracket({A: ONE}, img))
        vec_iadd(val, _eval2(g, phi, g.br(A, x), {y: ONE}), -1)
        vec_iadd(val, _eval2(g, phi, {x: ONE}, g.br(A, y)), -1)
        for t, v in val.items():
            out[((x, y), t)] = v
    return Cochain(2, c.r, out)


def _pairs(cb: CochainBasis):
    seen = []
    last = None
    for src, t in cb.keys:
        if src != last:
            seen.append((src, None))
            last = src
    return seen


@dataclass
class ConditionCReport:
    invariant_under_g0: bool
    witnesses: List[Dict[str, object]]
    degrees: List[int]
    unchecked: str = ("action of strictly positive degrees is not certified; "
                      "only the degree-0 part was checked")


def condition_C_check(g: GradedLieAlgebra, W2: Mapping[int, Sequence[Vector]]
                      ) -> ConditionCReport:
    """Check ``rho(A) W2_i`` is contained in ``W2_i`` for every basis ``A`` of
    ``g_0`` and every degree ``i`` present in ``W2``."""
    witnesses = []
    zero = list(g.space.indices(0))
    for i, vecs in sorted(W2.items()):
        cb = cochain_basis(g, 2, i)
        solver = SpanSolver(vecs)
        for a in zero:
            for j, w in enumerate(vecs):
                c = Cochain(2, i, {cb.keys[k]: v for k, v in w.items()})
                img = rho2(g, a, c)
                vec = {cb.position[k]: v for k, v in img.coefficients.items() if v}
                if solver.coords(vec) is None:
                    witnesses.append({"degree": i, "g0_element": list(g.space.basis[a]),
                                      "w_index": j})
                    break
    return ConditionCReport(not witnesses, witnesses, sorted(W2))


# ---------------------------------------------------------------------------
# index sets

@dataclass
class IndexSets:
    I1: List[int]
    I2: List[int]
    I1_intro: List[int]
    I2_intro: List[int]
    r0: Optional[int]
    h1: Dict[int, int]
    h2: Dict[int, int]
    cap: int
    complete: bool
    convention: str = "both"

    def sets(self, convention: str) -> Tuple[List[int], List[int]]:
        if convention == "intro":
            return self.I1_intro, self.I2_intro
        return self.I1, self.I2


def scan_bound(g: GradedLieAlgebra) -> Optional[int]:
    """Degree beyond which all 1- and 2-cochains vanish (complete algebras)."""
    if g.order is not None:
        return None
    return g.top + 2 * g.depth


def invariant_index_sets(g: GradedLieAlgebra, cap: int,
                         convention: str = "both") -> IndexSets:
    """Scan ``H^1_r`` and ``H^2_r`` for ``-1 <= r <= cap``.

    Two labelled conventions are reported: ``I1 = {i >= 0 : H^1_{i-1} != 0}``,
    ``I2 = {i >= 0 : H^2_i != 0}`` and ``I1_intro = {i > 0 : H^1_i != 0}``,
    ``I2_intro = {i > 0 : H^2_i != 0}``.
    """
    if convention not in ("intro", "section5", "both"):
        raise ValidationError(f"unknown convention {convention!r}")
    if g.order is not None and g.order < cap:
        raise TruncationError(f"need the algebra through degree {cap}, have {g.order}")
    h1 = {r: cohomology_dim(g, 1, r) for r in range(-1, cap + 1)}
    h2 = {r: cohomology_dim(g, 2, r) for r in range(-1, cap + 1)}
    I1 = [i for i in range(0, cap + 1) if h1[i - 1]]
    I2 = [i for i in range(0, cap + 1) if h2[i]]
    I1i = [i for i in range(1, cap + 1) if h1[i]]
    I2i = [i for i in range(1, cap + 1) if h2[i]]
    nz = [r for r in range(-1, cap + 1) if h1[r] or h2[r]]
    bound = scan_bound(g)
    complete = bound is not None and cap >= bound
    return IndexSets(I1, I2, I1i, I2i, max(nz) if nz else None, h1, h2, cap,
                     complete, convention)


def quasi_involutive(g: GradedLieAlgebra, ell: int, cap: Optional[int] = None) -> bool:
    """``H^1_r = 0`` and ``H^2_{r+1} = 0`` for all ``r >= ell`` in range.

    For complete algebras the range is exhaustive; otherwise it ends at
    ``cap`` (default: the truncation order).
    """
    bound = scan_bound(g)
    if bound is None:
        last = g.order if cap is None else min(cap, g.order)
        return all(cohomology_dim(g, 1, r) == 0 for r in range(ell, last + 1)) and \
            all(cohomology_dim(g, 2, r + 1) == 0 for r in range(ell, last))
    return all(cohomology_dim(g, 1, r) == 0 and cohomology_dim(g, 2, r + 1) == 0
               for r in range(ell, bound + 1))
