"""Constant structure functions on truncations of a graded Lie algebra.

A structure function ``gamma`` is an alternating bilinear map on
``E = g_- + g_0 + ... + g_N`` with values in ``E``.  A component sending
``g_a x g_b`` to ``g_c`` has homogeneous degree ``r = c - a - b`` and modified
degree ``s = c - min(a,-1) - min(b,-1)``.  Restrictions to pairs of negative
arguments, mixed pairs and pairs of nonnegative arguments are called kappa,
tau and sigma.

For constant ``gamma`` the Bianchi identity is the cyclic sum
``gamma(gamma(X,Y),Z) + ... = 0``.  The four fundamental identities are its
graded components split by how many arguments are nonnegative; they are
assembled here term by term, with the summation bounds that the admissibility
constraints make sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import TruncationError, ValidationError
from .glacore import (GradedLieAlgebra, GradedVectorSpace, check_transitivity,
                      jacobi_residual)
from .linalg import ONE, ZERO, Vector, vec_iadd
from .spencer import Cochain, apply_coboundary

Triple = Tuple[int, int, int]

KAPPA, TAU, SIGMA = "kappa", "tau", "sigma"


@dataclass(frozen=True)
class BiGrade:
    r: int
    s: int


def bigrade(a: int, b: int, c: int) -> BiGrade:
    return BiGrade(c - a - b, c - min(a, -1) - min(b, -1))


def kind_of(a: int, b: int) -> str:
    if a < 0 and b < 0:
        return KAPPA
    if a >= 0 and b >= 0:
        return SIGMA
    return TAU


class ConstantStructureFunction:
    """Alternating ``gamma`` on the basis of ``base``.

    ``table`` maps ``(u, v)`` with ``u < v`` to ``gamma(e_u, e_v)``.  The
    model is *complete* when ``base`` is complete, unless overridden; only
    then are residual components near the truncation trusted.
    """

    def __init__(self, base: GradedLieAlgebra,
                 table: Optional[Mapping[Tuple[int, int], Vector]] = None,
                 complete: Optional[bool] = None, name: str = "") -> None:
        self.base = base
        self.name = name or base.name
        self.complete = base.complete if complete is None else complete
        self.table: Dict[Tuple[int, int], Vector] = {}
        for (u, v), out in (table or {}).items():
            self.set(u, v, out)
        self._full: Optional[List[List[Vector]]] = None

    @property
    def N(self) -> int:
        return self.base.top

    @property
    def deg(self) -> List[int]:
        return self.base.deg

    @property
    def dim(self) -> int:
        return self.base.dim

    @classmethod
    def from_bracket(cls, base: GradedLieAlgebra, **kw) -> "ConstantStructureFunction":
        return cls(base, {k: dict(v) for k, v in base.table.items()}, **kw)

    def copy(self) -> "ConstantStructureFunction":
        return ConstantStructureFunction(self.base, self.table, self.complete, self.name)

    def set(self, u: int, v: int, out: Vector) -> None:
        if u == v:
            if any(out.values()):
                raise ValidationError("gamma(e, e) must vanish")
            return
        sign = 1
        if u > v:
            u, v, sign = v, u, -1
        clean = {w: sign * Fraction(c) for w, c in out.items() if c}
        if clean:
            self.table[(u, v)] = clean
        else:
            self.table.pop((u, v), None)
        self._full = None

    def add(self, u: int, v: int, w: int, c) -> None:
        """``gamma(e_u, e_v) += c e_w`` (and the alternating counterpart)."""
        if u > v:
            u, v, c = v, u, -c
        cur = dict(self.table.get((u, v), {}))
        vec_iadd(cur, {w: Fraction(c)})
        self.set(u, v, cur)

    def gamma(self, u: int, v: int) -> Vector:
        if u < v:
            return self.table.get((u, v), {})
        if u > v:
            out = self.table.get((v, u))
            return {w: -c for w, c in out.items()} if out else {}
        return {}

    def full(self) -> List[List[Vector]]:
        """Dense ``n x n`` table of ``gamma`` values (cached)."""
        if self._full is None:
            n = self.dim
            t: List[List[Vector]] = [[{} for _ in range(n)] for _ in range(n)]
            for (u, v), out in self.table.items():
                t[u][v] = out
                t[v][u] = {w: -c for w, c in out.items()}
            self._full = t
        return self._full

    def apply(self, x: Vector, y: Vector) -> Vector:
        G = self.full()
        out: Vector = {}
        for u, a in x.items():
            row = G[u]
            for v, b in y.items():
                r = row[v]
                if r:
                    vec_iadd(out, r, a * b)
        return out

    def shift_component(self, u: int, v: int, shift: int) -> Vector:
        """Component of ``gamma(e_u, e_v)`` of homogeneous degree ``shift``."""
        t = self.deg[u] + self.deg[v] + shift
        return {w: c for w, c in self.gamma(u, v).items() if self.deg[w] == t}

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstantStructureFunction) and \
            self.base is other.base and self.table == other.table


# ---------------------------------------------------------------------------
# decomposition

@dataclass
class Decomposition:
    kappa: Dict[Tuple[int, int], Vector]
    tau: Dict[Tuple[int, int], Vector]
    sigma: Dict[Tuple[int, int], Vector]
    slices: Dict[Tuple[str, int, int], Dict[Tuple[int, int], Vector]]

    def reassemble(self) -> Dict[Tuple[int, int], Vector]:
        out: Dict[Tuple[int, int], Vector] = {}
        for part in (self.kappa, self.tau, self.sigma):
            for k, v in part.items():
                vec_iadd(out.setdefault(k, {}), v)
        return {k: v for k, v in out.items() if v}

    def reassemble_slices(self) -> Dict[Tuple[int, int], Vector]:
        out: Dict[Tuple[int, int], Vector] = {}
        for part in self.slices.values():
            for k, v in part.items():
                vec_iadd(out.setdefault(k, {}), v)
        return {k: v for k, v in out.items() if v}


def decompose_gamma(gam: ConstantStructureFunction) -> Decomposition:
    """Split ``gamma`` into kappa, tau, sigma and bigraded slices keyed by
    ``(kind, r, s)``."""
    deg = gam.deg
    parts = {KAPPA: {}, TAU: {}, SIGMA: {}}
    slices: Dict[Tuple[str, int, int], Dict[Tuple[int, int], Vector]] = {}
    for (u, v), out in gam.table.items():
        kd = kind_of(deg[u], deg[v])
        parts[kd][(u, v)] = dict(out)
        for w, c in out.items():
            bg = bigrade(deg[u], deg[v], deg[w])
            slices.setdefault((kd, bg.r, bg.s), {}).setdefault((u, v), {})[w] = c
    return Decomposition(parts[KAPPA], parts[TAU], parts[SIGMA], slices)


# ---------------------------------------------------------------------------
# admissibility

@dataclass
class AdmissibilityReport:
    ok: bool
    violations: List[Dict[str, object]]


def check_admissible(gam: ConstantStructureFunction, normal: bool = True) -> AdmissibilityReport:
    """Check the admissibility constraints.

    * kappa and tau have no components of negative homogeneous degree;
    * their degree-0 components equal the bracket of the base algebra;
    * ``gamma(g_a, g_b)`` has no component in ``g_c`` with
      ``c < max(a, b) - 1`` for ``a, b >= 0``;
    * with ``normal`` also none with ``c = max(a, b) - 1``.
    """
    base = gam.base
    deg = gam.deg
    basis = base.space.basis
    viol: List[Dict[str, object]] = []

    def note(name, u, v, w, c):
        viol.append({"constraint": name, "degrees": [deg[u], deg[v], deg[w] if w is not None else None],
                     "pair": [list(basis[u]), list(basis[v])],
                     "target": list(basis[w]) if w is not None else None,
                     "value": c})

    neg = base.space.negative()
    pairs = set(gam.table)
    for u in range(gam.dim):
        for v in range(u + 1, gam.dim):
            if deg[u] < 0 and base.defined(deg[u], deg[v]):
                pairs.add((u, v))
    for u, v in sorted(pairs):
        a, b = deg[u], deg[v]
        out = gam.gamma(u, v)
        kd = kind_of(a, b)
        if kd in (KAPPA, TAU):
            tag = "I" if kd == KAPPA else "II"
            diff = {w: c for w, c in out.items() if deg[w] == a + b}
            vec_iadd(diff, base.br(u, v), -1)
            for w, c in sorted(out.items()):
                if deg[w] < a + b:
                    note(f"{tag}(d<0)", u, v, w, str(c))
            for w, c in sorted(diff.items()):
                note(f"{tag}(0)", u, v, w, str(c))
        else:
            m = max(a, b)
            for w, c in sorted(out.items()):
                if deg[w] < m - 1:
                    note("III(c<max-1)", u, v, w, str(c))
                elif normal and deg[w] == m - 1:
                    note("normality", u, v, w, str(c))
    return AdmissibilityReport(not viol, viol)


# ---------------------------------------------------------------------------
# Bianchi

def safe_output(gam: ConstantStructureFunction, degs: Sequence[int], t: int) -> bool:
    """Whether a residual component of output degree ``t`` for arguments of
    the given degrees can be trusted on a truncated model."""
    if gam.complete:
        return True
    return t <= gam.N + min(min(degs), -1)


@dataclass
class Residual:
    """Sparse trilinear residual: basis triple -> vector (trusted part)."""

    entries: Dict[Triple, Vector] = field(default_factory=dict)
    shadow: int = 0

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def witness(self, gam: ConstantStructureFunction):
        if not self.entries:
            return None
        t = min(self.entries)
        b = gam.base.space.basis
        return {"arguments": [list(b[i]) for i in t],
                "value": {f"{b[w][0]},{b[w][1]}": str(c)
                          for w, c in sorted(self.entries[t].items())}}


def _cyclic(gam: ConstantStructureFunction, u: int, v: int, w: int) -> Vector:
    G = gam.full()
    out: Vector = {}
    for a, b, c in ((u, v, w), (v, w, u), (w, u, v)):
        for s, x in G[a][b].items():
            r = G[s][c]
            if r:
                vec_iadd(out, r, x)
    return out


def _file(gam, res: Residual, triple: Triple, vec: Vector, keep=None) -> None:
    deg = gam.deg
    degs = [deg[i] for i in triple]
    good: Vector = {}
    for w, c in vec.items():
        if keep is not None and not keep(deg[w]):
            continue
        if safe_output(gam, degs, deg[w]):
            good[w] = c
        else:
            res.shadow += 1
    if good:
        res.entries[triple] = good


def bianchi_residual(gam: ConstantStructureFunction) -> Residual:
    """Cyclic sum of ``gamma(gamma(X,Y),Z)`` on all basis triples."""
    res = Residual()
    for tr in combinations(range(gam.dim), 3):
        v = _cyclic(gam, *tr)
        if v:
            _file(gam, res, tr, v)
    return res


# ---------------------------------------------------------------------------
# fundamental identities

class _Engine:
    """Shift-filtered compositions of gamma and the base bracket."""

    def __init__(self, gam: ConstantStructureFunction) -> None:
        self.gam = gam
        self.G = gam.full()
        self.deg = gam.deg
        self.base = gam.base

    def g(self, x: Vector, y: Vector, ok=None) -> Vector:
        """``gamma(x, y)`` keeping components whose homogeneous shift passes
        ``ok`` (relative to the argument basis degrees)."""
        G, deg = self.G, self.deg
        out: Vector = {}
        for u, a in x.items():
            for v, b in y.items():
                r = G[u][v]
                if not r:
                    continue
                if ok is None:
                    vec_iadd(out, r, a * b)
                else:
                    base = deg[u] + deg[v]
                    for w, c in r.items():
                        if ok(deg[w] - base):
                            s = out.get(w, ZERO) + a * b * c
                            if s:
                                out[w] = s
                            else:
                                out.pop(w, None)
        return out

    def br(self, x: Vector, y: Vector) -> Vector:
        return self.base.bracket(x, y)

    def comp(self, inner_args, outer: int, inner_ok, outer_ok, outer_left=False) -> Vector:
        """Sum over components ``e_s`` of ``gamma(inner_args)`` with inner
        shift ``d2`` passing ``inner_ok(d2)``, of ``gamma(e_s, outer)`` (or
        ``gamma(outer, e_s)``) with shift ``d1`` passing ``outer_ok(d1)``."""
        u, v = inner_args
        deg = self.deg
        base = deg[u] + deg[v]
        out: Vector = {}
        for s, c in self.G[u][v].items():
            if not inner_ok(deg[s] - base):
                continue
            r = self.G[outer][s] if outer_left else self.G[s][outer]
            b2 = deg[s] + deg[outer]
            for w, e in r.items():
                if outer_ok(deg[w] - b2):
                    x = out.get(w, ZERO) + c * e
                    if x:
                        out[w] = x
                    else:
                        out.pop(w, None)
        return out

    def neg(self, x: Vector) -> Vector:
        return {w: c for w, c in x.items() if self.deg[w] < 0}

    def pos(self, x: Vector) -> Vector:
        return {w: c for w, c in x.items() if self.deg[w] >= 0}


def _acc(acc: Vector, v: Vector, s=1) -> None:
    vec_iadd(acc, v, s)


def identity1(E: _Engine, X: int, Y: int, Z: int, bounded: bool = True) -> Vector:
    """LHS - RHS for the kappa identity on negative ``X, Y, Z``.

    ``d kappa_k(X,Y,Z) = S sum_{d1+d2=k, d1,d2>0} [kappa_d1(kappa_d2(X,Y)_-, Z)
    + tau_d1(kappa_d2(X,Y)_+, Z)]``.
    """
    nn = lambda d: d >= 0
    out: Vector = {}
    for a, b, c in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
        # d kappa: [a, kappa(b, c)] - kappa([a, b], c)
        _acc(out, E.br({a: ONE}, E.g({b: ONE}, {c: ONE}, nn)))
        _acc(out, E.g(E.br({a: ONE}, {b: ONE}), {c: ONE}, nn), -1)
        if bounded:
            t = E.comp((a, b), c, lambda d: d > 0, lambda d: d > 0)
        else:
            t = E.comp((a, b), c, lambda d: d != 0, lambda d: d != 0)
        _acc(out, t, -1)
    return out


def identity2(E: _Engine, X: int, Y: int, A: int, bounded: bool = True) -> Vector:
    """LHS - RHS for the tau identity, ``X, Y`` negative and ``A`` nonnegative.

    LHS is ``d(tau_d(A, .))(X, Y)``; RHS is
    ``rho(A) kappa_d(X,Y) - A_XY tau_d([A,X]_+, Y) + [kappa_d(X,Y)_+, A]
    - sigma_0(kappa_d(X,Y)_+, A) - sum gamma_d1(kappa_d2(X,Y), A)
    - A_XY sum gamma_d1(tau_d2(A,X), Y)``.
    """
    nn = lambda d: d >= 0
    a = E.deg[A]
    eA, eX, eY = {A: ONE}, {X: ONE}, {Y: ONE}
    c = lambda V: E.g(eA, V, nn)  # tau_d(A, V) for all d >= 0 at once
    lhs: Vector = {}
    _acc(lhs, E.br(eX, c(eY)))
    _acc(lhs, E.br(eY, c(eX)), -1)
    _acc(lhs, c(E.br(eX, eY)), -1)

    kXY = E.g(eX, eY, nn)
    AX, AY = E.br(eA, eX), E.br(eA, eY)
    rhs: Vector = {}
    # rho(A) kappa_d(X, Y)
    _acc(rhs, E.br(eA, kXY))
    _acc(rhs, E.g(E.neg(AX), eY, nn), -1)
    _acc(rhs, E.g(eX, E.neg(AY), nn), -1)
    # - A_XY tau_d([A,X]_+, Y)
    _acc(rhs, E.g(E.pos(AX), eY, nn), -1)
    _acc(rhs, E.g(E.pos(AY), eX, nn), 1)
    # + [kappa_d(X,Y)_+, A] - sigma_0(kappa_d(X,Y)_+, A)
    kp = E.pos(kXY)
    _acc(rhs, E.br(kp, eA))
    _acc(rhs, E.g(kp, eA, lambda d: d == 0), -1)
    if bounded:
        s5 = E.comp((X, Y), A, lambda d2: d2 > 0, lambda d1: d1 != 0 and d1 >= -a)
        s6 = E.comp((A, X), Y, lambda d2: d2 > 0, lambda d1: d1 > 0)
        s6b = E.comp((A, Y), X, lambda d2: d2 > 0, lambda d1: d1 > 0)
    else:
        s5 = E.comp((X, Y), A, lambda d2: d2 != 0, lambda d1: d1 != 0)
        s6 = E.comp((A, X), Y, lambda d2: d2 != 0, lambda d1: d1 != 0)
        s6b = E.comp((A, Y), X, lambda d2: d2 != 0, lambda d1: d1 != 0)
    _acc(rhs, s5, -1)
    _acc(rhs, s6, -1)
    _acc(rhs, s6b, 1)
    _acc(lhs, rhs, -1)
    return lhs


def identity3(E: _Engine, X: int, A: int, B: int, bounded: bool = True) -> Vector:
    """LHS - RHS for the sigma identity with ``X`` negative, ``A, B >= 0``.

    ``[sigma_d(A,B), X] = A_AB sum_{0 <= d2 <= d+a} gamma_d1(A, gamma_d2(B,X))
    + sum_{0 < delta1 <= d + min(a,b)} gamma_delta1(X, sigma_delta2(A,B))``.
    """
    a, b = E.deg[A], E.deg[B]
    lhs = E.br(E.G[A][B], {X: ONE})
    if bounded:
        t1 = E.comp((B, X), A, lambda d2: d2 >= 0, lambda d1: d1 >= -a, outer_left=True)
        t2 = E.comp((A, X), B, lambda d2: d2 >= 0, lambda d1: d1 >= -b, outer_left=True)
        m = min(a, b)
        t3 = E.comp((A, B), X, lambda d2: d2 >= -m, lambda d1: d1 > 0, outer_left=True)
    else:
        every = lambda d: True
        t1 = E.comp((B, X), A, every, every, outer_left=True)
        t2 = E.comp((A, X), B, every, every, outer_left=True)
        t3 = E.comp((A, B), X, every, lambda d1: d1 != 0, outer_left=True)
    _acc(lhs, t1, -1)
    _acc(lhs, t2, 1)
    _acc(lhs, t3, -1)
    return lhs


def identity4(E: _Engine, A: int, B: int, C: int, bounded: bool = True) -> Vector:
    """Cyclic sum ``S_ABC sum_{-min(a,b) <= d2 <= d+c} sigma_d1(sigma_d2(A,B), C)``."""
    out: Vector = {}
    for p, q, r in ((A, B, C), (B, C, A), (C, A, B)):
        if bounded:
            m, cr = min(E.deg[p], E.deg[q]), E.deg[r]
            t = E.comp((p, q), r, lambda d2, m=m: d2 >= -m, lambda d1, cr=cr: d1 >= -cr)
        else:
            t = E.comp((p, q), r, lambda d: True, lambda d: True)
        _acc(out, t)
    return out


@dataclass
class FundamentalResiduals:
    """Per identity (1..4): basis triple -> trusted residual vector."""

    by_identity: Dict[int, Residual]
    bounded: bool

    @property
    def all_zero(self) -> bool:
        return all(r.is_zero for r in self.by_identity.values())

    @property
    def shadow(self) -> int:
        return sum(r.shadow for r in self.by_identity.values())

    def components(self, gam: ConstantStructureFunction):
        """Yield ``(identity, argument degrees, level k, d, t, triple, value)``."""
        deg = gam.deg
        for i, res in sorted(self.by_identity.items()):
            for tr, vec in sorted(res.entries.items()):
                degs = tuple(deg[x] for x in tr)
                for w, c in sorted(vec.items()):
                    t = deg[w]
                    yield (i, degs, level_of(degs, t), t - sum(degs), t, tr, c)


def level_of(degs: Sequence[int], t: int) -> int:
    """Modified degree ``t - sum(min(deg, -1))`` of a trilinear component."""
    return t - sum(min(d, -1) for d in degs)


def identity_of(degs: Sequence[int]) -> int:
    return 1 + sum(1 for d in degs if d >= 0)


def fundamental_residuals(gam: ConstantStructureFunction, k: Optional[int] = None,
                          d: Optional[int] = None, bounded: bool = True
                          ) -> FundamentalResiduals:
    """Evaluate the four identities on every basis triple.

    Triples are sorted by basis order, so negative arguments come first; a
    triple with ``j`` nonnegative arguments belongs to identity ``j + 1``.
    Identities (1) and (2) are stated for ``k >= 0`` and ``d >= 0``; other
    components are not reported.  ``k`` (modified degree) and ``d``
    (homogeneous degree of the residual) optionally filter the output.
    """
    limit = gam.N + 3 * gam.base.depth + 3
    if (k is not None and k > limit) or (d is not None and d > limit):
        raise TruncationError("requested level lies outside the truncation order")
    E = _Engine(gam)
    deg = gam.deg
    funcs = {1: identity1, 2: identity2, 3: identity3, 4: identity4}
    out = {i: Residual() for i in funcs}
    for tr in combinations(range(gam.dim), 3):
        degs = [deg[x] for x in tr]
        i = identity_of(degs)
        vec = funcs[i](E, *tr, bounded=bounded)
        if not vec:
            continue
        base = sum(degs)

        def keep(t, i=i, base=base, degs=degs):
            if i in (1, 2) and t - base < 0:
                return False
            if k is not None and level_of(degs, t) != k:
                return False
            if d is not None and t - base != d:
                return False
            return True

        _file(gam, out[i], tr, vec, keep)
    return FundamentalResiduals(out, bounded)


# ---------------------------------------------------------------------------
# flatness

def _components(gam: ConstantStructureFunction, kind: str, level: int):
    """Yield ``(u, v, w, c, shift)`` for components of the given kind and
    modified degree."""
    deg = gam.deg
    for (u, v), out in gam.table.items():
        if kind_of(deg[u], deg[v]) != kind:
            continue
        for w, c in out.items():
            bg = bigrade(deg[u], deg[v], deg[w])
            if bg.s == level:
                yield u, v, w, c, bg.r


def kappa_slice_zero(gam: ConstantStructureFunction, i: int) -> bool:
    return not any(True for _ in _components(gam, KAPPA, i))


def tau_slice_flat(gam: ConstantStructureFunction, m: int) -> bool:
    """``tau_(l)[m] = 0`` for every ``l > 0``."""
    return not any(r > 0 for *_, r in _components(gam, TAU, m))


def sigma_slice_flat(gam: ConstantStructureFunction, m: int) -> bool:
    """``sigma_(l)[m] = 0`` for ``l != 0`` and ``sigma_(0)[m]`` is the bracket
    (where the bracket is defined)."""
    deg = gam.deg
    base = gam.base
    if any(r != 0 for *_, r in _components(gam, SIGMA, m)):
        return False
    # sigma_(0) on g_a x g_b with a + b = m - 2
    for u in range(gam.dim):
        if deg[u] < 0:
            continue
        for v in range(u + 1, gam.dim):
            if deg[v] < 0 or deg[u] + deg[v] != m - 2:
                continue
            if deg[u] + deg[v] > gam.N:
                continue
            if not base.defined(deg[u], deg[v]):
                continue
            zero_part = gam.shift_component(u, v, 0)
            if zero_part != base.br(u, v):
                return False
    return True


def kappa_flat_through(gam, k: int) -> bool:
    return all(kappa_slice_zero(gam, i) for i in range(1, k + 1))


def tau_flat_through(gam, k: int) -> bool:
    return all(tau_slice_flat(gam, m) for m in range(1, k + 1))


def sigma_flat_through(gam, k: int) -> bool:
    return all(sigma_slice_flat(gam, m) for m in range(2, k + 1))


@dataclass
class FlatnessReport:
    k: int
    tau_flat: bool
    sigma_flat: bool
    tau_flat_through: bool
    sigma_flat_through: bool
    kappa_flat_through: bool


def flatness(gam: ConstantStructureFunction, k: int) -> FlatnessReport:
    """Flatness of the slices of modified degree ``k + 1`` and of all slices
    up to that degree."""
    return FlatnessReport(k, tau_slice_flat(gam, k + 1), sigma_slice_flat(gam, k + 1),
                          tau_flat_through(gam, k + 1), sigma_flat_through(gam, k + 1),
                          kappa_flat_through(gam, k + 1))


def max_level(gam: ConstantStructureFunction) -> int:
    """Largest modified degree any component can have."""
    return gam.N + 2 * max(gam.base.depth, 1)


# ---------------------------------------------------------------------------
# corollaries

def kappa_cochain(gam: ConstantStructureFunction, k: int) -> Cochain:
    """``kappa_[k]`` as a 2-cochain of degree ``k``."""
    coeffs = {}
    for u, v, w, c, r in _components(gam, KAPPA, k):
        coeffs[((u, v), w)] = c
    return Cochain(2, k, coeffs)


def tau_cochain(gam: ConstantStructureFunction, A: int, k: int) -> Cochain:
    """``tau_[k](A, .)`` as a 1-cochain: ``X -> gamma(A, X)`` restricted to
    modified degree ``k``."""
    deg = gam.deg
    a = deg[A]
    d = k - a - 1
    coeffs = {}
    for X in gam.base.space.negative():
        for w, c in gam.gamma(A, X).items():
            if deg[w] - a - deg[X] == d:
                coeffs[((X,), w)] = c
    return Cochain(1, a + d, coeffs)


def rho_kappa(gam: ConstantStructureFunction, A: int, d: int) -> Cochain:
    """``rho(A) kappa_d`` with ``(rho(A)k)(X,Y) = [A, k(X,Y)] - k([A,X]_-, Y)
    - k(X, [A,Y]_-)``, as a 2-cochain of degree ``deg A + d``."""
    E = _Engine(gam)
    deg = gam.deg
    is_d = lambda s: s == d
    coeffs = {}
    neg = gam.base.space.negative()
    eA = {A: ONE}
    for X, Y in combinations(neg, 2):
        eX, eY = {X: ONE}, {Y: ONE}
        val: Vector = {}
        _acc(val, E.br(eA, E.g(eX, eY, is_d)))
        _acc(val, E.g(E.neg(E.br(eA, eX)), eY, is_d), -1)
        _acc(val, E.g(eX, E.neg(E.br(eA, eY)), is_d), -1)
        for w, c in val.items():
            coeffs[((X, Y), w)] = c
    return Cochain(2, deg[A] + d, coeffs)


def _cochain_zero(c: Cochain) -> bool:
    return not any(c.coefficients.values())


def _cochain_sub(a: Cochain, b: Cochain) -> Dict:
    out = dict(a.coefficients)
    for k, v in b.coefficients.items():
        out[k] = out.get(k, ZERO) - v
    return {k: v for k, v in out.items() if v}


@dataclass
class CorollaryCheck:
    name: str
    level: int
    hypothesis: bool
    conclusion: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return (not self.hypothesis) or self.conclusion


def corollary_checks(gam: ConstantStructureFunction, k_max: Optional[int] = None
                     ) -> List[CorollaryCheck]:
    """Check the consequences of the fundamental identities level by level.

    * ``d kappa_[1] = 0``;
    * kappa flat below ``k`` implies ``d kappa_[k] = 0``;
    * kappa and tau flat below ``k`` imply ``d tau_[k](A, .) = 0`` for
      ``0 <= a <= k``;
    * tau flat below ``k`` implies ``d tau_[k](A, .) = rho(A) kappa_[k-a-1]``
      for ``0 <= a <= k - 2``;
    * tau flat below ``k`` implies sigma flat through ``k``, including
      ``sigma_(d) = 0`` for ``d < 0`` and ``sigma_(0)`` equal to the bracket.

    Only levels whose cochains fit in the truncation are examined.
    """
    base = gam.base
    deg = gam.deg
    N = gam.N
    if k_max is None:
        k_max = max_level(gam)
    out: List[CorollaryCheck] = []
    neg_top = max((deg[u] for u in base.space.negative()), default=-1)

    def dkappa_zero(k):
        if not gam.complete and 3 * neg_top + k > N:
            return None
        return _cochain_zero(apply_coboundary(base, kappa_cochain(gam, k)))

    z = dkappa_zero(1)
    if z is not None:
        out.append(CorollaryCheck("dkappa_1", 1, True, z))
    for k in range(2, k_max + 1):
        kf = kappa_flat_through(gam, k - 1)
        z = dkappa_zero(k)
        if z is not None:
            out.append(CorollaryCheck("kappa_flat=>dkappa", k, kf, z))
        tf = tau_flat_through(gam, k - 1)
        for a in range(0, min(k, base.space.max_degree) + 1):
            for A in base.space.indices(a):
                d = k - a - 1
                if not gam.complete and 2 * neg_top + a + d > N:
                    continue
                dt = apply_coboundary(base, tau_cochain(gam, A, k))
                out.append(CorollaryCheck("kappa_tau_flat=>dtau", k, kf and tf,
                                          _cochain_zero(dt), f"A={list(base.space.basis[A])}"))
                if a <= k - 2:
                    rk = rho_kappa(gam, A, d)
                    diff = _cochain_sub(dt, rk)
                    out.append(CorollaryCheck("tau_flat=>dtau_formula", k, tf, not diff,
                                              f"A={list(base.space.basis[A])}"))
        sf = sigma_flat_through(gam, k)
        neg_sigma = not any(r < 0 for m in range(2, k + 1)
                            for *_, r in _components(gam, SIGMA, m))
        out.append(CorollaryCheck("tau_flat=>sigma_flat", k, tf, sf))
        out.append(CorollaryCheck("tau_flat=>sigma_negative_zero", k, tf, neg_sigma))
    return out


# ---------------------------------------------------------------------------
# verdicts

CARTAN_C = "condition (C) ⇒ Cartan"
CARTAN_FLAT = "Cartan-connection type (algebraic)"
PRE_CARTAN = "pre-Cartan (constant tau)"


def pre_cartan_verdict(gam: ConstantStructureFunction, condition_c=None) -> Dict[str, object]:
    """Verdict with the hypotheses that were certified.

    ``condition_c`` is an optional report from the condition (C) check.
    """
    top = max_level(gam)
    flat = tau_flat_through(gam, top)
    certified = ["tau constant (constant structure function)"]
    scope = ["bundle-level hypotheses (principal bundle, frames)",
             "connectedness of the structure groups"]
    c_ok = condition_c is not None and condition_c.invariant_under_g0
    if flat:
        certified.append(f"tau flat through modified degree {top}")
    if c_ok:
        certified.append("degree-0 invariant complement W2 (condition (C), degree-0 part)")
        scope.append("invariance under strictly positive degrees")
        verdict = CARTAN_C
    elif flat:
        verdict = CARTAN_FLAT
    else:
        verdict = PRE_CARTAN
    return {"verdict": verdict, "cartan": verdict != PRE_CARTAN, "tau_flat": flat,
            "certified": certified, "outside_scope": scope}


# ---------------------------------------------------------------------------
# filtered models

@dataclass
class FilteredModel:
    graded: GradedLieAlgebra
    gamma: ConstantStructureFunction
    order: List[int]


def model_from_filtered(degrees: Sequence[int],
                        brackets: Mapping[Tuple[int, int], Mapping[int, object]],
                        name: str = "") -> FilteredModel:
    """Build ``(gr L, gamma)`` from a Lie algebra with an adapted basis.

    ``degrees[i]`` is the filtration degree of basis vector ``i`` and
    ``brackets[(i, j)]`` is ``[e_i, e_j]``.  The filtration condition, the
    Jacobi identity of ``L`` and the graded part are checked.
    """
    n = len(degrees)
    order = sorted(range(n), key=lambda i: (degrees[i], i))
    pos = {old: new for new, old in enumerate(order)}
    dims: Dict[int, int] = {}
    for i in order:
        dims[degrees[i]] = dims.get(degrees[i], 0) + 1
    sp = GradedVectorSpace(dims)
    deg = sp.deg
    full: Dict[Tuple[int, int], Vector] = {}
    for (i, j), out in brackets.items():
        if not (0 <= i < n and 0 <= j < n) or any(not (0 <= k < n) for k in out):
            raise ValidationError("bracket index out of range", witness=[i, j])
        u, v = pos[i], pos[j]
        vec = {pos[k]: Fraction(c) for k, c in out.items() if c}
        if u == v:
            if vec:
                raise ValidationError("[e, e] must vanish", witness=[i, j])
            continue
        if u > v:
            u, v = v, u
            vec = {k: -c for k, c in vec.items()}
        if (u, v) in full and full[(u, v)] != vec:
            raise ValidationError("conflicting bracket entries", witness=[i, j])
        full[(u, v)] = vec
    graded: Dict[Tuple[int, int], Vector] = {}
    for (u, v), vec in full.items():
        for w in vec:
            if deg[w] < deg[u] + deg[v]:
                raise ValidationError("bracket violates the filtration",
                                      witness=[order[u], order[v], order[w]])
        gpart = {w: c for w, c in vec.items() if deg[w] == deg[u] + deg[v]}
        if gpart:
            graded[(u, v)] = gpart
    g = GradedLieAlgebra(sp, graded, order=None, name=name)
    gam = ConstantStructureFunction(g, full, complete=True, name=name)
    bres = bianchi_residual(gam)
    if not bres.is_zero:
        raise ValidationError("the bracket table violates the Jacobi identity",
                              witness=bres.witness(gam))
    return FilteredModel(g, gam, order)
