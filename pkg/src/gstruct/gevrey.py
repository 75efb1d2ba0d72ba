"""Truncated power series, the weighted norm ``|F|_r`` and frame changes.

For a frame ``X_1..X_n`` written ``X_j = sum_l B_jl D_l`` in coordinate
derivations, the inverse matrix ``A = B^{-1}`` gives ``D_i = sum_j A_ij X_j``.
Iterating,

    D^k u = Phi^k_1 X u + Phi^k_2 X^2 u + ... + Phi^k_k X^k u,

where tensor indices are ordered outermost first:
``(D^k u)_{i1..ik} = D_i1 (D^{k-1} u)_{i2..ik}`` and
``(X^i u)_{j1..ji} = X_j1 (X^{i-1} u)_{j2..ji}``.  This yields::

    Phi^k_i[(i1, I), (l, J)] += A_{i1 l} Phi^{k-1}_{i-1}[I, J]
    Phi^k_i[(i1, I), J]      += D_i1 Phi^{k-1}_i[I, J]
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import SingularFrameError, TruncationError, ValidationError
from .linalg import ONE, ZERO, inverse

Alpha = Tuple[int, ...]


def _multi_indices(n: int, k: int) -> Iterable[Alpha]:
    if n == 1:
        yield (k,)
        return
    for a in range(k, -1, -1):
        for rest in _multi_indices(n - 1, k - a):
            yield (a,) + rest


def _num(c):
    """Exact coefficient; integral values are kept as ``int`` for speed."""
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class FormalSeries:
    """Power series in ``n`` variables known through total degree ``order``.

    Coefficients are exact: ``int`` or ``Fraction``.
    """

    __slots__ = ("n", "order", "coeffs")

    def __init__(self, n: int, order: int, coeffs: Optional[Dict[Alpha, object]] = None) -> None:
        if order < 0:
            raise TruncationError("series order must be nonnegative")
        self.n = n
        self.order = order
        self.coeffs: Dict[Alpha, object] = {}
        for a, c in (coeffs or {}).items():
            a = tuple(a)
            if len(a) != n or any(x < 0 for x in a):
                raise ValidationError(f"bad exponent {a}")
            if sum(a) <= order and c:
                self.coeffs[a] = _num(c)

    @classmethod
    def _make(cls, n: int, order: int, coeffs: Dict[Alpha, object]) -> "FormalSeries":
        out = cls.__new__(cls)
        out.n, out.order, out.coeffs = n, order, coeffs
        return out

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, n: int, order: int, c=1) -> "FormalSeries":
        return cls(n, order, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, order: int, i: int) -> "FormalSeries":
        a = [0] * n
        a[i] = 1
        return cls(n, order, {tuple(a): 1})

    @classmethod
    def geometric(cls, n: int, order: int, i: int = 0) -> "FormalSeries":
        """``1 / (1 - x_i)`` through ``order``."""
        out = {}
        for k in range(order + 1):
            a = [0] * n
            a[i] = k
            out[tuple(a)] = 1
        return cls(n, order, out)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "FormalSeries") -> None:
        if other.n != self.n:
            raise ValidationError("series in different numbers of variables")

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._check(other)
        o = min(self.order, other.order)
        out = {a: c for a, c in self.coeffs.items() if sum(a) <= o}
        for a, c in other.coeffs.items():
            if sum(a) <= o:
                s = out.get(a, 0) + c
                if s:
                    out[a] = s
                else:
                    out.pop(a, None)
        return FormalSeries._make(self.n, o, out)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries._make(self.n, self.order, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def scale(self, s) -> "FormalSeries":
        s = _num(s)
        return FormalSeries._make(self.n, self.order,
                                  {a: s * c for a, c in self.coeffs.items()} if s else {})

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        self._check(other)
        o = min(self.order, other.order)
        out: Dict[Alpha, Fraction] = {}
        right = sorted((sum(b), b, e) for b, e in other.coeffs.items() if sum(b) <= o)
        for a, c in self.coeffs.items():
            da = sum(a)
            for db, b, e in right:
                if da + db > o:
                    break
                g = tuple(x + y for x, y in zip(a, b))
                s = out.get(g, 0) + c * e
                if s:
                    out[g] = s
                else:
                    out.pop(g, None)
        return FormalSeries._make(self.n, o, out)

    def derive(self, i: int) -> "FormalSeries":
        """``D_i``; consumes one order."""
        if self.order < 1:
            raise TruncationError("cannot differentiate a series of order 0")
        out = {}
        for a, c in self.coeffs.items():
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
        return FormalSeries._make(self.n, self.order - 1, out)

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.order:
            raise TruncationError("cannot raise the order of a series")
        return FormalSeries._make(self.n, order, {a: c for a, c in self.coeffs.items() if sum(a) <= order})

    def layer(self, k: int) -> "FormalSeries":
        """Homogeneous part of degree ``k``."""
        return FormalSeries(self.n, self.order, {a: c for a, c in self.coeffs.items() if sum(a) == k})

    def at_zero(self) -> Fraction:
        return Fraction(self.coeffs.get((0,) * self.n, 0))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> List[int]:
        return sorted({sum(a) for a in self.coeffs})

    def __eq__(self, other) -> bool:
        return (isinstance(other, FormalSeries) and self.n == other.n
                and self.order == other.order and self.coeffs == other.coeffs)

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*x^{a}" for a, c in sorted(self.coeffs.items()))
        return f"FormalSeries(n={self.n}, order={self.order}, {terms or '0'})"


# ---------------------------------------------------------------------------
# weighted norm

def _check_weights(r: Sequence) -> List[Fraction]:
    w = [Fraction(x) for x in r]
    if any(x <= 0 for x in w):
        raise ValidationError("weights must be positive")
    return w


def layer_norm(F: FormalSeries, k: int, r: Sequence) -> Fraction:
    """``sup_{|a|=k} (a!/|a|!) |f_a| r^a``."""
    w = _check_weights(r)
    best = ZERO
    for a, c in F.coeffs.items():
        if sum(a) != k:
            continue
        num = 1
        for x in a:
            num *= factorial(x)
        val = Fraction(num, factorial(k)) * abs(c)
        for x, e in zip(w, a):
            val *= x ** e
        if val > best:
            best = val
    return best


def weighted_norm(F: FormalSeries, r: Sequence) -> Tuple[Dict[int, Fraction], Fraction]:
    """Per-layer norms and their sum."""
    layers = {k: layer_norm(F, k, r) for k in F.degrees()}
    return layers, sum(layers.values(), ZERO)


def random_homogeneous(n: int, k: int, rng: random.Random, density: float = 0.6,
                       bound: int = 5) -> FormalSeries:
    coeffs = {}
    for a in _multi_indices(n, k):
        if rng.random() < density:
            c = Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
            if c:
                coeffs[a] = c
    if not coeffs:
        a = next(iter(_multi_indices(n, k)))
        coeffs[a] = 1
    return FormalSeries(n, k, coeffs)


def _poly(F: FormalSeries, order: int) -> FormalSeries:
    return FormalSeries(F.n, order, F.coeffs)


@dataclass
class LemmaAReport:
    samples: int
    checks: int
    failures: List[Dict[str, object]] = field(default_factory=list)
    tight: List[Dict[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def lemma_a_check(samples: Sequence[Tuple[Sequence[FormalSeries], Sequence[FormalSeries], Sequence]]
                  ) -> LemmaAReport:
    """Check submultiplicativity on layers and totals and the derivative
    bound ``|D_i F_k|_r <= (k / r_min) |F_k|_r`` exactly.

    Each sample is ``(F_layers, G_layers, r)`` with homogeneous layers.
    """
    rep = LemmaAReport(len(samples), 0)

    def record(name, idx, lhs, rhs):
        rep.checks += 1
        if lhs > rhs:
            rep.failures.append({"property": name, "sample": idx, "lhs": lhs, "rhs": rhs})
        elif lhs == rhs and lhs != 0:
            rep.tight.append({"property": name, "sample": idx, "value": lhs})

    for idx, (Fs, Gs, r) in enumerate(samples):
        w = _check_weights(r)
        rmin = min(w)
        for Fk in Fs:
            for Gl in Gs:
                k, l = max(Fk.degrees(), default=0), max(Gl.degrees(), default=0)
                P = _poly(Fk, k + l) * _poly(Gl, k + l)
                record("product_layer", idx, layer_norm(P, k + l, w),
                       layer_norm(Fk, k, w) * layer_norm(Gl, l, w))
        top = sum(max(f.degrees(), default=0) for f in Fs) + sum(max(g.degrees(), default=0) for g in Gs)
        F = FormalSeries(Fs[0].n, top, {})
        for f in Fs:
            F = F + _poly(f, top)
        G = FormalSeries(Fs[0].n, top, {})
        for g in Gs:
            G = G + _poly(g, top)
        record("product_total", idx, weighted_norm(F * G, w)[1],
               weighted_norm(F, w)[1] * weighted_norm(G, w)[1])
        for Fk in list(Fs) + list(Gs):
            k = max(Fk.degrees(), default=0)
            if k == 0:
                continue
            for i in range(Fk.n):
                record("derivative", idx, layer_norm(_poly(Fk, k).derive(i), k - 1, w),
                       Fraction(k) / rmin * layer_norm(Fk, k, w))
    return rep


# ---------------------------------------------------------------------------
# frames

class SeriesVectorField:
    """``X = sum_l coeffs[l] D_l``."""

    def __init__(self, coeffs: Sequence[FormalSeries]) -> None:
        if not coeffs:
            raise ValidationError("empty vector field")
        n = coeffs[0].n
        if len(coeffs) != n or any(c.n != n for c in coeffs):
            raise ValidationError("vector field needs one coefficient per variable")
        self.coeffs = list(coeffs)
        self.n = n

    @property
    def order(self) -> int:
        return min(c.order for c in self.coeffs)

    def __call__(self, u: FormalSeries) -> FormalSeries:
        out = None
        for l, c in enumerate(self.coeffs):
            t = c * u.derive(l)
            out = t if out is None else out + t
        return out

    @classmethod
    def coordinate(cls, n: int, order: int, i: int) -> "SeriesVectorField":
        return cls([FormalSeries.constant(n, order, 1 if l == i else 0) for l in range(n)])


SeriesMatrix = List[List[FormalSeries]]


def _mat_mul(P: SeriesMatrix, Q: SeriesMatrix) -> SeriesMatrix:
    n = len(P)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = P[i][0] * Q[0][j]
            for l in range(1, n):
                acc = acc + P[i][l] * Q[l][j]
            row.append(acc)
        out.append(row)
    return out


def frame_matrix(X: Sequence[SeriesVectorField]) -> SeriesMatrix:
    """``A`` with ``D_i = sum_j A_ij X_j``, i.e. the truncated inverse of
    ``B`` where ``X_j = sum_l B_jl D_l``."""
    n = len(X)
    if n == 0 or any(x.n != n for x in X):
        raise ValidationError("a frame needs n vector fields in n variables")
    order = min(x.order for x in X)
    B = [[X[j].coeffs[l].truncate(order) for l in range(n)] for j in range(n)]
    B0 = [[B[j][l].at_zero() for l in range(n)] for j in range(n)]
    try:
        B0inv = inverse(B0)
    except ZeroDivisionError:
        raise SingularFrameError("frame is degenerate at the origin") from None
    C = [[FormalSeries.constant(n, order, B0inv[i][j]) for j in range(n)] for i in range(n)]
    # M = B0^{-1} (B - B0) has no constant term; B^{-1} = sum_k (-M)^k B0^{-1}
    Bn = [[B[j][l] - FormalSeries.constant(n, order, B0[j][l]) for l in range(n)] for j in range(n)]
    M = _mat_mul(C, Bn)
    negM = [[m.scale(-1) for m in row] for row in M]
    term = C
    A = C
    for _ in range(order):
        term = _mat_mul(negM, term)
        A = [[A[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return A


def frame_residual(A: SeriesMatrix, X: Sequence[SeriesVectorField]) -> bool:
    """True when ``A B`` is the identity through the common order."""
    n = len(A)
    B = [[X[j].coeffs[l] for l in range(n)] for j in range(n)]
    P = _mat_mul(A, B)
    for i in range(n):
        for j in range(n):
            e = P[i][j] - FormalSeries.constant(n, P[i][j].order, 1 if i == j else 0)
            if not e.is_zero:
                return False
    return True


PhiTable = Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], FormalSeries]


@dataclass
class FrameTensors:
    A: SeriesMatrix
    phi: Dict[Tuple[int, int], PhiTable]
    path_counts: Dict[Tuple[int, int], int]
    n: int

    def entry(self, k: int, i: int, I: Tuple[int, ...], J: Tuple[int, ...]) -> Optional[FormalSeries]:
        return self.phi.get((k, i), {}).get((tuple(I), tuple(J)))


def phi_tensors(A: SeriesMatrix, k_max: int, order: Optional[int] = None) -> FrameTensors:
    """Tabulate ``Phi^k_i`` for ``1 <= i <= k <= k_max``.

    Each ``D`` consumes one order, so ``A`` must be known through order
    ``k_max - 1``.  With ``order`` given, ``Phi^{k_max}`` is only carried
    through that order (lower layers correspondingly further).
    """
    n = len(A)
    have = min(a.order for row in A for a in row)
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    if have < k_max - 1:
        raise TruncationError(f"frame known through order {have}; need {k_max - 1}")
    if order is not None and order + k_max - 1 < have:
        A = [[a.truncate(order + k_max - 1) for a in row] for row in A]
    phi: Dict[Tuple[int, int], PhiTable] = {}
    counts = {(1, 1): 1}
    phi[(1, 1)] = {((i1,), (l,)): A[i1][l] for i1 in range(n) for l in range(n)
                   if not A[i1][l].is_zero}
    for k in range(2, k_max + 1):
        for i in range(1, k + 1):
            counts[(k, i)] = counts.get((k - 1, i - 1), 0) + counts.get((k - 1, i), 0)
            table: PhiTable = {}
            prev = phi.get((k - 1, i - 1), {})
            for (I, J), f in prev.items():
                for i1 in range(n):
                    for l in range(n):
                        a = A[i1][l]
                        if a.is_zero:
                            continue
                        key = ((i1,) + I, (l,) + J)
                        t = a * f
                        table[key] = table[key] + t if key in table else t
            for (I, J), f in phi.get((k - 1, i), {}).items():
                if f.order < 1:
                    raise TruncationError("order exhausted while differentiating")
                for i1 in range(n):
                    t = f.derive(i1)
                    key = ((i1,) + I, J)
                    table[key] = table[key] + t if key in table else t
            phi[(k, i)] = {key: v for key, v in table.items() if not v.is_zero}
    return FrameTensors(A, phi, counts, n)


def _iterate_fields(u: FormalSeries, X: Sequence[SeriesVectorField], k: int
                    ) -> Dict[Tuple[int, ...], FormalSeries]:
    out = {(): u}
    for _ in range(k):
        out = {(l,) + J: X[l](f) for J, f in out.items() for l in range(len(X))}
    return out


def _iterate_coordinate(u: FormalSeries, k: int) -> Dict[Tuple[int, ...], FormalSeries]:
    out = {(): u}
    for _ in range(k):
        out = {(l,) + J: f.derive(l) for J, f in out.items() for l in range(u.n)}
    return out


@dataclass
class ExpansionResult:
    k: int
    order: int
    residual: Dict[Tuple[int, ...], FormalSeries]

    @property
    def is_zero(self) -> bool:
        return all(f.is_zero for f in self.residual.values())


def expansion_verify(u: FormalSeries, X: Sequence[SeriesVectorField], k: int,
                     frames: Optional[FrameTensors] = None) -> ExpansionResult:
    """Residual ``D^k u - sum_i Phi^k_i X^i u`` through the valid order."""
    if u.order < k:
        raise TruncationError(f"u is known through order {u.order}; need at least {k}")
    target = u.order - k
    A = frame_matrix(X)
    ft = frames or phi_tensors(A, k, target)
    Dk = _iterate_coordinate(u, k)
    Xi = {i: {J: f.truncate(min(f.order, target)) for J, f in _iterate_fields(u, X, i).items()}
          for i in range(1, k + 1)}
    rows: Dict[Tuple[int, ...], List[Tuple[int, Tuple[int, ...], FormalSeries]]] = {}
    for i in range(1, k + 1):
        for (I, J), f in ft.phi.get((k, i), {}).items():
            rows.setdefault(I, []).append((i, J, f))
    residual = {}
    order = None
    for I, lhs in Dk.items():
        acc = lhs
        for i, J, f in rows.get(I, ()):
            acc = acc - f * Xi[i][J]
        residual[I] = acc
        order = acc.order if order is None else min(order, acc.order)
    residual = {I: f.truncate(order) for I, f in residual.items()}
    return ExpansionResult(k, order, residual)


def estimate_profile(f: FormalSeries, X: Sequence[SeriesVectorField], ell_max: int,
                     rho, exact: bool = True) -> List[Tuple[int, object]]:
    """``max_I |X_I f(0)| / (ell! rho^ell)`` for ``ell = 0..ell_max``.

    With ``exact=False`` values are floats (for plotting only).
    """
    if f.order < ell_max:
        raise TruncationError(f"f is known through order {f.order}; need {ell_max}")
    rho = Fraction(rho)
    if rho <= 0:
        raise ValidationError("rho must be positive")
    level = {(): f}
    out = []
    for ell in range(ell_max + 1):
        if ell:
            level = {(l,) + J: X[l](g) for J, g in level.items() for l in range(len(X))}
        best = max((abs(g.at_zero()) for g in level.values()), default=ZERO)
        val = best / (factorial(ell) * rho ** ell)
        out.append((ell, val if exact else float(val)))
    return out


# ---------------------------------------------------------------------------
# tensors over V

def tensor_norm(T: Dict[Tuple[int, ...], Fraction]) -> Fraction:
    """Sup of absolute coefficients."""
    return max((abs(v) for v in T.values()), default=ZERO)


def tensor_power_apply(M: Sequence[Sequence[Fraction]], T: Dict[Tuple[int, ...], Fraction]
                       ) -> Dict[Tuple[int, ...], Fraction]:
    """``(M x ... x M) T`` for a tensor with ``len(key)`` slots."""
    n = len(M)
    out: Dict[Tuple[int, ...], Fraction] = {}
    for J, c in T.items():
        for I in product(range(n), repeat=len(J)):
            x = c
            for a, b in zip(I, J):
                x *= M[a][b]
                if not x:
                    break
            if x:
                out[I] = out.get(I, ZERO) + x
    return {k: v for k, v in out.items() if v}


def operator_bound(M: Sequence[Sequence[Fraction]]) -> Fraction:
    """Max absolute row sum: the sup-norm operator bound."""
    return max(sum((abs(Fraction(x)) for x in row), ZERO) for row in M)


# ---------------------------------------------------------------------------
# seeded samples

def _rand_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 6), rng.randint(1, 4))


def lemma_a_samples(seed: int, count: int = 100, max_n: int = 3, max_order: int = 6
                    ) -> List[Tuple[List[FormalSeries], List[FormalSeries], List[Fraction]]]:
    """Pairs of sums of homogeneous layers with total degree at most
    ``max_order``, and positive weights."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        kf = rng.randint(0, max_order)
        kg = rng.randint(0, max_order - kf)
        Fs = [random_homogeneous(n, k, rng) for k in sorted(rng.sample(range(kf + 1), rng.randint(1, min(2, kf + 1))))]
        Gs = [random_homogeneous(n, k, rng) for k in sorted(rng.sample(range(kg + 1), rng.randint(1, min(2, kg + 1))))]
        out.append((Fs, Gs, [_rand_weight(rng) for _ in range(n)]))
    return out


def random_polynomial(n: int, degree: int, order: int, rng: random.Random,
                      density: float = 0.5) -> FormalSeries:
    coeffs = {}
    for k in range(degree + 1):
        for a in _multi_indices(n, k):
            if rng.random() < density:
                coeffs[a] = rng.randint(-3, 3)
    return FormalSeries(n, order, coeffs)


def random_polynomial_frame(n: int, rng: random.Random, order: int = 6,
                            degree: int = 2) -> List[SeriesVectorField]:
    """``B = I + L`` with ``L`` strictly lower triangular and polynomial, so
    that ``A = B^{-1}`` is polynomial too."""
    fields = []
    for j in range(n):
        coeffs = []
        for l in range(n):
            if l == j:
                coeffs.append(FormalSeries.constant(n, order))
            elif l < j:
                coeffs.append(random_polynomial(n, degree, order, rng))
            else:
                coeffs.append(FormalSeries(n, order))
        fields.append(SeriesVectorField(coeffs))
    return fields


def shear_frame(order: int) -> List[SeriesVectorField]:
    """``X_1 = D_1``, ``X_2 = D_2 + x_1 D_1``."""
    zero = FormalSeries(2, order)
    one = FormalSeries.constant(2, order)
    return [SeriesVectorField([one, zero]),
            SeriesVectorField([FormalSeries.variable(2, order, 0), one])]


def identity_frame(n: int, order: int) -> List[SeriesVectorField]:
    return [SeriesVectorField.coordinate(n, order, i) for i in range(n)]
