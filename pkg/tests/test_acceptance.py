"""Acceptance criteria 1-10, each printing one PASS/FAIL line.

Also runnable directly: ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from oracles import contact_dims, g2_graded_dims, gl_dims  # noqa: E402

from gstruct import families, gevrey as gv  # noqa: E402
from gstruct.errors import TruncationError  # noqa: E402
from gstruct.glacore import Metric  # noqa: E402
from gstruct.models import (ConstantStructureFunction, bianchi_residual,  # noqa: E402
                            check_admissible, corollary_checks, fundamental_residuals,
                            kappa_cochain, sigma_flat_through, tau_flat_through)
from gstruct.prolong import (FINITE, cumulative_dims, prolong_full,  # noqa: E402
                             tanaka_finite_type_reduction, universal_fiber_dims)
from gstruct.spencer import (apply_coboundary, cohomology_dim, complement_select,  # noqa: E402
                             condition_C_check, invariant_index_sets, spencer_slice)


def report(n: int, what: str, checks: dict, seconds: float = None, limit: float = None):
    """Print the verdict line for criterion ``n`` and fail on any false check."""
    bad = [k for k, ok in checks.items() if not ok]
    if limit is not None and seconds is not None and seconds >= limit:
        bad.append(f"runtime {seconds:.2f}s >= {limit}s")
    timing = "" if seconds is None else f" [{seconds:.2f}s]"
    line = f"{'PASS' if not bad else 'FAIL'} criterion {n}: {what}{timing}"
    if bad:
        line += " :: " + "; ".join(bad)
    ACCEPTANCE_LINES.append(line)
    assert not bad, line


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# ---------------------------------------------------------------------------

def test_criterion_1_g2_prolongation():
    res, dt = timed(lambda: prolong_full(families.symbol_235(), cap=6))
    want = g2_graded_dims()
    report(1, "G2 prolongation of the (2,3,5) symbol", {
        "dims match root oracle": res.dims_by_degree == want,
        "dims (2,1,2,4,2,1,2)": [res.dims_by_degree[p] for p in range(-3, 4)] == [2, 1, 2, 4, 2, 1, 2],
        "total 14": res.total_dim == 14,
        "finite_type": res.verdict == FINITE,
    }, dt, 5.0)


def test_criterion_2_riemannian_chain():
    def run():
        res = prolong_full(families.abelian(3), cap=3, metric=Metric.euclidean(3))
        g = res.algebra
        ix = invariant_index_sets(g, 4, "section5")
        W = complement_select(g, range(0, 3))
        return res, g, ix, condition_C_check(g, W.W2)
    (res, g, ix, cc), dt = timed(run)
    report(2, "Riemannian (R^3, so(3)) chain", {
        "g1 = 0": res.dims_by_degree.get(1, 0) == 0,
        "finite_type dim 6": res.verdict == FINITE and res.total_dim == 6,
        "H2_1 = 0": cohomology_dim(g, 2, 1) == 0,
        "H2_2 = 6": cohomology_dim(g, 2, 2) == 6 == 3 ** 2 * (3 ** 2 - 1) // 12,
        "I2 from 2 = {2}": [i for i in ix.I2 if i >= 2] == [2],
        "condition C": cc.invariant_under_g0,
    }, dt, 2.0)


def test_criterion_3_contact():
    def run():
        h3 = families.heisenberg()
        res = prolong_full(h3, cap=3)
        _, f0 = tanaka_finite_type_reduction(h3)
        return res, f0
    (res, f0), dt = timed(run)
    report(3, "contact structure on h3", {
        "dims 6, 9, 12": [res.dims_by_degree[p] for p in (1, 2, 3)] == [6, 9, 12],
        "weighted monomial oracle": all(res.dims_by_degree[p] == contact_dims(p) for p in (1, 2, 3)),
        "f0 = 3": f0.dim == 3,
    }, dt, 2.0)


def test_criterion_4_gl_tower():
    res, dt = timed(lambda: prolong_full(families.abelian(2), cap=3))
    report(4, "gl(2) tower", {
        "dims 6, 8, 10": [res.dims_by_degree[p] for p in (1, 2, 3)] == [6, 8, 10],
        "closed form": all(res.dims_by_degree[p] == gl_dims(2, p) for p in (0, 1, 2, 3)),
    }, dt, 1.0)


def _corpus():
    algs = dict(families.catalogue())
    algs["heisenberg_cap3"] = prolong_full(families.heisenberg(), cap=3).algebra
    algs["gl2_cap3"] = prolong_full(families.abelian(2), cap=3).algebra
    algs["sphere_cap2"] = prolong_full(families.abelian(4), cap=2,
                                       metric=Metric.euclidean(4)).algebra
    return algs


def test_criterion_5_spencer_soundness():
    t = time.perf_counter()
    slices = skipped = 0
    square_zero = euler = True
    for name, g in _corpus().items():
        for r in range(-3, g.top + 2 * g.depth + 2):
            try:
                sl = spencer_slice(g, r)
            except TruncationError:
                skipped += 1
                continue
            slices += 1
            square_zero = square_zero and sl.check_square_zero()
            if g.complete:
                ec = sum((-1) ** q * n for q, n in sl.dims.items())
                eh = sum((-1) ** q * sl.cohomology(q) for q in sl.dims)
                euler = euler and ec == eh
    report(5, f"Spencer complex on {slices} slices ({skipped} beyond truncation)", {
        "d d = 0": square_zero, "Euler characteristic": euler, "slices computed": slices > 50,
    }, time.perf_counter() - t)


def test_criterion_6_identity_equivalence():
    t = time.perf_counter()
    cat = families.catalogue()
    small = ["sl2", "riemannian2", "riemannian3", "sl3_contact", "sl3_projective"]
    rng = random.Random(20240601)
    total = agree = nonzero = on_g2 = 0
    for i in range(220):
        name = "g2" if i % 11 == 0 else small[i % len(small)]
        g = cat[name]
        gam = families.random_filtered_model(g, rng, density=0.3)
        gam = families.random_admissible(g, rng, nslots=i % 4, start=gam)
        if not check_admissible(gam).ok:
            continue
        fr = fundamental_residuals(gam)
        b = bianchi_residual(gam)
        total += 1
        on_g2 += name == "g2"
        agree += fr.all_zero == b.is_zero
        nonzero += not b.is_zero
    slots = missed = 0
    for name in small + ["g2"]:
        g = cat[name]
        base = ConstantStructureFunction.from_bracket(g)
        pool = families.admissible_slots(g)
        if name == "g2":
            pool = random.Random(3).sample(pool, 40)
        for u, v, w in pool:
            gam = base.copy()
            gam.add(u, v, w, 1)
            if bianchi_residual(gam).is_zero:
                continue
            slots += 1
            missed += fundamental_residuals(gam).all_zero
    report(6, f"identities <=> Bianchi on {total} models ({on_g2} on G2, {nonzero} non-Jacobi), "
              f"{slots} single-slot violations", {
        "at least 200 models": total >= 200,
        "equivalence": agree == total,
        "both outcomes sampled": 0 < nonzero < total,
        "single-slot violations detected": slots > 0 and missed == 0,
    }, time.perf_counter() - t, 60.0)


def _flat_tau_samples(rng):
    cat = families.catalogue()
    out = []
    for n in (2, 3, 4):
        for c in (1, -1, families._rand_q(rng)):
            gam = families.curvature_model(n, c)
            out.append(gam)
            out.append(families.conjugate_model(gam, families.degree_preserving_change(gam.base, rng)))
    for name, g in cat.items():
        gam = ConstantStructureFunction.from_bracket(g)
        out.append(gam)
        if name != "g2":
            out.append(families.conjugate_model(gam, families.degree_preserving_change(g, rng)))
    return out


def test_criterion_7_corollaries():
    t = time.perf_counter()
    rng = random.Random(77)
    cat = families.catalogue()
    # d kappa_[1] = 0 on Jacobi-valid models
    dk1 = True
    for i in range(40):
        g = cat[["sl2", "riemannian3", "sl3_contact", "sl3_projective"][i % 4]]
        gam = families.random_filtered_model(g, rng, density=0.4)
        dk1 = dk1 and not any(apply_coboundary(g, kappa_cochain(gam, 1)).coefficients.values())
    samples = _flat_tau_samples(rng)
    sigma_ok = sigma0_ok = suite_ok = True
    for gam in samples:
        top = gam.N + 2 * max(gam.base.depth, 1)
        flat = tau_flat_through(gam, top)
        assert flat
        sigma_ok = sigma_ok and sigma_flat_through(gam, top)
        # sigma_(0)(A, B) = [A, B] on nonnegative arguments
        nonneg = [u for u in range(gam.dim) if gam.deg[u] >= 0]
        for u in nonneg:
            for v in nonneg:
                if u < v:
                    out = {w: c for w, c in gam.gamma(u, v).items()
                           if gam.deg[w] == gam.deg[u] + gam.deg[v]}
                    sigma0_ok = sigma0_ok and out == gam.base.br(u, v)
        suite_ok = suite_ok and all(c.ok for c in corollary_checks(gam))
    report(7, f"corollaries on {len(samples)} flat-tau samples", {
        "d kappa_[1] = 0": dk1, "sigma flat": sigma_ok, "sigma_(0) = bracket": sigma0_ok,
        "corollary suite": suite_ok,
    }, time.perf_counter() - t)


def test_criterion_8_dimension_bookkeeping():
    t = time.perf_counter()
    cases = [(families.symbol_235(), None, 5), (families.abelian(3), Metric.euclidean(3), 2),
             (families.abelian(4), Metric.euclidean(4), 2)]
    sums = dominate = True
    strict = 0
    for gm, metric, cap in cases:
        res = prolong_full(gm, cap=cap, metric=metric)
        assert res.verdict == FINITE
        neg = {p: n for p, n in res.dims_by_degree.items() if p < 0}
        fibers = {p: n for p, n in res.dims_by_degree.items() if p >= 0}
        sums = sums and cumulative_dims(neg, fibers)[max(fibers)] == res.total_dim
        ubar = universal_fiber_dims(neg, [fibers[0]], cap + 2)
        udims = dict(neg)
        udims[0] = fibers[0]
        udims.update(ubar)
        for ell in range(1, cap + 3):
            extra = sum(udims.get(i, 0) for i in range(0, ell - 1)) * udims.get(ell - 1, 0)
            g_ell = fibers.get(ell, 0)
            dominate = dominate and ubar[ell] >= g_ell
            if extra:
                strict += 1
                dominate = dominate and ubar[ell] > g_ell
    report(8, f"fiber dimension bookkeeping ({strict} strict comparisons)", {
        "sum of fibers = dim": sums, "universal fibers dominate": dominate and strict > 0,
    }, time.perf_counter() - t)


def test_criterion_9_power_series():
    t = time.perf_counter()
    rep = gv.lemma_a_check(gv.lemma_a_samples(seed=9, count=100, max_n=3, max_order=6))
    rng = random.Random(9)
    frames_ok = True
    for f in range(20):
        n = 2 + f % 2
        X = gv.random_polynomial_frame(n, rng, order=6)
        u = gv.random_polynomial(n, 6, 6, rng)
        ft = gv.phi_tensors(gv.frame_matrix(X), 4, 2)
        for k in range(1, 5):
            frames_ok = frames_ok and gv.expansion_verify(u, X, k, ft if k == 4 else None).is_zero
    X = gv.random_polynomial_frame(2, rng, order=5)
    A = gv.frame_matrix(X)
    ft = gv.phi_tensors(A, 2)
    zero = gv.FormalSeries(2, 4)
    phi21 = phi22 = True
    for i1 in range(2):
        for i2 in range(2):
            for l in range(2):
                got = ft.entry(2, 1, (i1, i2), (l,)) or zero
                phi21 = phi21 and got == A[i2][l].derive(i1)
                for m in range(2):
                    got = ft.entry(2, 2, (i1, i2), (l, m)) or gv.FormalSeries(2, 5)
                    phi22 = phi22 and got == A[i1][l] * A[i2][m]
    report(9, f"power series: {rep.checks} norm inequalities, 20 frames", {
        "norm inequalities": rep.ok and rep.samples == 100,
        "expansion residual zero": frames_ok,
        "Phi^2_1 = DA": phi21, "Phi^2_2 = A x A": phi22,
    }, time.perf_counter() - t, 30.0)


SUITE = [
    ["validate", "g2.json"],
    ["prolong", "--cap", "6", "g235.json"],
    ["prolong", "--cap", "3", "heisenberg.json"],
    ["prolong", "--cap", "3", "gl2.json"],
    ["cohomology", "--q", "2", "--r", "0..3", "riemann3.json"],
    ["invariants", "--cap", "4", "riemann3.json"],
    ["complements", "--cap", "2", "riemann3.json"],
    ["condition-c", "--cap", "3", "riemann3.json"],
    ["model-check", "sphere3_model.json"],
    ["model-check", "contact_filtered_model.json"],
    ["gevrey", "--demo", "lemma-a", "--seed", "1"],
    ["gevrey", "--demo", "expansion", "--seed", "1"],
    ["gevrey", "--demo", "profile"],
]


def _suite_bytes():
    out = []
    for argv in SUITE:
        for fmt in ("json", "text"):
            p = subprocess.run([sys.executable, "-m", "gstruct", *argv, "--format", fmt],
                               capture_output=True, check=False)
            out.append((p.returncode, p.stdout))
    return out


def test_criterion_10_determinism():
    (a, b), dt = timed(lambda: (_suite_bytes(), _suite_bytes()))
    report(10, f"byte-identical reports over {len(a)} CLI runs", {
        "all succeeded": all(code == 0 for code, _ in a),
        "identical": a == b,
    }, dt)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
