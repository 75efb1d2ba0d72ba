"""Command line interface: ``gstruct COMMAND [flags] FILE``.

Exit codes: 0 success, 2 validation failure (including a failed check),
3 schema error, 64 usage error, 66 unreadable file.

File arguments that do not exist on disk are looked up among the bundled
documents (``heisenberg.json``, ``g235.json``, ...).
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .documents import (DocumentError, ModelSpec, load_json, parse_algebra, parse_model,
                        parse_rational, render_json, render_text, _Diag)
from .errors import GStructError, SchemaError, TruncationError, ValidationError
from .glacore import (GradedLieAlgebra, check_jacobi, check_transitivity, is_fundamental,
                      truncate)
from .linalg import Vector
from .prolong import FINITE, prolong_full, tanaka_finite_type_reduction

EXIT_OK, EXIT_INVALID, EXIT_SCHEMA, EXIT_USAGE, EXIT_NOINPUT = 0, 2, 3, 64, 66


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    """A requested check ran to completion and failed; the report is kept."""

    def __init__(self, report: dict) -> None:
        super().__init__("check failed")
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# inputs

def _read(name: str) -> Tuple[bytes, str, Optional[Path]]:
    path = Path(name)
    if path.exists():
        try:
            return path.read_bytes(), name, path.parent
        except OSError as exc:
            raise FileNotFoundError(f"{name}: {exc.strerror}") from None
    data = resources.files("gstruct").joinpath("data", path.name)
    if path.name == name and data.is_file():
        return data.read_bytes(), f"bundled:{name}", None
    raise FileNotFoundError(f"{name}: no such file")


def _load(name: str):
    raw, source, base_dir = _read(name)
    return load_json(raw, name), source, base_dir


def _reader(base_dir: Optional[Path]):
    """Resolve model base references next to the model, then as bundled."""
    def read(ref: str) -> bytes:
        if base_dir is not None:
            path = base_dir / ref
            if path.exists():
                return _read(str(path))[0]
        return _read(ref)[0]
    return read


def _is_model(doc) -> bool:
    return isinstance(doc, dict) and ("gamma" in doc or "base" in doc)


def threads() -> int:
    """Parallelism cap from ``GSTRUCT_THREADS`` (all work is sequential)."""
    raw = os.environ.get("GSTRUCT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        print(f"warning: ignoring GSTRUCT_THREADS={raw!r}", file=sys.stderr)
        return 1
    return n


def _working_algebra(spec, cap: int) -> Tuple[GradedLieAlgebra, dict]:
    """The algebra to take cohomology of: the document itself when it is a
    complete algebra with nonnegative part, else its prolongation to ``cap``."""
    alg = spec.algebra
    if not spec.negative_only and alg.order is None:
        return alg, {"source": "document (complete)", "complete": True}
    res = prolong_full(alg, spec.g0, cap=cap)
    info = {"source": f"prolongation to degree {cap}", "verdict": res.verdict,
            "complete": res.algebra.complete, "g0": spec.g0_mode or "full-derivations"}
    return res.algebra, info


def _parse_range(text: str) -> Tuple[int, int]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = (int(a), int(b)) if sep else (int(a), int(a))
    except ValueError:
        raise UsageError(f"--r expects A..B, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def _basis_name(alg: GradedLieAlgebra, u: int) -> List[int]:
    return list(alg.space.basis[u])


def _dims(d: Dict[int, int]) -> Dict[str, int]:
    return {str(p): n for p, n in sorted(d.items())}


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> Tuple[dict, dict]:
    doc, source, base_dir = _load(args.file)
    if _is_model(doc):
        gam, binfo = _build_model(parse_model(doc, reader=_reader(base_dir)))
        from .models import check_admissible
        adm = check_admissible(gam)
        res = {"kind": "model", "name": gam.name, "dim": gam.dim, "N": gam.N,
               "admissible": adm.ok, "violations": adm.violations[:20]}
        prov = {"source": source, "base": binfo}
        if not adm.ok:
            raise CheckFailed(_report(args, res, prov))
        return res, prov
    spec = parse_algebra(doc)
    alg = spec.algebra
    jac = check_jacobi(alg)
    res = {"kind": "algebra", "name": spec.name, "dims": _dims(alg.space.dims),
           "dim": alg.dim, "jacobi": jac.ok, "fundamental": is_fundamental(alg.negative_part()),
           "complete": alg.complete}
    if not jac.ok:
        res["jacobi_witness"] = {"triple": [list(b) for b in jac.witness],
                                 "residual": {f"{p},{i}": c for (p, i), c in sorted(jac.residual.items())}}
    if spec.g0 is not None:
        res["g0_dim"] = spec.g0.dim
        res["g0_mode"] = spec.g0_mode
    if not spec.negative_only:
        tr = check_transitivity(alg)
        res["transitive"] = tr.ok
        if not tr.ok:
            res["transitivity_witness"] = {
                "degree": tr.failing_degree,
                "element": {f"{p},{i}": c for (p, i), c in sorted(tr.kernel_element.items())}}
    ok = jac.ok and res.get("transitive", True)
    prov = {"source": source}
    if not ok:
        raise CheckFailed(_report(args, res, prov))
    return res, prov


def cmd_prolong(args) -> Tuple[dict, dict]:
    doc, source, _ = _load(args.file)
    spec = parse_algebra(doc)
    res = prolong_full(spec.algebra, spec.g0, cap=args.cap)
    out = {"name": spec.name, "dims_by_degree": _dims(res.dims_by_degree),
           "total_dim": res.total_dim, "verdict": res.verdict, "heuristic": res.heuristic,
           "fundamental": res.fundamental}
    if spec.negative_only and res.fundamental and spec.algebra.space.dims.get(-2):
        g0 = spec.g0
        fminus, f0 = tanaka_finite_type_reduction(spec.algebra, g0)
        out["reduction"] = {"f_minus_dim": fminus.dim, "f0_dim": f0.dim}
    prov = {"source": source, "cap": args.cap,
            "g0": spec.g0_mode or ("full-derivations" if spec.negative_only else "document")}
    return out, prov


def cmd_cohomology(args) -> Tuple[dict, dict]:
    from .spencer import coboundary_rank, cochain_basis, cohomology_dim, spencer_slice
    doc, source, _ = _load(args.file)
    spec = parse_algebra(doc)
    lo, hi = _parse_range(args.r)
    depth = -spec.algebra.space.min_degree
    cap = args.cap if args.cap is not None else max(hi + (args.q + 1) * depth, 1)
    alg, info = _working_algebra(spec, cap)
    rows = {}
    square_zero = True
    for r in range(lo, hi + 1):
        rows[str(r)] = {"cochains": len(cochain_basis(alg, args.q, r)),
                        "rank_out": coboundary_rank(alg, args.q, r),
                        "rank_in": coboundary_rank(alg, args.q - 1, r) if args.q > 0 else 0,
                        "h": cohomology_dim(alg, args.q, r)}
        square_zero = square_zero and spencer_slice(alg, r, args.q + 1).check_square_zero()
    out = {"name": spec.name, "q": args.q, "by_degree": rows, "square_zero": square_zero}
    return out, {"source": source, "algebra": info}


def cmd_invariants(args) -> Tuple[dict, dict]:
    from .spencer import invariant_index_sets, quasi_involutive
    doc, source, _ = _load(args.file)
    spec = parse_algebra(doc)
    alg, info = _working_algebra(spec, args.cap + 2 * -spec.algebra.space.min_degree)
    ix = invariant_index_sets(alg, args.cap, args.convention)
    out = {"name": spec.name,
           "h1": _dims(ix.h1), "h2": _dims(ix.h2), "r0": ix.r0, "scan_complete": ix.complete}
    if args.convention in ("section5", "both"):
        out["section5"] = {"I1": ix.I1, "I2": ix.I2,
                           "I2_from_2": [i for i in ix.I2 if i >= 2]}
    if args.convention in ("intro", "both"):
        out["intro"] = {"I1": ix.I1_intro, "I2": ix.I2_intro}
    qi = None
    for ell in range(0, args.cap + 1):
        try:
            if quasi_involutive(alg, ell, args.cap):
                qi = ell
                break
        except TruncationError:
            break
    out["quasi_involutive_from"] = qi
    prov = {"source": source, "cap": args.cap, "convention": args.convention,
            "algebra": info}
    return out, prov


def _vectors_json(vecs: Sequence[Vector]) -> list:
    return [[{"position": k, "num": Fraction(c).numerator, "den": Fraction(c).denominator}
             for k, c in sorted(v.items())] for v in vecs]


def _parse_vectors(doc, path: str, diag: _Diag) -> Dict[int, List[Vector]]:
    out: Dict[int, List[Vector]] = {}
    if not isinstance(doc, dict):
        diag.add(path, "must map degree to a list of vectors")
        return out
    for key, vecs in doc.items():
        try:
            ell = int(key)
        except ValueError:
            diag.add(f"{path}[{key!r}]", "degree key must be an integer")
            continue
        if not isinstance(vecs, list):
            diag.add(f"{path}[{key!r}]", "must be a list of vectors")
            continue
        lst = []
        for j, v in enumerate(vecs):
            vp = f"{path}[{key!r}][{j}]"
            vec: Vector = {}
            if not isinstance(v, list):
                diag.add(vp, "vector must be a list of {position, num, den}")
                continue
            for m, e in enumerate(v):
                if not isinstance(e, dict) or not isinstance(e.get("position"), int):
                    diag.add(f"{vp}[{m}]", "must be {position, num, den}")
                    continue
                c = parse_rational({"num": e.get("num"), "den": e.get("den", 1)}, f"{vp}[{m}]", diag)
                if c:
                    vec[e["position"]] = c
            lst.append(vec)
        out[ell] = lst
    return out


def cmd_complements(args) -> Tuple[dict, dict]:
    from .spencer import ComplementChoice, complement_select, complement_verify
    doc, source, _ = _load(args.file)
    spec = parse_algebra(doc)
    alg, info = _working_algebra(spec, args.cap + 2 * -spec.algebra.space.min_degree + 1)
    if args.check:
        cdoc, csource, _ = _load(args.check)
        diag = _Diag()
        if not isinstance(cdoc, dict):
            raise DocumentError(["<root>: complement document must be an object"])
        W = ComplementChoice(_parse_vectors(cdoc.get("W1", {}), "W1", diag),
                             _parse_vectors(cdoc.get("W2", {}), "W2", diag),
                             str(cdoc.get("label", "user supplied")))
        diag.raise_if_any()
        label = W.label
    else:
        W = complement_select(alg, range(0, args.cap + 1))
        label = W.label
    rep = complement_verify(alg, W)
    out = {"name": spec.name, "complement": label,
           "W1_dims": {str(k): len(v) for k, v in sorted(W.W1.items())},
           "W2_dims": {str(k): len(v) for k, v in sorted(W.W2.items())},
           "ok": rep.ok, "failures": rep.failures}
    prov = {"source": source, "cap": args.cap, "complement": label, "algebra": info}
    if args.check:
        prov["check"] = args.check
    if args.emit:
        emitted = {"label": label, "W1": {str(k): _vectors_json(v) for k, v in sorted(W.W1.items())},
                   "W2": {str(k): _vectors_json(v) for k, v in sorted(W.W2.items())}}
        Path(args.emit).write_text(render_json(emitted), encoding="utf-8")
    if not rep.ok:
        raise CheckFailed(_report(args, out, prov))
    return out, prov


def cmd_condition_c(args) -> Tuple[dict, dict]:
    from .spencer import complement_select, condition_C_check, scan_bound
    doc, source, _ = _load(args.file)
    spec = parse_algebra(doc)
    depth = -spec.algebra.space.min_degree
    alg, info = _working_algebra(spec, args.cap + 2 * depth + 1)
    W = complement_select(alg, range(0, args.cap))
    rep = condition_C_check(alg, W.W2)
    out = {"name": spec.name, "complement": W.label, "degrees": rep.degrees,
           "invariant_under_g0": rep.invariant_under_g0, "witnesses": rep.witnesses,
           "unchecked": rep.unchecked}
    return out, {"source": source, "cap": args.cap, "complement": W.label, "algebra": info}


def _build_model(ms: ModelSpec):
    from .models import ConstantStructureFunction
    spec = ms.base_doc
    N = ms.truncation
    alg = spec.algebra
    if not spec.negative_only and alg.order is None:
        base = alg if alg.top <= N else truncate(alg, N)
        binfo = {"source": "document", "complete": base.complete}
    else:
        # one extra degree lets a vanishing g_{N+1} certify completeness
        res = prolong_full(alg, spec.g0, cap=N + 1)
        base = res.algebra
        if not base.complete or base.top > N:
            base = truncate(base, N)
        binfo = {"source": f"prolongation to degree {N + 1}", "verdict": res.verdict,
                 "complete": base.complete}
    base.name = ms.name
    gam = (ConstantStructureFunction.from_bracket(base) if ms.start == "bracket"
           else ConstantStructureFunction(base))
    diag = _Diag()
    idx = base.space.index
    for n, ((a, b), vec) in enumerate(sorted(ms.entries.items())):
        for ref in (a, b) + tuple(vec):
            if ref not in idx:
                diag.add(f"gamma[{a}, {b}]", f"no basis element {list(ref)} in the base truncation")
        if diag.items:
            continue
        for w, c in sorted(vec.items()):
            gam.add(idx[a], idx[b], idx[w], c)
    diag.raise_if_any()
    return gam, binfo


def cmd_model_check(args) -> Tuple[dict, dict]:
    from .models import (bianchi_residual, check_admissible, corollary_checks,
                         fundamental_residuals, pre_cartan_verdict)
    from .spencer import complement_select, condition_C_check
    doc, source, base_dir = _load(args.file)
    gam, binfo = _build_model(parse_model(doc, reader=_reader(base_dir)))
    run_all = not (args.identities or args.corollaries or args.verdict)
    adm = check_admissible(gam)
    out: dict = {"name": gam.name, "dim": gam.dim, "N": gam.N, "complete": gam.complete,
                 "admissible": adm.ok, "violations": adm.violations[:20]}
    failed = not adm.ok
    prov: dict = {"source": source, "base": binfo}
    if adm.ok and (run_all or args.identities):
        fr = fundamental_residuals(gam)
        br = bianchi_residual(gam)
        out["identities"] = {
            "all_zero": fr.all_zero, "bianchi_zero": br.is_zero,
            "nonzero_by_identity": {str(k): len(v.entries) for k, v in sorted(fr.by_identity.items())},
            "witness": None if br.is_zero else br.witness(gam)}
        failed = failed or not fr.all_zero or not br.is_zero
    if adm.ok and (run_all or args.corollaries):
        cs = corollary_checks(gam)
        names: Dict[str, Dict[str, int]] = {}
        bad = []
        for c in cs:
            s = names.setdefault(c.name, {"checked": 0, "hypothesis_held": 0, "violations": 0})
            s["checked"] += 1
            s["hypothesis_held"] += int(c.hypothesis)
            if not c.ok:
                s["violations"] += 1
                bad.append({"name": c.name, "level": c.level, "detail": c.detail})
        out["corollaries"] = {"summary": names, "violations": bad[:20]}
        failed = failed or bool(bad)
    if adm.ok and (run_all or args.verdict):
        cc = None
        try:
            W = complement_select(gam.base, range(0, max(gam.N, 1)))
            cc = condition_C_check(gam.base, W.W2)
            prov["complement"] = W.label
        except TruncationError:
            prov["complement"] = "not computed (truncation too short)"
        v = pre_cartan_verdict(gam, cc)
        v["condition_C"] = None if cc is None else cc.invariant_under_g0
        out["verdict"] = v
    if failed:
        raise CheckFailed(_report(args, out, prov))
    return out, prov


def cmd_gevrey(args) -> Tuple[dict, dict]:
    import random
    from . import gevrey as gv
    seed = args.seed
    prov = {"seed": seed, "demo": args.demo, "arithmetic": "exact rational"}
    if args.demo == "lemma-a":
        order = 6 if args.order is None else args.order
        count = 100 if args.samples is None else args.samples
        rep = gv.lemma_a_check(gv.lemma_a_samples(seed, count, 3, order))
        by = {}
        for t in rep.tight:
            by[t["property"]] = by.get(t["property"], 0) + 1
        out = {"samples": rep.samples, "checks": rep.checks, "ok": rep.ok,
               "failures": rep.failures[:20], "tight_by_property": dict(sorted(by.items()))}
        prov["max_order"] = order
        if not rep.ok:
            raise CheckFailed(_report(args, out, prov))
        return out, prov
    if args.demo == "expansion":
        k_max = 4 if args.order is None else args.order
        count = 20 if args.samples is None else args.samples
        rng = random.Random(seed)
        frames = []
        for f in range(count):
            n = 2 + f % 2
            X = gv.random_polynomial_frame(n, rng, order=k_max + 2)
            u = gv.random_polynomial(n, k_max + 2, k_max + 2, rng)
            zero = all(gv.expansion_verify(u, X, k).is_zero for k in range(1, k_max + 1))
            frames.append({"n": n, "residual_zero": zero})
        A = gv.frame_matrix(gv.shear_frame(k_max + 2))
        ft = gv.phi_tensors(A, k_max)
        counts = {f"{k},{i}": c for (k, i), c in sorted(ft.path_counts.items())}
        out = {"frames": frames, "all_zero": all(f["residual_zero"] for f in frames),
               "path_counts": counts,
               "path_bound_holds": all(c <= 2 ** k for (k, _), c in ft.path_counts.items())}
        prov["k_max"] = k_max
        if not out["all_zero"]:
            raise CheckFailed(_report(args, out, prov))
        return out, prov
    ell = 8 if args.order is None else args.order
    rho = Fraction(args.rho)
    f = gv.FormalSeries.geometric(2, ell)
    table = {
        "coordinate": gv.estimate_profile(f, gv.identity_frame(2, ell), ell, rho),
        "shear": gv.estimate_profile(f, gv.shear_frame(ell), ell, rho)}
    out = {"rho": rho, "profiles": {k: [v for _, v in t] for k, t in table.items()},
           "max": {k: max(v for _, v in t) for k, t in table.items()}}
    prov["ell_max"] = ell
    return out, prov


COMMANDS = {
    "validate": cmd_validate, "prolong": cmd_prolong, "cohomology": cmd_cohomology,
    "invariants": cmd_invariants, "complements": cmd_complements,
    "condition-c": cmd_condition_c, "model-check": cmd_model_check, "gevrey": cmd_gevrey,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    p = _Parser(prog="gstruct", description="Exact computations for graded Lie algebras "
                "and constant structure functions.")
    p.add_argument("--version", action="version", version=f"gstruct {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    s = sub.add_parser("validate", parents=[common], help="check an algebra or model document")
    s.add_argument("file")
    s = sub.add_parser("prolong", parents=[common], help="graded prolongation")
    s.add_argument("--cap", type=int, default=6)
    s.add_argument("file")
    s = sub.add_parser("cohomology", parents=[common], help="generalized Spencer cohomology")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--r", required=True, help="degree range A..B")
    s.add_argument("--cap", type=int, default=None, help="prolongation degree (default: enough)")
    s.add_argument("file")
    s = sub.add_parser("invariants", parents=[common], help="index sets of essential invariants")
    s.add_argument("--cap", type=int, default=6)
    s.add_argument("--convention", choices=("intro", "section5", "both"), default="both")
    s.add_argument("file")
    s = sub.add_parser("complements", parents=[common], help="select or check complements")
    s.add_argument("--cap", type=int, default=4)
    s.add_argument("--check", metavar="FILE")
    s.add_argument("--emit", metavar="FILE", help="write the selected complements")
    s.add_argument("file")
    s = sub.add_parser("condition-c", parents=[common], help="degree-0 invariance of W2")
    s.add_argument("--cap", type=int, default=4)
    s.add_argument("file")
    s = sub.add_parser("model-check", parents=[common], help="check a constant structure function")
    s.add_argument("--identities", action="store_true")
    s.add_argument("--corollaries", action="store_true")
    s.add_argument("--verdict", action="store_true")
    s.add_argument("file")
    s = sub.add_parser("gevrey", parents=[common], help="power series demos")
    s.add_argument("--demo", choices=("lemma-a", "expansion", "profile"), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--order", type=int, default=None)
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--rho", default="2")
    return p


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "format", "file")}


def _report(args, results: dict, prov: dict) -> dict:
    files = [args.file] if getattr(args, "file", None) else []
    base = {"package": "gstruct", "version": __version__, "arithmetic": "exact rational"}
    base.update(prov)
    return {"command": {"name": args.command, "flags": _flags(args), "files": files},
            "results": results, "provenance": base}


def _emit(report: dict, fmt: str, stream) -> None:
    stream.write(render_json(report) if fmt == "json" else render_text(report))


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing command")
    except UsageError as exc:
        stderr.write(f"gstruct: {exc}\n")
        return EXIT_USAGE
    threads()
    fmt = args.format
    try:
        if args.command == "gevrey":
            try:
                Fraction(args.rho)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"--rho expects a rational, got {args.rho!r}") from None
        results, prov = COMMANDS[args.command](args)
    except UsageError as exc:
        stderr.write(f"gstruct: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        stderr.write(f"gstruct: unreadable file: {exc}\n")
        return EXIT_NOINPUT
    except DocumentError as exc:
        for d in exc.diagnostics:
            stderr.write(f"schema: {d}\n")
        return EXIT_SCHEMA
    except SchemaError as exc:
        stderr.write(f"schema: {exc}\n")
        return EXIT_SCHEMA
    except CheckFailed as exc:
        _emit(exc.report, fmt, stdout)
        return EXIT_INVALID
    except (ValidationError, TruncationError) as exc:
        stderr.write(f"invalid: {exc}\n")
        w = getattr(exc, "witness", None)
        if w is not None:
            stderr.write(f"witness: {w}\n")
        return EXIT_INVALID
    except GStructError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    _emit(_report(args, results, prov), fmt, stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
