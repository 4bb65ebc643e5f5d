"""Command-line front end.

Exit codes: 0 success (or "similar"), 1 unreadable input, 2 violated
precondition, 3 numeric failure, 10 "not similar" from check-similar,
70 unexpected internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .backend import Backend, ct, get_backend
from .errors import ContractViolation, InternalInconsistency, MalformedInput, NumericFailure
from .hermitian import hermitian_canon
from .operators import (
    is_bounded,
    metric_canon,
    selfadjoint_canon,
    seminormal_canonical_basis,
    seminormal_summands,
    t22_instance,
    verify_t22,
)
from .reduced import QuiverSpec, canonicalize, is_group_member, kv_to_isotropic_first, quiver_encode
from .reduced.spec import belitskii, semiunitary_similarity
from .scalars import DEFAULT_POLICY, TolerancePolicy
from .semiunitary import PROFILES, KVMatrix, SemiunitarySpace, random_kv, summands_to_kv
from .serialize import (
    SCHEMA_VERSION,
    MatrixDocument,
    ResultDocument,
    decode_matrix,
    dumps,
    spec_from_dict,
)

EXIT_OK, EXIT_PARSE, EXIT_CONTRACT, EXIT_NUMERIC, EXIT_NOT_SIMILAR, EXIT_INTERNAL = 0, 1, 2, 3, 10, 70

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------- helpers


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise MalformedInput(f"cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{path}: invalid JSON: {e}") from e


def _policy(args) -> TolerancePolicy:
    base = DEFAULT_POLICY
    tol = args.tol if args.tol is not None else base.cluster_eps
    zero = args.zero_eps if args.zero_eps is not None else base.zero_eps
    return TolerancePolicy(zero_eps=zero, cluster_eps=tol, rank_rel_eps=zero)


def _backend_name(args, doc: dict | None = None) -> str:
    """--backend beats the document, which beats SEMICANON_BACKEND."""
    if args.backend:
        return args.backend
    if doc is not None and isinstance(doc, dict) and doc.get("backend"):
        return doc["backend"]
    return "exact" if get_backend().exact else "float"


def _bk(name: str, args) -> Backend:
    return get_backend(name, _policy(args)) if name == "float" else get_backend(name)


def _load_matrix(path: str, args) -> tuple[MatrixDocument, Backend]:
    raw = _read_json(path)
    name = _backend_name(args, raw)
    doc = MatrixDocument.from_dict(raw, name)
    return doc, _bk(name, args)


def _load_kv(path: str, args) -> tuple[KVMatrix, MatrixDocument]:
    doc, bk = _load_matrix(path, args)
    if doc.space is None:
        raise MalformedInput(f"{path}: a k-v matrix document needs a space {{n, m}}")
    return KVMatrix(doc.entries, doc.space[1], bk), doc


def _scale(bk, *mats):
    return float(np.prod([max(1.0, bk.norm(M)) for M in mats])) * 1e3


def _replay_similarity(A: KVMatrix, S, C) -> None:
    """Re-multiply A S and S C and check the transform shape independently."""
    bk = A.bk
    m = A.m
    if S.shape != A.mat.shape:
        raise InternalInconsistency("witness has the wrong shape")
    if not bk.is_zero_matrix(S[:m, m:], scale=_scale(bk, S)):
        raise InternalInconsistency("witness is not block lower triangular")
    if not bk.is_unitary(S[:m, :m]):
        raise InternalInconsistency("witness leading block is not unitary")
    if bk.rank(S[m:, m:]) < A.n - m:
        raise InternalInconsistency("witness trailing block is singular")
    lhs, rhs = bk.mm(A.mat, S), bk.mm(S, C)
    ok = bk.equal(lhs, rhs) if bk.exact else bk.is_zero_matrix(lhs - rhs, scale=_scale(bk, A.mat, S))
    if not ok:
        raise InternalInconsistency("witness replay failed: A S != S C")


def _replay_congruence(F: KVMatrix, S, C) -> None:
    bk = F.bk
    m = F.m
    if not bk.is_zero_matrix(S[:m, m:], scale=_scale(bk, S)) or not bk.is_unitary(S[:m, :m]):
        raise InternalInconsistency("witness is not a semiunitary transform")
    if bk.rank(S) < F.n:
        raise InternalInconsistency("witness is singular")
    out = bk.mm(ct(S), F.mat, S)
    ok = bk.equal(out, C) if bk.exact else bk.is_zero_matrix(out - C, scale=_scale(bk, F.mat, S, S))
    if not ok:
        raise InternalInconsistency("witness replay failed: S* F S != C")


def _replay_system(M, S, M_can, spec, bk) -> None:
    lhs, rhs = bk.mm(M, S), bk.mm(S, M_can)
    if bk.exact:
        ok = bk.equal(lhs, rhs) and is_group_member(S, spec, bk)
    else:
        ok = bk.is_zero_matrix(lhs - rhs, scale=_scale(bk, M, S)) and is_group_member(
            S, spec, bk, scale=_scale(bk, S)
        )
    if not ok:
        raise InternalInconsistency("witness replay failed for the block system")


def _emit(doc, out=None) -> None:
    text = doc.dumps() if hasattr(doc, "dumps") else dumps(doc)
    (out or sys.stdout).write(text)


def _policy_echo(name, args):
    return _policy(args) if name == "float" else None


# ---------------------------------------------------------------- commands


def cmd_canon_op(args) -> int:
    A, doc = _load_kv(args.input, args)
    if not is_bounded(A):
        raise ContractViolation("operator is not bounded (nonzero upper-right block)")
    fn = {"seminormal": seminormal_summands, "selfadjoint": selfadjoint_canon, "metric": metric_canon}[args.mode]
    summands = fn(A)
    res = ResultDocument("canon-op", doc.backend, summands=summands, policy=_policy_echo(doc.backend, args))
    res.extra = {"mode": args.mode, "space": {"n": A.n, "m": A.m}}
    if args.witness:
        S, C = seminormal_canonical_basis(A)
        expected = summands_to_kv(summands, A.bk).mat
        same = A.bk.equal(C.mat, expected) if A.bk.exact else A.bk.is_zero_matrix(
            C.mat - expected, scale=_scale(A.bk, expected)
        )
        if not same:
            raise InternalInconsistency("canonical basis and summand list disagree")
        _replay_similarity(A, S.full, expected)
        res.witness = S.full
    _emit(res)
    return EXIT_OK


def cmd_canon_form(args) -> int:
    F, doc = _load_kv(args.input, args)
    tr, summands = hermitian_canon(F)
    res = ResultDocument("canon-form", doc.backend, summands=summands, policy=_policy_echo(doc.backend, args))
    res.extra = {"space": {"n": F.n, "m": F.m}}
    if args.witness:
        C = summands_to_kv(summands, F.bk).mat
        _replay_congruence(F, tr.full, C)
        res.witness = tr.full
    _emit(res)
    return EXIT_OK


def _system_input(args):
    """(M, spec, backend name, bk) from --in or --quiver."""
    if args.quiver:
        raw = _read_json(args.quiver)
        if not isinstance(raw, dict) or raw.get("schema_version") != SCHEMA_VERSION:
            raise MalformedInput("quiver document needs schema_version")
        name = _backend_name(args, raw)
        bk = _bk(name, args)
        try:
            q = QuiverSpec.from_dict(raw["quiver"])
            dims = q.dims()
            mats = {}
            for a, s, t in q.arrows:
                mats[a] = decode_matrix(raw["matrices"][a], bk, (dims[t][0], dims[s][0]))
        except (KeyError, TypeError) as e:
            raise MalformedInput(f"bad quiver document: {e}") from e
        M, spec = quiver_encode(q, mats, bk)
        return M, spec, name, bk
    if not args.input:
        raise MalformedInput("need --in or --quiver")
    doc, bk = _load_matrix(args.input, args)
    if doc.spec is not None:
        spec = doc.spec
        M = doc.entries
    elif doc.space is not None:
        n, m = doc.space
        spec = semiunitary_similarity(n, m)
        M = kv_to_isotropic_first(doc.entries, m)
    else:
        spec = belitskii(doc.entries.shape[0])
        M = doc.entries
    return M, spec, doc.backend, bk


def cmd_canon_sys(args) -> int:
    M, spec, name, bk = _system_input(args)
    spec.validate(bk)
    r = canonicalize(M, spec, bk)
    res = ResultDocument(
        "canon-sys", name, canonical=r.M_can, step_log=r.step_log, spec=spec, policy=_policy_echo(name, args)
    )
    res.extra = {"label": r.label, "final_blocks": r.spec.t, "final_algebra_dim": r.spec.dimension(bk)}
    if args.witness:
        _replay_system(M, r.S, r.M_can, spec, bk)
        res.witness = r.S
    _emit(res)
    return EXIT_OK


def _system_from_doc(doc: MatrixDocument, spec):
    if spec is not None:
        return doc.entries, spec
    if doc.spec is not None:
        return doc.entries, doc.spec
    if doc.space is not None:
        n, m = doc.space
        return kv_to_isotropic_first(doc.entries, m), semiunitary_similarity(n, m)
    return doc.entries, belitskii(doc.entries.shape[0])


def cmd_check_similar(args) -> int:
    raw_a, raw_b = _read_json(args.a), _read_json(args.b)
    name = _backend_name(args, raw_a)
    bk = _bk(name, args)
    da = MatrixDocument.from_dict(raw_a, name)
    db = MatrixDocument.from_dict(raw_b, name)
    spec = None
    if args.spec:
        raw = _read_json(args.spec)
        spec = spec_from_dict(raw.get("spec", raw) if isinstance(raw, dict) else raw, bk)
    Ma, sa = _system_from_doc(da, spec)
    Mb, sb = _system_from_doc(db, spec)
    if sa.to_dict() != sb.to_dict() or Ma.shape != Mb.shape:
        raise ContractViolation("the two inputs live in different block systems")
    sa.validate(bk)
    ra = canonicalize(Ma, sa, bk)
    rb = canonicalize(Mb, sa, bk)
    if bk.exact:
        same = bk.equal(ra.M_can, rb.M_can)
    else:
        sc = max(1.0, bk.norm(ra.M_can), bk.norm(rb.M_can))
        same = bool(np.max(np.abs(ra.M_can - rb.M_can), initial=0.0) <= bk.policy.cluster_eps * sc)
    res = ResultDocument(
        "check-similar",
        name,
        canonical=ra.M_can,
        verdict={"similar": same, "label": ra.label},
        spec=sa,
        policy=_policy_echo(name, args),
    )
    res.extra = {"canonical_b": rb.M_can}
    _emit(res)
    return EXIT_OK if same else EXIT_NOT_SIMILAR


def cmd_verify_t22(args) -> int:
    A, doc = _load_kv(args.input, args)
    rep = verify_t22(A, assert_indecomposable=not args.no_assert)
    body = {
        "all_pass": rep.all_pass,
        "indecomposable_asserted": rep.indecomposable_asserted,
        "eigenvalues": [
            {
                "lambda": e.lam,
                "shared": e.shared,
                "alg_mult_A1": e.alg_mult_A1,
                "geom_mult_A0": e.geom_mult_A0,
                "geom_mult_A1": e.geom_mult_A1,
                "jordan_counts_A0": {str(k): v for k, v in e.jordan_counts_A0.items()},
                "checks": e.checks,
            }
            for e in rep.eigenvalues
        ],
    }
    _emit(ResultDocument("verify-t22", doc.backend, report=body, policy=_policy_echo(doc.backend, args)))
    return EXIT_OK


GEN_PROFILES = PROFILES + ("t22",)


def _t22_shape(n, m, rng):
    """Chain counts filling n - m isotropic dimensions with at most m chains."""
    k = n - m
    if m < 1 or k < 1:
        raise ContractViolation("t22 profile needs 0 < m < n")
    sizes = []
    left = k
    while left:
        slots = m - len(sizes)
        lo = -(-left // slots)  # ceiling: enough length to fit in the remaining slots
        s = int(rng.integers(lo, left + 1))
        sizes.append(s)
        left -= s
    counts = [0] * max(sizes)
    for s in sizes:
        counts[s - 1] += 1
    return counts


def cmd_gen(args) -> int:
    n = args.n
    m = args.m if args.m is not None else n // 2
    if not 0 <= m <= n:
        raise ContractViolation("need 0 <= m <= n")
    name = args.backend or ("exact" if get_backend().exact else "float")
    rng = np.random.default_rng(args.seed)
    if args.profile == "t22":
        A = t22_instance(m, _t22_shape(n, m, rng), lam=0, seed=int(rng.integers(0, 2**31)), conjugate=True)
    else:
        A = random_kv(SemiunitarySpace(n, m), args.profile, rng)
    entries = A.mat if name == "exact" else A.bk.to_complex(A.mat)
    _emit(MatrixDocument(entries, name, (n, m)))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(trials=args.trials, seed=args.seed, jobs=args.jobs)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    print(f"{len(results) - len(failed)}/{len(results)} suites passed (trials={args.trials}, seed={args.seed})")
    return EXIT_OK if not failed else EXIT_NUMERIC


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semicanon", description="Canonical forms on semiunitary spaces.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["exact", "float"], default=None,
                        help="arithmetic backend (default: document field, then SEMICANON_BACKEND, then exact)")
    common.add_argument("--tol", type=float, default=None, help="float backend clustering tolerance")
    common.add_argument("--zero-eps", type=float, default=None, help="float backend zero and rank tolerance")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("canon-op", parents=[common], help="canonical summands of a bounded operator")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--mode", choices=["seminormal", "selfadjoint", "metric"], default="seminormal")
    s.add_argument("--witness", action="store_true")
    s.set_defaults(func=cmd_canon_op)

    s = sub.add_parser("canon-form", parents=[common], help="canonical summands of a Hermitian form")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--witness", action="store_true")
    s.set_defaults(func=cmd_canon_form)

    s = sub.add_parser("canon-sys", parents=[common], help="canonical matrix under a reduced algebra")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--in", dest="input")
    g.add_argument("--quiver")
    s.add_argument("--witness", action="store_true")
    s.set_defaults(func=cmd_canon_sys)

    s = sub.add_parser("check-similar", parents=[common], help="exit 0 if similar, 10 if not")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--spec", default=None, help="spec file (overrides the documents)")
    s.set_defaults(func=cmd_check_similar)

    s = sub.add_parser("verify-t22", parents=[common], help="multiplicity report of a bounded operator")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--no-assert", action="store_true", help="do not mark the input as asserted indecomposable")
    s.set_defaults(func=cmd_verify_t22)

    s = sub.add_parser("gen", parents=[common], help="deterministic random k-v matrix")
    s.add_argument("--profile", choices=GEN_PROFILES, default="general")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except MalformedInput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ContractViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except NumericFailure as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:  # pragma: no cover - safety net
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
