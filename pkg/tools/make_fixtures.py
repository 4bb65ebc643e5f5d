"""Regenerate fixtures/: inputs, a manifest of CLI runs, and golden outputs.

Run from the repository root: ``python tools/make_fixtures.py``. Golden
files are whatever the CLI prints today, so review the diff before
committing a regeneration.
"""

import contextlib
import io
import json
import os
import sys

import numpy as np

from semicanon.backend import EXACT
from semicanon.cli import main
from semicanon.reduced import group_sample, littlewood
from semicanon.semiunitary import SemiunitarySpace, random_kv
from semicanon.serialize import SCHEMA_VERSION, MatrixDocument, dumps

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
INP = os.path.join(ROOT, "inputs")
GOLD = os.path.join(ROOT, "golden")


def write(name, doc):
    with open(os.path.join(INP, name), "w", encoding="utf-8") as fh:
        fh.write(dumps(doc) if isinstance(doc, dict) else doc.dumps())


def kv(rows, m, backend="exact"):
    return {"schema_version": SCHEMA_VERSION, "backend": backend, "space": {"n": len(rows), "m": m}, "entries": rows}


def sys_doc(rows, spec, backend="exact"):
    return {"schema_version": SCHEMA_VERSION, "backend": backend, "spec": spec, "entries": rows}


def build_inputs():
    write("j2_0_l1.json", kv([["0", "0"], ["1", "0"]], 1))
    write("zero2_m1.json", kv([["0", "0"], ["0", "0"]], 1))
    write("unbounded.json", kv([["0", "1"], ["0", "0"]], 1))
    write("pair1.json", kv([["0", "1"], ["1", "0"]], 1))
    write("realdiag3.json", kv([["3"]], 1))
    write("nonhermitian.json", kv([["0", "1"], ["0", "0"]], 1))
    write("j3_5_l1.json", kv([["5", "0", "0"], ["1", "5", "0"], ["0", "1", "5"]], 1))
    write("selfadjoint_i.json", kv([["i"]], 1))
    lw = {"builtin": "littlewood", "n": 2}
    write("littlewood_a.json", sys_doc([["0", "1"], ["0", "0"]], lw))
    write("littlewood_b.json", sys_doc([["0", "2"], ["0", "0"]], lw))
    M = EXACT.asarray([["2", "0"], ["4", "1"]])
    S = group_sample(littlewood(2), 11)
    N = EXACT.mm(EXACT.inv(S), M, S)
    write("littlewood_m.json", MatrixDocument(M, "exact", spec=littlewood(2)))
    write("littlewood_conj.json", MatrixDocument(N, "exact", spec=littlewood(2)))
    bel = {"builtin": "belitskii", "n": 2}
    write("belitskii_nil_a.json", sys_doc([["0", "1"], ["0", "0"]], bel))
    write("belitskii_nil_b.json", sys_doc([["0", "0"], ["3", "0"]], bel))
    quiver = {
        "schema_version": SCHEMA_VERSION,
        "backend": "exact",
        "quiver": {
            "vertices": [{"name": "u", "n": 2, "m": 1}, {"name": "v", "n": 1, "m": 1}],
            "arrows": [
                {"name": "a", "source": "u", "target": "v"},
                {"name": "b", "source": "u", "target": "v"},
                {"name": "c", "source": "v", "target": "u"},
            ],
        },
        "matrices": {"a": [["1", "2"]], "b": [["0", "i"]], "c": [["1"], ["-1"]]},
    }
    write("quiver_kronecker.json", quiver)
    # float corpus for the float-backend sanity check
    for k in range(6):
        rng = np.random.default_rng([2024, k])
        n = 2 + k % 5
        m = 1 + k % (n - 1) if n > 1 else 0
        sp = SemiunitarySpace(n, m)
        A = random_kv(sp, "seminormal", rng)
        write(f"float_seminormal_{k}.json", MatrixDocument(EXACT.to_complex(A.mat), "float", (n, m)))
        F = random_kv(sp, "hermitian-form", rng)
        write(f"float_hermitian_{k}.json", MatrixDocument(EXACT.to_complex(F.mat), "float", (n, m)))
        B = random_kv(SemiunitarySpace(n, 0), "seminormal", rng)
        doc = MatrixDocument(EXACT.to_complex(B.mat), "float")
        d = doc.to_dict()
        d["spec"] = {"builtin": "belitskii", "n": n}
        write(f"float_belitskii_{k}.json", d)


def runs():
    """(golden name, argv, expected exit)."""
    out = [
        ("canon_op_j2", ["canon-op", "--in", "j2_0_l1.json", "--witness"], 0),
        ("canon_op_zero2", ["canon-op", "--in", "zero2_m1.json"], 0),
        ("canon_op_unbounded", ["canon-op", "--in", "unbounded.json"], 2),
        ("canon_op_selfadjoint_i", ["canon-op", "--in", "selfadjoint_i.json", "--mode", "selfadjoint"], 2),
        ("canon_op_metric_i", ["canon-op", "--in", "selfadjoint_i.json", "--mode", "metric"], 0),
        ("canon_form_pair1", ["canon-form", "--in", "pair1.json", "--witness"], 0),
        ("canon_form_realdiag3", ["canon-form", "--in", "realdiag3.json"], 0),
        ("canon_form_nonhermitian", ["canon-form", "--in", "nonhermitian.json"], 2),
        ("check_littlewood_pair", ["check-similar", "--a", "littlewood_a.json", "--b", "littlewood_b.json"], 10),
        ("check_littlewood_conj", ["check-similar", "--a", "littlewood_m.json", "--b", "littlewood_conj.json"], 0),
        ("check_belitskii_nil", ["check-similar", "--a", "belitskii_nil_a.json", "--b", "belitskii_nil_b.json"], 0),
        ("canon_sys_littlewood", ["canon-sys", "--in", "littlewood_b.json", "--witness"], 0),
        ("canon_sys_quiver", ["canon-sys", "--quiver", "quiver_kronecker.json", "--witness"], 0),
        ("canon_sys_kv", ["canon-sys", "--in", "j3_5_l1.json", "--witness"], 0),
        ("verify_t22_j3", ["verify-t22", "--in", "j3_5_l1.json"], 0),
        ("gen_seminormal_7", ["gen", "--profile", "seminormal", "--seed", "7"], 0),
    ]
    for k in range(6):
        out.append((f"float_canon_op_{k}", ["canon-op", "--in", f"float_seminormal_{k}.json", "--witness"], 0))
        out.append((f"float_canon_form_{k}", ["canon-form", "--in", f"float_hermitian_{k}.json", "--witness"], 0))
        out.append((f"float_canon_sys_{k}", ["canon-sys", "--in", f"float_belitskii_{k}.json", "--witness"], 0))
    return out


def run_cli(argv):
    buf, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(INP)
    try:
        with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
            code = main(argv)
    finally:
        os.chdir(cwd)
    return code, buf.getvalue()


def main_():
    os.makedirs(INP, exist_ok=True)
    os.makedirs(GOLD, exist_ok=True)
    build_inputs()
    manifest = []
    for name, argv, want in runs():
        code, text = run_cli(argv)
        if code != want:
            sys.exit(f"{name}: exit {code}, expected {want}")
        entry = {"name": name, "argv": argv, "exit": want}
        if text:
            entry["golden"] = f"{name}.json"
            with open(os.path.join(GOLD, entry["golden"]), "w", encoding="utf-8") as fh:
                fh.write(text)
        manifest.append(entry)
    with open(os.path.join(ROOT, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, indent=2) + "\n")
    print(f"{len(manifest)} runs recorded")


if __name__ == "__main__":
    main_()
