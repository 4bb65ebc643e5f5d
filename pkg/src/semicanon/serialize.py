"""JSON wire format for matrices, specs and results.

Exact scalars travel as strings such as ``"1/2-3i"``; float scalars as
``[re, im]`` pairs. Every document carries ``schema_version``. Output is
produced with sorted keys so equal documents are equal bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from numbers import Number

import numpy as np
from gmpy2 import mpq

from .backend import EXACT, Backend, get_backend
from .errors import MalformedInput
from .reduced.spec import ReducedAlgebraSpec, belitskii, littlewood, semiunitary_similarity
from .scalars import GaussQ, TolerancePolicy, format_gauss, parse_gauss, to_gauss
from .semiunitary import HermitianSummand, OperatorSummand

__all__ = [
    "SCHEMA_VERSION",
    "MatrixDocument",
    "ResultDocument",
    "decode_matrix",
    "decode_scalar",
    "decode_summand",
    "dumps",
    "encode_matrix",
    "encode_scalar",
    "encode_summand",
    "jsonable",
    "spec_from_dict",
    "spec_to_dict",
]

SCHEMA_VERSION = 1

BUILTIN_SPECS = {
    "belitskii": lambda d: belitskii(int(d["n"])),
    "littlewood": lambda d: littlewood(int(d["n"])),
    "semiunitary_similarity": lambda d: semiunitary_similarity(int(d["n"]), int(d["m"])),
}


# ---------------------------------------------------------------- scalars


def encode_scalar(x, exact: bool):
    if exact:
        return format_gauss(to_gauss(x))
    z = complex(x)
    return [z.real, z.imag]


def decode_scalar(v, exact: bool):
    """Exact mode accepts strings and integers; float mode also accepts pairs."""
    if isinstance(v, bool):
        raise MalformedInput(f"boolean is not a scalar: {v!r}")
    if isinstance(v, str):
        g = parse_gauss(v)
        return g if exact else complex(g)
    if isinstance(v, int):
        return GaussQ(v) if exact else complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(t, Number) and not isinstance(t, bool) for t in v
    ):
        re, im = float(v[0]), float(v[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise MalformedInput(f"non-finite scalar {v!r}")
        # a float pair read exactly keeps its binary value
        return GaussQ(mpq(re), mpq(im)) if exact else complex(re, im)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise MalformedInput(f"non-finite scalar {v!r}")
        return GaussQ(mpq(v)) if exact else complex(v)
    raise MalformedInput(f"cannot read scalar {v!r}")


def encode_matrix(M, exact: bool):
    M = np.asarray(M)
    return [[encode_scalar(x, exact) for x in row] for row in M]


def decode_matrix(rows, bk: Backend, shape=None):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInput("entries must be a list of rows")
    r = len(rows)
    c = len(rows[0]) if rows else (shape[1] if shape else 0)
    if any(len(row) != c for row in rows):
        raise MalformedInput("rows have different lengths")
    if shape is not None and (r, c) != tuple(shape):
        raise MalformedInput(f"expected a {shape[0]} x {shape[1]} matrix, got {r} x {c}")
    M = bk.zeros(r, c)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            M[i, j] = decode_scalar(v, bk.exact)
    return M


# ---------------------------------------------------------------- summands


def encode_summand(s, exact: bool) -> dict:
    if isinstance(s, OperatorSummand):
        return {"type": "operator", "n": s.n, "lambda": encode_scalar(s.lam, exact), "l": s.l}
    if isinstance(s, HermitianSummand):
        d = {"type": "hermitian", "kind": s.kind}
        if s.kind == "RealDiag1":
            d["lambda"] = encode_scalar(s.value, exact)
        return d
    raise MalformedInput(f"unknown summand {s!r}")


def decode_summand(d: dict, exact: bool):
    try:
        if d["type"] == "operator":
            return OperatorSummand(int(d["n"]), decode_scalar(d["lambda"], exact), int(d["l"]))
        if d["type"] == "hermitian":
            val = decode_scalar(d["lambda"], exact) if d["kind"] == "RealDiag1" else None
            return HermitianSummand(d["kind"], val)
    except (KeyError, TypeError) as e:
        raise MalformedInput(f"bad summand {d!r}") from e
    raise MalformedInput(f"unknown summand type {d.get('type')!r}")


# ---------------------------------------------------------------- specs


def spec_to_dict(spec: ReducedAlgebraSpec, exact: bool = True) -> dict:
    d = spec.to_dict()
    d["equations"] = [
        [[i, j, encode_scalar(c, exact)] for (i, j), c in eq.items()] for eq in spec.equations
    ]
    return d


def spec_from_dict(d: dict, bk: Backend = EXACT) -> ReducedAlgebraSpec:
    """Either ``{"builtin": name, ...}`` or the explicit sizes/classes/... form."""
    if not isinstance(d, dict):
        raise MalformedInput("spec must be an object")
    if "builtin" in d:
        try:
            return BUILTIN_SPECS[d["builtin"]](d)
        except KeyError as e:
            raise MalformedInput(f"unknown builtin spec or missing field: {e}") from e
    try:
        sizes = [int(s) for s in d["sizes"]]
        classes = d.get("classes", list(range(len(sizes))))
        equiv = [(i, int(c)) for i, c in enumerate(classes)]
        equations = [
            {(int(i), int(j)): decode_scalar(c, True) for i, j, c in eq} for eq in d.get("equations", [])
        ]
        unitary = [int(u) for u in d.get("unitary", [])]
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedInput(f"bad spec document: {e}") from e
    return ReducedAlgebraSpec.build(sizes, equiv, equations, unitary, validate=False)


# ---------------------------------------------------------------- generic


def jsonable(x, exact: bool = True):
    """Recursively turn scalars, arrays and tuples into JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v, exact) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v, exact) for v in x]
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return encode_matrix(x, exact)
        return [jsonable(v, exact) for v in x.tolist()]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (GaussQ, complex, np.complexfloating)) or type(x) is type(mpq(0)):
        return encode_scalar(x, exact)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return str(x)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _check_version(d: dict):
    v = d.get("schema_version")
    if v != SCHEMA_VERSION:
        raise MalformedInput(f"unsupported schema_version {v!r}")


# ---------------------------------------------------------------- documents


@dataclass
class MatrixDocument:
    """A k-v matrix (``space``), a reduced-algebra input (``spec``) or both absent."""

    entries: np.ndarray
    backend: str = "exact"
    space: tuple | None = None
    spec: ReducedAlgebraSpec | None = None

    def __post_init__(self):
        n, c = self.entries.shape
        if self.space is not None:
            N, m = self.space
            if (N, N) != (n, c) or not 0 <= m <= N:
                raise MalformedInput(f"space {self.space} does not fit a {n} x {c} matrix")
        if self.spec is not None and (sum(self.spec.sizes), sum(self.spec.sizes)) != (n, c):
            raise MalformedInput("spec sizes do not add up to the matrix size")

    @property
    def bk(self) -> Backend:
        return get_backend(self.backend)

    def to_dict(self) -> dict:
        exact = self.backend == "exact"
        d = {
            "schema_version": SCHEMA_VERSION,
            "backend": self.backend,
            "entries": encode_matrix(self.entries, exact),
        }
        if self.space is not None:
            d["space"] = {"n": int(self.space[0]), "m": int(self.space[1])}
        if self.spec is not None:
            d["spec"] = spec_to_dict(self.spec, exact)
        return d

    @classmethod
    def from_dict(cls, d: dict, backend: str | None = None) -> "MatrixDocument":
        if not isinstance(d, dict):
            raise MalformedInput("document must be a JSON object")
        _check_version(d)
        name = backend or d.get("backend") or ("exact" if get_backend().exact else "float")
        bk = get_backend(name)
        if "entries" not in d:
            raise MalformedInput("document has no entries")
        space = None
        if "space" in d:
            try:
                space = (int(d["space"]["n"]), int(d["space"]["m"]))
            except (KeyError, TypeError, ValueError) as e:
                raise MalformedInput("space needs integer n and m") from e
        shape = (space[0], space[0]) if space else None
        M = decode_matrix(d["entries"], bk, shape)
        spec = spec_from_dict(d["spec"], bk) if "spec" in d else None
        return cls(M, name, space, spec)

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str, backend: str | None = None) -> "MatrixDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from e
        return cls.from_dict(d, backend)

    def __eq__(self, other):
        if not isinstance(other, MatrixDocument):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass
class ResultDocument:
    """Output of a command. Absent parts are omitted from the JSON."""

    command: str
    backend: str = "exact"
    summands: list | None = None
    witness: np.ndarray | None = None
    canonical: np.ndarray | None = None
    step_log: list | None = None
    report: dict | None = None
    verdict: dict | None = None
    spec: ReducedAlgebraSpec | None = None
    policy: TolerancePolicy | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.backend == "exact"

    def to_dict(self) -> dict:
        ex = self.exact
        d = {"schema_version": SCHEMA_VERSION, "command": self.command, "backend": self.backend}
        if self.summands is not None:
            d["summands"] = [encode_summand(s, ex) for s in self.summands]
        if self.witness is not None:
            d["witness"] = encode_matrix(self.witness, ex)
        if self.canonical is not None:
            d["canonical"] = encode_matrix(self.canonical, ex)
        if self.step_log is not None:
            d["step_log"] = jsonable(self.step_log, ex)
        if self.report is not None:
            d["report"] = jsonable(self.report, ex)
        if self.verdict is not None:
            d["verdict"] = jsonable(self.verdict, ex)
        if self.spec is not None:
            d["spec"] = spec_to_dict(self.spec, ex)
        if self.policy is not None:
            d["policy"] = {
                "zero_eps": self.policy.zero_eps,
                "cluster_eps": self.policy.cluster_eps,
                "rank_rel_eps": self.policy.rank_rel_eps,
            }
        if self.seed is not None:
            d["seed"] = self.seed
        if self.extra:
            d["extra"] = jsonable(self.extra, ex)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResultDocument":
        if not isinstance(d, dict):
            raise MalformedInput("document must be a JSON object")
        _check_version(d)
        if not isinstance(d.get("command"), str):
            raise MalformedInput("result document has no command")
        name = d.get("backend", "exact")
        bk = get_backend(name)
        ex = bk.exact
        pol = d.get("policy")
        return cls(
            command=d["command"],
            backend=name,
            summands=[decode_summand(s, ex) for s in d["summands"]] if "summands" in d else None,
            witness=decode_matrix(d["witness"], bk) if "witness" in d else None,
            canonical=decode_matrix(d["canonical"], bk) if "canonical" in d else None,
            step_log=d.get("step_log"),
            report=d.get("report"),
            verdict=d.get("verdict"),
            spec=spec_from_dict(d["spec"], bk) if "spec" in d else None,
            policy=TolerancePolicy(**pol) if pol is not None else None,
            seed=d.get("seed"),
            extra=d.get("extra") or {},
        )

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "ResultDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedInput(f"invalid JSON: {e}") from e
        return cls.from_dict(d)

    def __eq__(self, other):
        if not isinstance(other, ResultDocument):
            return NotImplemented
        return self.to_dict() == other.to_dict()

