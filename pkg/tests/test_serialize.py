import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import E
from semicanon.backend import EXACT, TolerancePolicy
from semicanon.errors import MalformedInput
from semicanon.operators import seminormal_summands
from semicanon.reduced import ReducedAlgebraSpec, belitskii, semiunitary_similarity
from semicanon.scalars import GaussQ
from semicanon.semiunitary import HermitianSummand, OperatorSummand, SemiunitarySpace, random_kv
from semicanon.serialize import (
    MatrixDocument,
    ResultDocument,
    decode_scalar,
    encode_scalar,
    spec_from_dict,
    spec_to_dict,
)

seeds = st.integers(0, 2**31 - 1)
spaces = st.integers(0, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))
small = st.fractions(min_value=-100, max_value=100, max_denominator=50)


@given(small, small)
def test_exact_scalar_round_trip(a, b):
    z = GaussQ(a, b)
    assert decode_scalar(encode_scalar(z, True), True) == z


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e12))
def test_float_scalar_round_trip(z):
    assert decode_scalar(json.loads(json.dumps(encode_scalar(z, False))), False) == z


def test_scalar_formats():
    assert encode_scalar(GaussQ(Fraction(1, 2), Fraction(-3, 4)), True) == "1/2-3/4i"
    assert decode_scalar(3, True) == GaussQ(3)
    assert decode_scalar([0.5, -1.0], True) == GaussQ(Fraction(1, 2), -1)
    assert decode_scalar("2i", False) == 2j


@pytest.mark.parametrize("bad", [True, None, {"re": 1}, [1, 2, 3], "1/0", "x", [float("nan"), 0.0]])
def test_bad_scalars(bad):
    with pytest.raises(MalformedInput):
        decode_scalar(bad, True)


@given(spaces, seeds)
def test_matrix_document_round_trip_exact(space, seed):
    A = random_kv(SemiunitarySpace(*space), "general", seed)
    doc = MatrixDocument(A.mat, "exact", space)
    back = MatrixDocument.loads(doc.dumps())
    assert back == doc
    assert EXACT.equal(back.entries, A.mat)


@given(spaces, seeds)
def test_matrix_document_round_trip_float(space, seed):
    A = EXACT.to_complex(random_kv(SemiunitarySpace(*space), "general", seed).mat)
    doc = MatrixDocument(A, "float", space)
    back = MatrixDocument.loads(doc.dumps())
    assert back == doc
    assert np.array_equal(back.entries, A)


def test_dumps_is_canonical():
    doc = MatrixDocument(E([[1, "1/2i"], [0, 2]]), "exact", (2, 1))
    text = doc.dumps()
    assert text.endswith("\n")
    assert text == MatrixDocument.loads(text).dumps()
    assert json.loads(text)["entries"] == [["1", "1/2i"], ["0", "2"]]


def test_backend_override_on_load():
    text = MatrixDocument(E([[1, 2], [3, 4]]), "exact").dumps()
    doc = MatrixDocument.loads(text, backend="float")
    assert doc.backend == "float"
    assert doc.entries.dtype == complex


def test_env_backend_default(monkeypatch):
    text = json.dumps({"schema_version": 1, "entries": [["1"]]})
    monkeypatch.setenv("SEMICANON_BACKEND", "float")
    assert MatrixDocument.loads(text).backend == "float"
    monkeypatch.delenv("SEMICANON_BACKEND")
    assert MatrixDocument.loads(text).backend == "exact"


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[]",
        {"entries": [["1"]]},
        {"schema_version": 2, "entries": [["1"]]},
        {"schema_version": 1},
        {"schema_version": 1, "entries": [["1", "2"], ["3"]]},
        {"schema_version": 1, "entries": [["1"]], "space": {"n": 2, "m": 1}},
        {"schema_version": 1, "entries": [["1"]], "space": {"n": 1, "m": 2}},
        {"schema_version": 1, "entries": [["1"]], "backend": "quantum"},
        {"schema_version": 1, "entries": [["1"]], "spec": {"builtin": "nope"}},
        {"schema_version": 1, "entries": [["1"]], "spec": {"sizes": [2]}},
    ],
)
def test_malformed_documents(doc):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    with pytest.raises(MalformedInput):
        MatrixDocument.loads(text)


def test_builtin_spec_forms():
    assert spec_from_dict({"builtin": "belitskii", "n": 3}) == belitskii(3)
    assert spec_from_dict({"builtin": "semiunitary_similarity", "n": 3, "m": 1}) == semiunitary_similarity(3, 1)


def test_explicit_spec_round_trip():
    one = GaussQ(1)
    spec = ReducedAlgebraSpec.build([1, 2, 1, 2], equiv=[(0, 2), (1, 3)], equations=[{(0, 1): one, (2, 3): -one}], unitary=[1, 3])
    d = json.loads(json.dumps(spec_to_dict(spec)))
    assert spec_from_dict(d) == spec


@given(spaces, seeds)
def test_result_document_round_trip(space, seed):
    A = random_kv(SemiunitarySpace(*space), "seminormal", seed)
    res = ResultDocument(
        "canon-op",
        summands=seminormal_summands(A),
        witness=A.mat,
        policy=TolerancePolicy(),
        seed=seed,
        report={"counts": [1, 2]},
    )
    back = ResultDocument.loads(res.dumps())
    assert back == res
    assert back.summands == res.summands


def test_result_document_hermitian_and_spec():
    res = ResultDocument(
        "canon-form",
        summands=[HermitianSummand("RealDiag1", GaussQ(-3)), HermitianSummand("PlusOne0")],
        spec=belitskii(2),
        canonical=E([[0, 1], [0, 0]]),
        step_log=[{"position": [0, 0], "case": "II(e)"}],
    )
    assert ResultDocument.loads(res.dumps()) == res


def test_result_document_float_summands():
    res = ResultDocument("canon-op", backend="float", summands=[OperatorSummand(2, 0.5 + 1j, 1)])
    d = json.loads(res.dumps())
    assert d["summands"][0]["lambda"] == [0.5, 1.0]
    assert ResultDocument.loads(res.dumps()) == res


def test_result_document_needs_command():
    with pytest.raises(MalformedInput):
        ResultDocument.loads(json.dumps({"schema_version": 1}))
