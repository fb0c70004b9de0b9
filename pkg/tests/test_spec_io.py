import json

import numpy as np
import pytest

from normattain.errors import InvariantViolation, ParseError, UnknownKind
from normattain.operators import Diagonal, Identity, Sum, truncate
from normattain.sequences import Harmonic, UnitModulus
from normattain.spec_io import parse_spec, same_tree, serialize_operator, serialize_spec

TPLUSI = {
    "kind": "sum",
    "children": [
        {"kind": "identity"},
        {
            "kind": "diagonal",
            "sequence": {"kind": "unit_modulus", "real_part": {"kind": "harmonic", "limit": 1, "coeff": 1, "offset": 1}},
        },
    ],
}

DOCS = [
    TPLUSI,
    {"kind": "dense", "matrix": [[1, {"re": 0, "im": 2}], ["0.5", 0]], "tail": "identity"},
    {"kind": "finite_rank", "terms": [{"sigma": 2, "left": [1, 0, 1], "right": [0, {"re": 1, "im": -1}]}]},
    {"kind": "projection", "subspace": {"kind": "block_repetition", "prefix": [], "period": [1, 2]}},
    {"kind": "restrict", "child": {"kind": "shift", "offset": 2}, "subspace": {"kind": "canonical_tail", "k": 1}},
    {"kind": "projection", "subspace": {"kind": "span", "vectors": [[1, 1], [0, 0, 1]]}},
    {"kind": "projection", "subspace": {"kind": "complement", "vectors": [[1, -1]]}},
    {"kind": "compose", "children": [{"kind": "shift"}, {"kind": "adjoint", "child": {"kind": "shift"}}]},
    {"kind": "scale", "alpha": {"re": 0, "im": 1}, "child": {"kind": "positive_root", "child": {"kind": "identity"}}},
    {"kind": "diagonal", "sequence": {"kind": "explicit_then_constant", "values": [3, 2], "tail": 1}},
    {"kind": "diagonal", "sequence": {"kind": "geometric", "limit": 2, "coeff": -1, "ratio": 0.5}},
    {"kind": "diagonal", "sequence": {"kind": "explicit_then_zero", "values": [1, "2.5"]}},
]


def test_identity():
    T, opts = parse_spec('{"kind": "identity"}')
    assert isinstance(T, Identity) and opts == {}


def test_tplusi_document():
    T, opts = parse_spec(json.dumps({"operator": TPLUSI, "options": {"n_max": 3}}))
    assert same_tree(T, Sum((Identity(), Diagonal(UnitModulus(Harmonic(1.0, 1.0, 1.0))))))
    assert opts == {"n_max": 3}


@pytest.mark.parametrize("doc", DOCS, ids=lambda d: d["kind"])
def test_round_trip(doc):
    T, _ = parse_spec(json.dumps(doc))
    again, _ = parse_spec(serialize_spec(T))
    assert serialize_operator(again) == serialize_operator(T)
    assert np.allclose(truncate(again, 6), truncate(T, 6))


def test_geometric_ratio_out_of_range():
    with pytest.raises(InvariantViolation):
        parse_spec('{"kind": "diagonal", "sequence": {"kind": "geometric", "ratio": 1.5}}')


def test_unknown_kind_reports_path():
    with pytest.raises(UnknownKind) as exc:
        parse_spec('{"kind": "sum", "children": [{"kind": "identity"}, {"kind": "mystery"}]}')
    assert exc.value.path == "$.children[1]"


def test_syntax_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_spec('{\n"kind":\n}')
    assert exc.value.line == 3


@pytest.mark.parametrize(
    "doc",
    [
        '{"kind": "shift", "offset": 1.5}',
        '{"kind": "dense", "matrix": [[1, 2]]}',
        '{"kind": "diagonal", "sequence": {"kind": "harmonic", "limit": "abc"}}',
        '{"kind": "scale", "alpha": {"re": 1, "x": 2}, "child": {"kind": "identity"}}',
        '{"operator": {"kind": "identity"}, "extra": 1}',
        '{"kind": "sum", "children": []}',
        '[1, 2]',
        '{"kind": "diagonal"}',
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(ParseError):
        parse_spec(doc)
