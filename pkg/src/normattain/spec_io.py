"""JSON operator spec documents.

A document is ``{"operator": <expr>, "options": {...}}``. Every node carries
a ``"kind"`` discriminator; numbers may be JSON numbers or decimal strings,
and complex scalars are written ``{"re": ..., "im": ...}``.
"""

import json
import math

import numpy as np

from .errors import InvariantViolation, ParseError, UnknownKind
from .operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    FiniteRank,
    Identity,
    PositiveRoot,
    Projection,
    Restrict,
    Scale,
    Shift,
    Sum,
)
from .sequences import (
    ExplicitThenConstant,
    ExplicitThenZero,
    Geometric,
    Harmonic,
    RealSeq,
    UnitModulus,
)
from .subspaces import BlockRepetition, CanonicalTail, ComplementFinite, SpanFinite


class _Reader:
    def fail(self, msg, where):
        raise ParseError(msg, path=where)

    def node(self, obj, where):
        if not isinstance(obj, dict):
            self.fail("expected an object", where)
        kind = obj.get("kind")
        if not isinstance(kind, str):
            self.fail("missing string field 'kind'", where)
        return kind

    def field(self, obj, name, where, default=...):
        if name in obj:
            return obj[name]
        if default is ...:
            self.fail(f"missing field '{name}'", f"{where}.{name}")
        return default

    def real(self, value, where):
        if isinstance(value, bool):
            self.fail("expected a number", where)
        if isinstance(value, (int, float)):
            x = float(value)
        elif isinstance(value, str):
            try:
                x = float(value)
            except ValueError:
                self.fail(f"not a decimal number: {value!r}", where)
        else:
            self.fail("expected a number", where)
        if not math.isfinite(x):
            self.fail("number must be finite", where)
        return x

    def integer(self, value, where):
        x = self.real(value, where)
        if x != int(x):
            self.fail("expected an integer", where)
        return int(x)

    def complex(self, value, where):
        if isinstance(value, dict):
            extra = set(value) - {"re", "im"}
            if extra:
                self.fail(f"unexpected complex fields {sorted(extra)}", where)
            re = self.real(value.get("re", 0), f"{where}.re")
            im = self.real(value.get("im", 0), f"{where}.im")
            return complex(re, im)
        return complex(self.real(value, where), 0.0)

    def list(self, value, where):
        if not isinstance(value, list):
            self.fail("expected a list", where)
        return value

    def vector(self, value, where):
        items = self.list(value, where)
        return np.array([self.complex(v, f"{where}[{i}]") for i, v in enumerate(items)], dtype=complex)

    def reals(self, value, where):
        return tuple(self.real(v, f"{where}[{i}]") for i, v in enumerate(self.list(value, where)))

    # sequences

    def seq(self, obj, where):
        kind = self.node(obj, where)
        if kind == "explicit_then_zero":
            return ExplicitThenZero(self.reals(self.field(obj, "values", where), f"{where}.values"))
        if kind == "explicit_then_constant":
            return ExplicitThenConstant(
                self.reals(self.field(obj, "values", where), f"{where}.values"),
                self.real(self.field(obj, "tail", where), f"{where}.tail"),
            )
        if kind in ("harmonic", "geometric"):
            args = {
                "limit": self.real(self.field(obj, "limit", where, 0.0), f"{where}.limit"),
                "coeff": self.real(self.field(obj, "coeff", where, 0.0), f"{where}.coeff"),
            }
            if kind == "harmonic":
                args["offset"] = self.real(self.field(obj, "offset", where, 1.0), f"{where}.offset")
                return Harmonic(**args)
            args["ratio"] = self.real(self.field(obj, "ratio", where, 0.5), f"{where}.ratio")
            return Geometric(**args)
        raise UnknownKind(f"unknown sequence kind {kind!r}", path=where)

    def complex_seq(self, obj, where):
        kind = self.node(obj, where)
        if kind == "unit_modulus":
            conj = self.field(obj, "conjugate", where, False)
            if not isinstance(conj, bool):
                self.fail("expected a boolean", f"{where}.conjugate")
            return UnitModulus(self.seq(self.field(obj, "real_part", where), f"{where}.real_part"), conj)
        if kind == "real":
            return RealSeq(self.seq(self.field(obj, "seq", where), f"{where}.seq"))
        return RealSeq(self.seq(obj, where))

    # subspaces

    def subspace(self, obj, where):
        kind = self.node(obj, where)
        if kind in ("span", "complement"):
            vecs = self.list(self.field(obj, "vectors", where), f"{where}.vectors")
            vecs = tuple(self.vector(v, f"{where}.vectors[{i}]") for i, v in enumerate(vecs))
            return (SpanFinite if kind == "span" else ComplementFinite)(vecs)
        if kind == "canonical_tail":
            return CanonicalTail(self.integer(self.field(obj, "k", where, 0), f"{where}.k"))
        if kind == "block_repetition":
            prefix = self.list(self.field(obj, "prefix", where, []), f"{where}.prefix")
            period = self.list(self.field(obj, "period", where), f"{where}.period")
            return BlockRepetition(
                tuple(self.integer(v, f"{where}.prefix[{i}]") for i, v in enumerate(prefix)),
                tuple(self.integer(v, f"{where}.period[{i}]") for i, v in enumerate(period)),
            )
        raise UnknownKind(f"unknown subspace kind {kind!r}", path=where)

    # operators

    def children(self, obj, where):
        items = self.list(self.field(obj, "children", where), f"{where}.children")
        if not items:
            self.fail("needs at least one child", f"{where}.children")
        return tuple(self.operator(c, f"{where}.children[{i}]") for i, c in enumerate(items))

    def child(self, obj, where):
        return self.operator(self.field(obj, "child", where), f"{where}.child")

    def operator(self, obj, where):
        kind = self.node(obj, where)
        if kind == "identity":
            return Identity()
        if kind == "diagonal":
            return Diagonal(self.complex_seq(self.field(obj, "sequence", where), f"{where}.sequence"))
        if kind == "dense":
            rows = self.list(self.field(obj, "matrix", where), f"{where}.matrix")
            m = [self.vector(r, f"{where}.matrix[{i}]") for i, r in enumerate(rows)]
            if not m or any(r.size != len(m) for r in m):
                self.fail("matrix must be square and non-empty", f"{where}.matrix")
            tail = self.field(obj, "tail", where, "zero")
            return Dense(np.array(m), tail)
        if kind == "finite_rank":
            terms = self.list(self.field(obj, "terms", where), f"{where}.terms")
            out = []
            for i, t in enumerate(terms):
                w = f"{where}.terms[{i}]"
                if not isinstance(t, dict):
                    self.fail("expected an object", w)
                out.append(
                    (
                        self.real(self.field(t, "sigma", w), f"{w}.sigma"),
                        self.vector(self.field(t, "left", w), f"{w}.left"),
                        self.vector(self.field(t, "right", w), f"{w}.right"),
                    )
                )
            return FiniteRank(tuple(out))
        if kind == "projection":
            return Projection(self.subspace(self.field(obj, "subspace", where), f"{where}.subspace"))
        if kind == "shift":
            return Shift(self.integer(self.field(obj, "offset", where, 1), f"{where}.offset"))
        if kind == "scale":
            return Scale(self.complex(self.field(obj, "alpha", where), f"{where}.alpha"), self.child(obj, where))
        if kind == "sum":
            return Sum(self.children(obj, where))
        if kind == "compose":
            return Compose(self.children(obj, where))
        if kind == "adjoint":
            return Adjoint(self.child(obj, where))
        if kind == "restrict":
            sub = self.subspace(self.field(obj, "subspace", where), f"{where}.subspace")
            return Restrict(self.child(obj, where), sub)
        if kind == "positive_root":
            return PositiveRoot(self.child(obj, where))
        raise UnknownKind(f"unknown operator kind {kind!r}", path=where)


def parse_operator(obj):
    """Operator from an already-decoded JSON node."""
    return _Reader().operator(obj, "$")


def parse_spec(document):
    """(operator, options) from the text of a spec document.

    A bare operator node is accepted as a document with no options.
    """
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path="$", line=exc.lineno) from None
    if isinstance(obj, dict) and "operator" in obj:
        options = obj.get("options", {})
        if not isinstance(options, dict):
            raise ParseError("expected an object", path="$.options")
        extra = set(obj) - {"operator", "options"}
        if extra:
            raise ParseError(f"unexpected top-level fields {sorted(extra)}", path="$")
        return _Reader().operator(obj["operator"], "$.operator"), options
    return _Reader().operator(obj, "$"), {}


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_spec(text)
    except ParseError as exc:
        raise type(exc)(exc.detail, path=f"{path}:{exc.path}" if exc.path else path, line=exc.line) from None


# ---------------------------------------------------------------------------
# serialization


def _num(x):
    x = complex(x)
    if x.imag == 0.0:
        return x.real
    return {"re": x.real, "im": x.imag}


def _vec(v):
    return [_num(z) for z in np.asarray(v).ravel()]


def serialize_seq(s):
    if isinstance(s, UnitModulus):
        out = {"kind": "unit_modulus", "real_part": serialize_seq(s.real_part)}
        if s.conjugate:
            out["conjugate"] = True
        return out
    if isinstance(s, RealSeq):
        return serialize_seq(s.seq)
    if isinstance(s, ExplicitThenZero):
        return {"kind": "explicit_then_zero", "values": list(s.values)}
    if isinstance(s, ExplicitThenConstant):
        return {"kind": "explicit_then_constant", "values": list(s.values), "tail": s.tail}
    if isinstance(s, Harmonic):
        return {"kind": "harmonic", "limit": s.limit, "coeff": s.coeff, "offset": s.offset}
    if isinstance(s, Geometric):
        return {"kind": "geometric", "limit": s.limit, "coeff": s.coeff, "ratio": s.ratio}
    raise InvariantViolation(f"cannot serialize sequence {type(s).__name__}")


def serialize_subspace(m):
    if isinstance(m, SpanFinite):
        return {"kind": "span", "vectors": [_vec(v) for v in m.vectors]}
    if isinstance(m, ComplementFinite):
        return {"kind": "complement", "vectors": [_vec(v) for v in m.vectors]}
    if isinstance(m, CanonicalTail):
        return {"kind": "canonical_tail", "k": m.k}
    if isinstance(m, BlockRepetition):
        return {"kind": "block_repetition", "prefix": list(m.prefix), "period": list(m.period)}
    raise InvariantViolation(f"cannot serialize subspace {type(m).__name__}")


def serialize_operator(T):
    if isinstance(T, Identity):
        return {"kind": "identity"}
    if isinstance(T, Diagonal):
        return {"kind": "diagonal", "sequence": serialize_seq(T.sequence)}
    if isinstance(T, Dense):
        return {"kind": "dense", "matrix": [_vec(r) for r in T.matrix], "tail": T.tail}
    if isinstance(T, FiniteRank):
        return {
            "kind": "finite_rank",
            "terms": [{"sigma": s, "left": _vec(u), "right": _vec(v)} for s, u, v in T.terms],
        }
    if isinstance(T, Projection):
        return {"kind": "projection", "subspace": serialize_subspace(T.subspace)}
    if isinstance(T, Shift):
        return {"kind": "shift", "offset": T.offset}
    if isinstance(T, Scale):
        return {"kind": "scale", "alpha": _num(T.alpha), "child": serialize_operator(T.child)}
    if isinstance(T, (Sum, Compose)):
        kind = "sum" if isinstance(T, Sum) else "compose"
        return {"kind": kind, "children": [serialize_operator(c) for c in T.children]}
    if isinstance(T, Adjoint):
        return {"kind": "adjoint", "child": serialize_operator(T.child)}
    if isinstance(T, Restrict):
        return {"kind": "restrict", "child": serialize_operator(T.child), "subspace": serialize_subspace(T.subspace)}
    if isinstance(T, PositiveRoot):
        return {"kind": "positive_root", "child": serialize_operator(T.child)}
    raise InvariantViolation(f"cannot serialize operator {type(T).__name__}")


def serialize_spec(T, options=None):
    return json.dumps({"operator": serialize_operator(T), "options": options or {}}, sort_keys=True, indent=2)


def same_tree(A, B):
    """Structural equality of two operator expressions."""
    return serialize_operator(A) == serialize_operator(B)
