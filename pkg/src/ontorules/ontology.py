"""In-memory ontology graph and the two document formats it is read from.

A graph holds classes, the datatype properties attached to each class, and
named directed relations between classes. Every element carries a membership
degree ``mu`` in [0, 1]; unannotated elements get exactly 1.0.

Two input syntaxes are accepted:

* a small Turtle subset (``@prefix``, ``owl:Class``, ``owl:DatatypeProperty``,
  ``owl:ObjectProperty`` with ``rdfs:domain``/``rdfs:range``,
  ``rdfs:subClassOf``, ``owl:equivalentClass`` and ``swes:membership``);
* a JSON interchange object with ``classes``, ``properties`` and
  ``relations`` arrays.

Individuals, property datatypes and any other predicates are ignored.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SWES = "http://swes.example.org/ns#"

DEFAULT_PREFIXES = {"rdf": RDF, "rdfs": RDFS, "owl": OWL, "xsd": XSD, "swes": SWES}

SUBCLASS_OF = "subClassOf"
EQUIVALENT_CLASS = "equivalentClass"

# Reserved for the empty-cell sentinel in serialized rule files.
NONE_SYMBOL = "∅"


class OntologyError(ValueError):
    """Base class for ontology input errors; ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)

    def at(self, line, col):
        return type(self)(self.message, line, col)


class OntologySyntaxError(OntologyError):
    pass


class UndeclaredClassError(OntologyError):
    pass


class MembershipRangeError(OntologyError):
    pass


class DuplicateDeclarationError(OntologyError):
    pass


def check_membership(value) -> float:
    """Validate a membership degree and return it as a float."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MembershipRangeError(f"membership must be a number, got {value!r}")
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise MembershipRangeError(f"membership {value!r} outside [0, 1]")
    return value


def check_name(text) -> str:
    if not isinstance(text, str):
        raise OntologySyntaxError(f"element name must be a string, got {text!r}")
    name = text.strip()
    if not name:
        raise OntologySyntaxError("element name is empty")
    if name == NONE_SYMBOL:
        raise OntologySyntaxError(f"element name {NONE_SYMBOL!r} is reserved")
    return name


class Element(NamedTuple):
    name: str
    mu: float = 1.0


@dataclass(frozen=True)
class RelationEdge:
    source: str
    target: str
    label: str
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", check_name(self.source))
        object.__setattr__(self, "target", check_name(self.target))
        object.__setattr__(self, "label", check_name(self.label))
        object.__setattr__(self, "mu", check_membership(self.mu))


@dataclass(frozen=True)
class OntologyGraph:
    """Immutable ontology graph; construction validates every invariant.

    ``datatype_properties`` is normalised to hold an entry (possibly empty)
    for every declared class.
    """

    classes: tuple = ()
    datatype_properties: Mapping[str, tuple] = field(default_factory=dict)
    relations: tuple = ()
    source_id: str = ""

    def __post_init__(self):
        classes = []
        seen = set()
        for item in self.classes:
            name, mu = (item, 1.0) if isinstance(item, str) else item
            el = Element(check_name(name), check_membership(mu))
            if el.name in seen:
                raise DuplicateDeclarationError(f"duplicate class {el.name!r}")
            seen.add(el.name)
            classes.append(el)

        props = {c.name: () for c in classes}
        for cls, plist in self.datatype_properties.items():
            cls = check_name(cls)
            if cls not in seen:
                raise UndeclaredClassError(f"property list for undeclared class {cls!r}")
            names = set()
            out = []
            for item in plist:
                name, mu = (item, 1.0) if isinstance(item, str) else item
                el = Element(check_name(name), check_membership(mu))
                if el.name in names:
                    raise DuplicateDeclarationError(
                        f"duplicate property {el.name!r} on class {cls!r}")
                names.add(el.name)
                out.append(el)
            props[cls] = tuple(out)

        edges = []
        keys = set()
        for edge in self.relations:
            if not isinstance(edge, RelationEdge):
                edge = RelationEdge(*edge)
            for end in (edge.source, edge.target):
                if end not in seen:
                    raise UndeclaredClassError(
                        f"relation {edge.label!r} references undeclared class {end!r}")
            key = (edge.source, edge.target, edge.label)
            if key in keys:
                raise DuplicateDeclarationError(
                    f"duplicate relation {edge.label!r} from {edge.source!r} to {edge.target!r}")
            keys.add(key)
            edges.append(edge)

        object.__setattr__(self, "classes", tuple(classes))
        object.__setattr__(self, "datatype_properties", props)
        object.__setattr__(self, "relations", tuple(edges))

    @cached_property
    def class_mu(self) -> dict:
        return dict(self.classes)

    def class_names(self) -> list:
        return [c.name for c in self.classes]

    def __contains__(self, name) -> bool:
        return name in self.class_mu


class Parts(NamedTuple):
    properties: list
    incoming: list
    outgoing: list


def _collapse(elements: Iterable[Element]) -> list:
    best = {}
    for name, mu in elements:
        if name not in best or mu > best[name]:
            best[name] = mu
    return [Element(n, m) for n, m in best.items()]


def categorize_parts(graph: OntologyGraph, cls: str) -> Parts:
    """Split the neighbourhood of ``cls`` into properties, incoming and outgoing relations.

    Relation labels occurring on several edges are collapsed to one element
    carrying the maximum membership, at the position of the first occurrence.
    """
    if cls not in graph:
        raise UndeclaredClassError(f"unknown class {cls!r}")
    incoming = _collapse(Element(e.label, e.mu) for e in graph.relations if e.target == cls)
    outgoing = _collapse(Element(e.label, e.mu) for e in graph.relations if e.source == cls)
    return Parts(list(graph.datatype_properties[cls]), incoming, outgoing)


# --------------------------------------------------------------------------
# JSON interchange


_JSON_KEYS = {
    "classes": ({"name"}, {"mu"}),
    "properties": ({"class", "name"}, {"mu"}),
    "relations": ({"source", "target", "label"}, {"mu"}),
}


def _json_items(doc, key):
    items = doc.get(key, [])
    if not isinstance(items, list):
        raise OntologySyntaxError(f"{key}: expected an array")
    required, optional = _JSON_KEYS[key]
    for i, item in enumerate(items):
        where = f"{key}[{i}]"
        if not isinstance(item, dict):
            raise OntologySyntaxError(f"{where}: expected an object")
        missing = required - item.keys()
        if missing:
            raise OntologySyntaxError(f"{where}: missing key(s) {sorted(missing)}")
        unknown = item.keys() - required - optional
        if unknown:
            raise OntologySyntaxError(f"{where}: unknown key(s) {sorted(unknown)}")
        yield where, item


def _parse_json(document: str, source_id: str) -> OntologyGraph:
    if not document.strip():
        return OntologyGraph(source_id=source_id)
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise OntologySyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise OntologySyntaxError("top level must be a JSON object")
    unknown = doc.keys() - _JSON_KEYS.keys()
    if unknown:
        raise OntologySyntaxError(f"unknown top-level key(s) {sorted(unknown)}")

    def wrap(where, fn, *args):
        try:
            return fn(*args)
        except OntologyError as exc:
            raise type(exc)(f"{where}: {exc.message}") from None

    classes = []
    for where, item in _json_items(doc, "classes"):
        classes.append(wrap(where, lambda: Element(check_name(item["name"]),
                                                   check_membership(item.get("mu", 1.0)))))
    declared = {c.name for c in classes}
    props = {c.name: [] for c in classes}
    for where, item in _json_items(doc, "properties"):
        cls = wrap(where, check_name, item["class"])
        if cls not in declared:
            raise UndeclaredClassError(f"{where}: undeclared class {cls!r}")
        el = wrap(where, lambda: Element(check_name(item["name"]),
                                         check_membership(item.get("mu", 1.0))))
        if any(p.name == el.name for p in props[cls]):
            raise DuplicateDeclarationError(
                f"{where}: duplicate property {el.name!r} on class {cls!r}")
        props[cls].append(el)
    edges = []
    for where, item in _json_items(doc, "relations"):
        edge = wrap(where, lambda: RelationEdge(item["source"], item["target"],
                                                item["label"], check_membership(item.get("mu", 1.0))))
        for end in (edge.source, edge.target):
            if end not in declared:
                raise UndeclaredClassError(f"{where}: undeclared class {end!r}")
        edges.append(edge)
    try:
        return OntologyGraph(tuple(classes), props, tuple(edges), source_id)
    except OntologyError as exc:
        raise type(exc)(f"relations: {exc.message}") from None


def dump_json(graph: OntologyGraph) -> str:
    """Serialize a graph to the JSON interchange format (lossless)."""
    doc = {
        "classes": [{"name": c.name, "mu": c.mu} for c in graph.classes],
        "properties": [
            {"class": c.name, "name": p.name, "mu": p.mu}
            for c in graph.classes for p in graph.datatype_properties[c.name]
        ],
        "relations": [
            {"source": e.source, "target": e.target, "label": e.label, "mu": e.mu}
            for e in graph.relations
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# Turtle subset


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<directive>@prefix\b|@base\b)
  | (?P<sparql>(?i:PREFIX|BASE)(?![\w:.-]))
  | (?P<blank>_:|\[|\(|\)|\])
  | (?P<pname>(?:[A-Za-z][\w-]*(?:\.[\w-]+)*)?:(?:[\w-]+(?:\.[\w-]+)*)?)
  | (?P<keyword>a(?![\w:.-])|true(?![\w:.-])|false(?![\w:.-]))
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<dtype>\^\^)
  | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<number>[+-]?(?:\d*\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<punct>[.;,])
""", re.VERBOSE)


class _Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


class _Literal(NamedTuple):
    lexical: str
    datatype: Optional[str]


class _Triple(NamedTuple):
    s: str
    p: str
    o: object
    line: int
    col: int


def _tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise OntologySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind == "blank":
            raise OntologySyntaxError("blank nodes and collections are not supported", line, col)
        if kind not in ("ws", "comment"):
            tokens.append(_Tok(kind, tok_text, line, col))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Tok("eof", "", line, pos - line_start + 1))
    return tokens


_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


class _TurtleReader:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes = dict(DEFAULT_PREFIXES)
        self.triples = []

    def peek(self) -> _Tok:
        return self.tokens[self.i]

    def next(self) -> _Tok:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, text=None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.text else "end of input"
            raise OntologySyntaxError(f"expected {want}, found {got}", tok.line, tok.col)
        return tok

    def iri(self, tok: _Tok) -> str:
        if tok.kind == "iri":
            return tok.text[1:-1]
        if tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                raise OntologySyntaxError(f"undeclared prefix {prefix + ':'!r}", tok.line, tok.col)
            return self.prefixes[prefix] + local
        got = repr(tok.text) if tok.text else "end of input"
        raise OntologySyntaxError(f"expected an IRI, found {got}", tok.line, tok.col)

    def parse(self) -> list:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind in ("directive", "sparql"):
                self.directive()
            else:
                self.statement()
        return self.triples

    def directive(self):
        tok = self.next()
        word = tok.text.lstrip("@").lower()
        if word == "prefix":
            name = self.expect("pname")
            if not name.text.endswith(":") or name.text.count(":") != 1:
                raise OntologySyntaxError(f"bad prefix name {name.text!r}", name.line, name.col)
            self.prefixes[name.text[:-1]] = self.expect("iri").text[1:-1]
        else:
            self.expect("iri")
        if tok.kind == "directive":
            self.expect("punct", ".")

    def statement(self):
        tok = self.next()
        subject = self.iri(tok)
        while True:
            verb = self.next()
            pred = RDF + "type" if verb.kind == "keyword" and verb.text == "a" else self.iri(verb)
            while True:
                obj = self.object()
                self.triples.append(_Triple(subject, pred, obj, verb.line, verb.col))
                if self.peek().text == "," and self.peek().kind == "punct":
                    self.next()
                    continue
                break
            sep = self.next()
            if sep.kind == "punct" and sep.text == ".":
                return
            if sep.kind == "punct" and sep.text == ";":
                while self.peek().kind == "punct" and self.peek().text == ";":
                    self.next()
                if self.peek().kind == "punct" and self.peek().text == ".":
                    self.next()
                    return
                continue
            got = repr(sep.text) if sep.text else "end of input"
            raise OntologySyntaxError(f"expected '.' or ';', found {got}", sep.line, sep.col)

    def object(self):
        tok = self.next()
        if tok.kind in ("iri", "pname"):
            return self.iri(tok)
        if tok.kind == "number":
            return _Literal(tok.text, None)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return _Literal(tok.text, XSD + "boolean")
        if tok.kind == "string":
            lexical = _unescape(tok.text[1:-1])
            datatype = None
            if self.peek().kind == "dtype":
                self.next()
                datatype = self.iri(self.next())
            elif self.peek().kind == "lang":
                self.next()
            return _Literal(lexical, datatype)
        got = repr(tok.text) if tok.text else "end of input"
        raise OntologySyntaxError(f"expected an object term, found {got}", tok.line, tok.col)


def local_name(iri: str) -> str:
    """Text after the last '#' or '/' (or ':' for IRIs with neither)."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    if cut < 0:
        cut = iri.rfind(":")
    return iri[cut + 1:]


def _parse_turtle(document: str, source_id: str) -> OntologyGraph:
    head = document.lstrip()
    if head.startswith("<?xml") or head.startswith("<rdf:RDF"):
        raise OntologySyntaxError(
            "RDF/XML is not supported; use the Turtle subset or the JSON interchange format", 1, 1)
    raw = _TurtleReader(document).parse()

    triples = []
    seen = set()
    for t in raw:
        key = (t.s, t.p, t.o)
        if key not in seen:
            seen.add(key)
            triples.append(t)

    rdf_type = RDF + "type"
    kinds = {OWL + "Class": "class", OWL + "DatatypeProperty": "datatype",
             OWL + "ObjectProperty": "object"}
    kind_of = {}
    first_pos = {}
    for t in triples:
        first_pos.setdefault(t.s, (t.line, t.col))
        if t.p == rdf_type and t.o in kinds:
            kind = kinds[t.o]
            prior = kind_of.setdefault(t.s, kind)
            if prior != kind:
                raise DuplicateDeclarationError(
                    f"{local_name(t.s)!r} declared as both {prior} and {kind}", t.line, t.col)

    names = {}
    by_kind_name = {}
    for iri, kind in kind_of.items():
        name = local_name(iri)
        try:
            name = check_name(name)
        except OntologyError as exc:
            raise exc.at(*first_pos[iri]) from None
        owner = by_kind_name.setdefault((kind, name), iri)
        if owner != iri:
            raise DuplicateDeclarationError(
                f"local name {name!r} is shared by <{owner}> and <{iri}>", *first_pos[iri])
        names[iri] = name

    def require_class(iri, t):
        if kind_of.get(iri) != "class":
            raise UndeclaredClassError(f"reference to undeclared class {local_name(iri)!r}", t.line, t.col)
        return names[iri]

    membership = {}
    for t in triples:
        if t.p != SWES + "membership":
            continue
        if t.s not in kind_of:
            raise UndeclaredClassError(
                f"membership annotation on undeclared element {local_name(t.s)!r}", t.line, t.col)
        if not isinstance(t.o, _Literal):
            raise OntologySyntaxError("membership value must be a literal", t.line, t.col)
        try:
            value = float(t.o.lexical)
        except ValueError:
            raise OntologySyntaxError(f"membership value {t.o.lexical!r} is not a number",
                                      t.line, t.col) from None
        try:
            value = check_membership(value)
        except OntologyError as exc:
            raise exc.at(t.line, t.col) from None
        if t.s in membership and membership[t.s] != value:
            raise DuplicateDeclarationError(
                f"conflicting membership annotations on {names[t.s]!r}", t.line, t.col)
        membership[t.s] = value

    classes = []
    props = {}
    domains = {}
    ranges = {}
    # Relations follow document order: an object property sits at its first
    # statement, a class axiom at its own triple.
    anchors = []
    object_seen = set()
    for idx, t in enumerate(triples):
        if t.p == rdf_type and kind_of.get(t.s) == "class" and t.o == OWL + "Class":
            name = names[t.s]
            classes.append(Element(name, membership.get(t.s, 1.0)))
            props[name] = []
        elif t.p in (RDFS + "domain", RDFS + "range") and kind_of.get(t.s) in ("datatype", "object"):
            if not isinstance(t.o, str):
                raise OntologySyntaxError("domain/range must be an IRI", t.line, t.col)
            is_domain = t.p == RDFS + "domain"
            if kind_of[t.s] == "object" or is_domain:
                (domains if is_domain else ranges).setdefault(t.s, []).append((t.o, t))
        elif t.p in (RDFS + "subClassOf", OWL + "equivalentClass") and t.o != OWL + "Thing":
            anchors.append(("axiom", t))
        if kind_of.get(t.s) == "object" and t.s not in object_seen:
            object_seen.add(t.s)
            anchors.append(("object", t.s))

    for iri, entries in domains.items():
        if kind_of[iri] != "datatype":
            continue
        for cls_iri, t in entries:
            cls = require_class(cls_iri, t)
            el = Element(names[iri], membership.get(iri, 1.0))
            if any(p.name == el.name for p in props[cls]):
                raise DuplicateDeclarationError(
                    f"duplicate property {el.name!r} on class {cls!r}", t.line, t.col)
            props[cls].append(el)

    edges = []
    edge_keys = set()
    for kind, payload in anchors:
        if kind == "axiom":
            t = payload
            if not isinstance(t.o, str):
                raise OntologySyntaxError("class axiom object must be an IRI", t.line, t.col)
            label = SUBCLASS_OF if t.p == RDFS + "subClassOf" else EQUIVALENT_CLASS
            new = [(require_class(t.s, t), require_class(t.o, t), label, 1.0)]
        else:
            for iri, t in domains.get(payload, []) + ranges.get(payload, []):
                require_class(iri, t)
            new = [(names[d], names[r], names[payload], membership.get(payload, 1.0))
                   for d, _ in domains.get(payload, []) for r, _ in ranges.get(payload, [])]
        for src, dst, label, mu in new:
            if (src, dst, label) not in edge_keys:
                edge_keys.add((src, dst, label))
                edges.append(RelationEdge(src, dst, label, mu))

    return OntologyGraph(tuple(classes), props, tuple(edges), source_id)


FORMATS = {"turtle": "turtle", "turtle-subset": "turtle", "ttl": "turtle",
           "json": "json", "json-interchange": "json"}


def parse_ontology(document: str, format: str = "turtle", source_id: str = "") -> OntologyGraph:
    """Parse an ontology document into an :class:`OntologyGraph`.

    ``format`` is ``"turtle"`` (the supported subset) or ``"json"``.
    Raises a subclass of :class:`OntologyError` on bad input; syntax errors
    carry line and column.
    """
    try:
        kind = FORMATS[format.lower()]
    except KeyError:
        raise ValueError(f"unknown ontology format {format!r}") from None
    if kind == "json":
        return _parse_json(document, source_id)
    return _parse_turtle(document, source_id)


def guess_format(path: str) -> str:
    return "json" if str(path).lower().endswith(".json") else "turtle"
