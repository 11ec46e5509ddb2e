"""Rule store with provenance, max-merge deduplication and a line-oriented file format.

File layout: the header line ``swes-kb v1`` followed by one JSON object per
entry, each line newline-terminated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import NamedTuple, Optional

from .dataset import Attribute
from .fuzzy import FuzzyRule
from .induction import Conjunction, Rule, RuleStats, Selector
from .ontology import NONE_SYMBOL, check_membership

HEADER = "swes-kb v1"
_HEADER_PREFIX = "swes-kb "


class KnowledgeBaseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class KBFormatError(KnowledgeBaseError):
    pass


class KBVersionError(KnowledgeBaseError):
    pass


def _check_timestamp(text: str) -> None:
    # fromisoformat on 3.10 does not accept a trailing 'Z'
    datetime.fromisoformat(text[:-1] + "+00:00" if text.endswith("Z") else text)


def utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Provenance:
    ontology_id: str
    algorithm_id: str
    target: Attribute
    created_at: str

    def __post_init__(self):
        object.__setattr__(self, "target", Attribute(self.target))
        for name in ("ontology_id", "algorithm_id", "created_at"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise ValueError(f"provenance field {name} must be a non-empty string")
        try:
            _check_timestamp(self.created_at)
        except ValueError:
            raise ValueError(f"created_at {self.created_at!r} is not an ISO-8601 timestamp") from None


@dataclass
class Entry:
    rule: FuzzyRule
    provenance: Provenance


class AddReport(NamedTuple):
    added: int
    merged: int


class KnowledgeBase:
    """Insertion-ordered entries, unique by structural rule key.

    Not synchronised: callers serialise mutations.
    """

    def __init__(self, entries=()):
        self._entries = []
        self._index = {}
        for entry in entries:
            if not isinstance(entry, Entry):
                entry = Entry(*entry)
            if entry.rule.key in self._index:
                raise ValueError(f"duplicate rule {entry.rule}")
            self._index[entry.rule.key] = len(self._entries)
            self._entries.append(entry)

    @property
    def entries(self) -> list:
        return list(self._entries)

    @property
    def rules(self) -> list:
        return [e.rule for e in self._entries]

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, KnowledgeBase) and self._entries == other._entries

    def add_rules(self, rules, prov: Provenance) -> AddReport:
        """Append new rules; on a key collision raise the stored (a, b) to the componentwise max."""
        added = merged = 0
        for rule in rules:
            pos = self._index.get(rule.key)
            if pos is None:
                self._index[rule.key] = len(self._entries)
                self._entries.append(Entry(rule, prov))
                added += 1
                continue
            old = self._entries[pos]
            a, b = max(old.rule.a, rule.a), max(old.rule.b, rule.b)
            if (a, b) != (old.rule.a, old.rule.b):
                self._entries[pos] = Entry(FuzzyRule(old.rule.base, a, b), old.provenance)
            merged += 1
        return AddReport(added, merged)


def selector_to_json(sel: Selector) -> dict:
    return {"attribute": sel.attribute.key,
            "value": NONE_SYMBOL if sel.value is None else sel.value}


def entry_to_json(entry: Entry) -> str:
    rule, prov = entry.rule, entry.provenance
    obj = {
        "antecedent": [selector_to_json(s) for s in rule.antecedent],
        "consequent": selector_to_json(rule.consequent),
        "a": rule.a,
        "b": rule.b,
        "stats": {"covered": rule.stats.covered, "correct": rule.stats.correct},
        "provenance": {"ontology_id": prov.ontology_id, "algorithm_id": prov.algorithm_id,
                       "target": prov.target.key, "created_at": prov.created_at},
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def save(kb: KnowledgeBase) -> bytes:
    lines = [HEADER] + [entry_to_json(e) for e in kb.entries]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _expect_keys(obj, keys, where):
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object")
    if set(obj) != set(keys):
        raise ValueError(f"{where}: expected keys {sorted(keys)}, found {sorted(obj)}")


def _attr(text, where):
    if not isinstance(text, str) or text != text.lower():
        raise ValueError(f"{where}: attribute must be a lowercase name")
    try:
        return Attribute.parse(text)
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def _sel_from_json(obj, where) -> Selector:
    _expect_keys(obj, ("attribute", "value"), where)
    value = obj["value"]
    if not isinstance(value, str) or not value:
        raise ValueError(f"{where}: value must be a non-empty string")
    return Selector(_attr(obj["attribute"], where), None if value == NONE_SYMBOL else value)


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{where}: expected a non-negative integer")
    return value


def entry_from_json(text: str) -> Entry:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"column {exc.colno}: {exc.msg}") from None
    _expect_keys(obj, ("antecedent", "consequent", "a", "b", "stats", "provenance"), "entry")
    if not isinstance(obj["antecedent"], list):
        raise ValueError("antecedent: expected an array")
    antecedent = Conjunction(tuple(_sel_from_json(s, f"antecedent[{i}]")
                                   for i, s in enumerate(obj["antecedent"])))
    consequent = _sel_from_json(obj["consequent"], "consequent")
    _expect_keys(obj["stats"], ("covered", "correct"), "stats")
    stats = RuleStats(_int(obj["stats"]["covered"], "stats.covered"),
                      _int(obj["stats"]["correct"], "stats.correct"))
    if stats.correct > stats.covered:
        raise ValueError("stats: correct exceeds covered")
    prov = obj["provenance"]
    _expect_keys(prov, ("ontology_id", "algorithm_id", "target", "created_at"), "provenance")
    provenance = Provenance(prov["ontology_id"], prov["algorithm_id"],
                            _attr(prov["target"], "provenance.target"), prov["created_at"])
    rule = FuzzyRule(Rule(antecedent, consequent, stats),
                     check_membership(obj["a"]), check_membership(obj["b"]))
    return Entry(rule, provenance)


def load(data: bytes) -> KnowledgeBase:
    """Parse bytes produced by :func:`save`; errors name the offending line."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise KBFormatError(f"invalid UTF-8 at byte {exc.start}") from None
    lines = text.split("\n")
    if not text:
        raise KBFormatError("empty file, missing header", 1)
    header = lines[0]
    if header != HEADER:
        if header.startswith(_HEADER_PREFIX):
            raise KBVersionError(f"unsupported version {header[len(_HEADER_PREFIX):]!r}, "
                                 f"expected {HEADER!r}", 1)
        raise KBFormatError(f"bad header {header[:40]!r}, expected {HEADER!r}", 1)
    if lines[-1] != "":
        raise KBFormatError("truncated entry (no terminating newline)", len(lines))
    kb = KnowledgeBase()
    for lineno, line in enumerate(lines[1:-1], start=2):
        try:
            entry = entry_from_json(line)
        except ValueError as exc:
            raise KBFormatError(str(exc), lineno) from None
        if entry.rule.key in kb._index:
            raise KBFormatError(f"duplicate rule {entry.rule}", lineno)
        kb._index[entry.rule.key] = len(kb._entries)
        kb._entries.append(entry)
    return kb
