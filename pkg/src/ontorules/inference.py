"""Forward-chaining fuzzy inference with min/max (Goedel) semantics.

A rule fires when each antecedent selector has a fact; the conclusion gets
``min(a, premise mus..., b)``. Conclusions are merged into the fact base
by max, round after round, until a round changes nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .dataset import Attribute, format_value, value_key
from .induction import Selector
from .kb import KnowledgeBase, selector_to_json
from .ontology import NONE_SYMBOL, check_membership

FIXPOINT = "fixpoint"
ROUND_LIMIT_EXCEEDED = "round-limit-exceeded"


class Fact(NamedTuple):
    statement: Selector
    mu: float = 1.0

    def __str__(self):
        return f"{self.statement} {self.mu:.6f}"


class Derivation(NamedTuple):
    conclusion: Fact
    rule: object
    premises: tuple
    round: int


@dataclass
class InferenceResult:
    facts: dict
    derivations: list = field(default_factory=list)
    rounds: int = 0
    status: str = FIXPOINT

    @property
    def converged(self) -> bool:
        return self.status == FIXPOINT


def fire(rule, facts: dict) -> Optional[Fact]:
    """Apply one rule to a statement->mu mapping; None if a premise is missing."""
    strength = rule.a
    for sel in rule.antecedent:
        mu = facts.get(sel)
        if mu is None:
            return None
        strength = min(strength, mu)
    return Fact(rule.consequent, min(strength, rule.b))


def _premises(rule, facts):
    return tuple(Fact(sel, facts[sel]) for sel in rule.antecedent)


def infer(kb, initial=(), max_rounds: int = 1000) -> InferenceResult:
    """Run rules to fixpoint from ``initial`` facts.

    ``kb`` is a :class:`KnowledgeBase` or any iterable of fuzzy rules.
    Each round fires every rule against the fact base as it stood at the
    start of the round. ``rounds`` counts rounds that changed the base; if
    ``max_rounds`` such rounds pass without reaching a quiet round, the
    partial result is returned with status ``round-limit-exceeded``.
    """
    if isinstance(max_rounds, bool) or not isinstance(max_rounds, int) or max_rounds < 1:
        raise ValueError("max_rounds must be a positive integer")
    rules = kb.rules if isinstance(kb, KnowledgeBase) else list(kb)
    facts = {}
    for fact in initial:
        mu = check_membership(fact.mu)
        if mu > facts.get(fact.statement, -1.0):
            facts[fact.statement] = mu
    result = InferenceResult(facts)
    while True:
        snapshot = dict(facts)
        pending = []
        for rule in rules:
            conclusion = fire(rule, snapshot)
            if conclusion is not None and conclusion.mu > facts.get(conclusion.statement, -1.0):
                facts[conclusion.statement] = conclusion.mu
                pending.append(Derivation(conclusion, rule, _premises(rule, snapshot),
                                          result.rounds + 1))
        if not pending:
            return result
        if result.rounds == max_rounds:
            # the extra round is evaluated only to detect non-convergence; undo it
            facts.clear()
            facts.update(snapshot)
            result.status = ROUND_LIMIT_EXCEEDED
            return result
        result.rounds += 1
        result.derivations.extend(pending)


class FactsFormatError(ValueError):
    def __init__(self, message: str, line: int):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_statement(text: str) -> Selector:
    attr, sep, value = text.partition("=")
    if not sep:
        raise ValueError(f"expected attribute=value, found {text!r}")
    value = value.strip()
    if not value:
        raise ValueError("empty value")
    return Selector(Attribute.parse(attr), None if value == NONE_SYMBOL else value)


def parse_facts(text: str) -> list:
    """Read ``attribute=value [mu]`` lines; blank lines and ``#`` comments are skipped."""
    facts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise FactsFormatError(f"expected 'attribute=value [mu]', found {line!r}", lineno)
        try:
            statement = parse_statement(parts[0])
            mu = check_membership(float(parts[1])) if len(parts) == 2 else 1.0
        except ValueError as exc:
            raise FactsFormatError(str(exc), lineno) from None
        facts.append(Fact(statement, mu))
    return facts


def format_facts(facts: dict, query=None) -> str:
    """One ``attribute=value mu`` line per statement, sorted; ``query`` filters statements."""
    items = sorted(facts.items(), key=lambda kv: (int(kv[0].attribute), value_key(kv[0].value)))
    if query:
        wanted = set(query)
        items = [kv for kv in items if kv[0] in wanted]
    return "".join(f"{sel.attribute.key}={format_value(sel.value)} {mu:.6f}\n" for sel, mu in items)


TRACE_HEADER = "swes-trace v1"


def format_trace(derivations) -> str:
    lines = [TRACE_HEADER]
    for d in derivations:
        rule = d.rule
        obj = {
            "round": d.round,
            "conclusion": dict(selector_to_json(d.conclusion.statement), mu=d.conclusion.mu),
            "premises": [dict(selector_to_json(p.statement), mu=p.mu) for p in d.premises],
            "rule": {"antecedent": [selector_to_json(s) for s in rule.antecedent],
                     "consequent": selector_to_json(rule.consequent), "a": rule.a, "b": rule.b},
        }
        lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    return "\n".join(lines) + "\n"
