"""Membership annotation of crisp rules: IF x (mu=a) THEN y (mu=b)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

from .dataset import DataSet
from .induction import LearnerConfig, Rule, learn_rules
from .ontology import check_membership


def format_mu(mu: float) -> str:
    return str(int(mu)) if float(mu).is_integer() else repr(float(mu))


@dataclass(frozen=True)
class FuzzyRule:
    base: Rule
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", check_membership(self.a))
        object.__setattr__(self, "b", check_membership(self.b))
        if len(self.base.antecedent) == 0 and self.a != 1.0:
            raise ValueError("a rule with an empty antecedent must have a = 1")

    @property
    def antecedent(self):
        return self.base.antecedent

    @property
    def consequent(self):
        return self.base.consequent

    @property
    def stats(self):
        return self.base.stats

    @property
    def key(self):
        """Structural identity: antecedent as a set plus consequent."""
        return frozenset(self.base.antecedent.selectors), self.base.consequent

    def __str__(self):
        stats = self.base.stats
        return (f"IF {self.base.antecedent} (μ={format_mu(self.a)}) "
                f"THEN {self.base.consequent} (μ={format_mu(self.b)}) "
                f"[{stats.covered}/{stats.correct}]")


@dataclass(frozen=True)
class FuzzyConfig:
    alpha: float = 0.0
    tnorm: ClassVar[str] = "min"

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_membership(self.alpha))


def annotate_rule(rule: Rule, dataset: DataSet) -> FuzzyRule:
    """Attach (a, b) as minima over the rows the rule predicts correctly.

    ``a`` is 1 for an empty antecedent; rules with no supporting row get
    ``b = 0`` (and ``a = 0`` unless the antecedent is empty).
    """
    antecedent = rule.antecedent.selectors
    a = b = None
    for row in dataset.rows:
        if not (rule.antecedent.matches(row) and rule.consequent.matches(row)):
            continue
        row_a = min((row.cells[s.attribute].mu for s in antecedent), default=1.0)
        row_b = row.cells[rule.consequent.attribute].mu
        a = row_a if a is None else min(a, row_a)
        b = row_b if b is None else min(b, row_b)
    if not antecedent:
        a = 1.0
    return FuzzyRule(rule, 0.0 if a is None else a, 0.0 if b is None else b)


def alpha_cut(rules, alpha: float) -> list:
    return [r for r in rules if min(r.a, r.b) >= alpha]


def learn_fuzzy_rules(dataset: DataSet, lconf: LearnerConfig = LearnerConfig(),
                      fconf: FuzzyConfig = FuzzyConfig()) -> list:
    rules = learn_rules(dataset, lconf)
    return alpha_cut([annotate_rule(r, dataset) for r in rules], fconf.alpha)
