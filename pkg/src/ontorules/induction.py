"""Separate-and-conquer beam learner for crisp conjunctive rules.

For every value ``v`` of the target column the learner repeatedly searches,
general-to-specific, for the conjunction of ``attribute=value`` selectors
that best predicts ``target=v`` under the Laplace estimate
``(correct + 1) / (covered + 2)``, accepts it if it clears the thresholds,
and removes the rows it explains correctly. Each target value starts from
the full dataset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .dataset import ATTRIBUTES, Attribute, DataSet, format_value, value_key

ALGORITHM_ID = "cover-beam-v1"


class Selector(NamedTuple):
    attribute: Attribute
    value: Optional[str]

    def matches(self, row) -> bool:
        return row.cells[self.attribute].value == self.value

    def __str__(self):
        return f"{self.attribute.key}={format_value(self.value)}"

    def sort_key(self):
        return (int(self.attribute), value_key(self.value))


@dataclass(frozen=True)
class Conjunction:
    """Antecedent of a rule; selectors are kept in attribute order."""

    selectors: tuple = ()

    def __post_init__(self):
        sels = tuple(sorted((Selector(Attribute(a), v) for a, v in self.selectors),
                            key=Selector.sort_key))
        attrs = [s.attribute for s in sels]
        if len(set(attrs)) != len(attrs):
            raise ValueError("a conjunction may hold at most one selector per attribute")
        object.__setattr__(self, "selectors", sels)

    def __len__(self):
        return len(self.selectors)

    def __iter__(self):
        return iter(self.selectors)

    @property
    def attributes(self) -> set:
        return {s.attribute for s in self.selectors}

    def matches(self, row) -> bool:
        return all(s.matches(row) for s in self.selectors)

    def extend(self, selector: Selector) -> "Conjunction":
        return Conjunction(self.selectors + (selector,))

    def __str__(self):
        return " AND ".join(map(str, self.selectors)) if self.selectors else "true"


class RuleStats(NamedTuple):
    covered: int
    correct: int

    @property
    def laplace(self) -> float:
        return (self.correct + 1) / (self.covered + 2)


@dataclass(frozen=True)
class Rule:
    antecedent: Conjunction
    consequent: Selector
    stats: RuleStats

    def __post_init__(self):
        if self.consequent.attribute in self.antecedent.attributes:
            raise ValueError("antecedent constrains the consequent attribute")

    def __str__(self):
        return f"IF {self.antecedent} THEN {self.consequent} [{self.stats.covered}/{self.stats.correct}]"


@dataclass(frozen=True)
class LearnerConfig:
    target: Attribute = Attribute.CLASS
    min_coverage: int = 2
    min_laplace: float = 0.8
    beam_width: int = 5
    max_antecedent_len: int = 3

    def __post_init__(self):
        object.__setattr__(self, "target", Attribute(self.target))
        for name in ("min_coverage", "beam_width", "max_antecedent_len"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.max_antecedent_len > len(ATTRIBUTES) - 1:
            raise ValueError(f"max_antecedent_len must be at most {len(ATTRIBUTES) - 1}")
        if not 0.0 < self.min_laplace < 1.0:
            raise ValueError(f"min_laplace must lie in (0, 1), got {self.min_laplace!r}")


def evaluate(conj: Conjunction, consequent: Selector, dataset: DataSet) -> RuleStats:
    covered = correct = 0
    for row in dataset.rows:
        if conj.matches(row):
            covered += 1
            if consequent.matches(row):
                correct += 1
    return RuleStats(covered, correct)


def specialize(conj: Conjunction, dataset: DataSet, target: Attribute) -> list:
    """All one-selector refinements of ``conj`` over free, non-target attributes."""
    if target in conj.attributes:
        raise ValueError("conjunction constrains the target attribute")
    children = []
    for attr in ATTRIBUTES:
        if attr == target or attr in conj.attributes:
            continue
        for value in dataset.values(attr):
            children.append(conj.extend(Selector(attr, value)))
    return children


class _Encoded:
    """Integer-coded columns; codes follow :func:`value_key` order."""

    def __init__(self, dataset: DataSet):
        self.values = {}
        self.codes = {}
        for attr in ATTRIBUTES:
            column = dataset.column(attr)
            values = sorted(set(column), key=value_key)
            index = {v: i for i, v in enumerate(values)}
            self.values[attr] = values
            self.codes[attr] = np.fromiter((index[v] for v in column), dtype=np.int64,
                                           count=len(column))


class _Candidate(NamedTuple):
    rank: tuple            # (-laplace, -covered, length, enumeration order)
    selectors: tuple       # ((attr, code), ...) in attribute order
    rows: np.ndarray       # positions within the active rows


def _rank(covered, correct, length, order):
    return (-(correct + 1) / (covered + 2), -covered, length, order)


def _search(enc, cols, pos, config, free):
    """Beam search over the active rows; returns the best viable candidate or None."""
    n = len(pos)
    npos = int(pos.sum())
    viable = lambda cov, cor: cov >= config.min_coverage and cor >= 1
    root = _Candidate(_rank(n, npos, 0, 0), (), np.arange(n))
    best = root if viable(n, npos) else None
    beam = [root]
    for length in range(1, config.max_antecedent_len + 1):
        seen = set()
        children = []
        for parent in beam:
            constrained = {a for a, _ in parent.selectors}
            sub_pos = pos[parent.rows]
            for attr in free:
                if attr in constrained:
                    continue
                col = cols[attr][parent.rows]
                k = len(enc.values[attr])
                cov = np.bincount(col, minlength=k)
                cor = np.bincount(col[sub_pos], minlength=k)
                # candidates that can never be accepted are pruned with their subtrees
                for code in np.flatnonzero((cov >= config.min_coverage) & (cor >= 1)):
                    sels = tuple(sorted(parent.selectors + ((attr, int(code)),)))
                    if sels in seen:
                        continue
                    seen.add(sels)
                    rank = _rank(int(cov[code]), int(cor[code]), length, len(children))
                    children.append((rank, sels, parent, attr, int(code)))
        if not children:
            break
        children.sort(key=lambda c: c[0])
        beam = []
        for rank, sels, parent, attr, code in children[:config.beam_width]:
            rows = parent.rows[cols[attr][parent.rows] == code]
            beam.append(_Candidate(rank, sels, rows))
        if best is None or beam[0].rank < best.rank:
            best = beam[0]
    if best is not None and len(best.selectors) > 1:
        best = _generalize(best, cols, pos, config)
    return best


def _generalize(best, cols, pos, config):
    """Prefer a strict subset of the winner that is at least as good."""
    n = len(pos)
    for size in range(len(best.selectors)):
        for subset in itertools.combinations(best.selectors, size):
            mask = np.ones(n, dtype=bool)
            for attr, code in subset:
                mask &= cols[attr] == code
            cov = int(mask.sum())
            cor = int((mask & pos).sum())
            if cov < config.min_coverage or cor < 1:
                continue
            rank = _rank(cov, cor, size, -1)
            if rank < best.rank:
                best = _Candidate(rank, subset, np.flatnonzero(mask))
    return best


def _learn_value(enc, config, code, free):
    target_codes = enc.codes[config.target]
    active = np.arange(len(target_codes))
    rules = []
    while True:
        pos = target_codes[active] == code
        if not pos.any():
            break
        cols = {attr: enc.codes[attr][active] for attr in free}
        best = _search(enc, cols, pos, config, free)
        if best is None:
            break
        covered = len(best.rows)
        correct = int(pos[best.rows].sum())
        if (correct + 1) / (covered + 2) < config.min_laplace:
            break
        antecedent = Conjunction(tuple(Selector(a, enc.values[a][c]) for a, c in best.selectors))
        consequent = Selector(config.target, enc.values[config.target][code])
        rules.append(Rule(antecedent, consequent, RuleStats(covered, correct)))
        keep = np.ones(len(active), dtype=bool)
        keep[best.rows[pos[best.rows]]] = False
        active = active[keep]
    return rules


class EmptyDatasetError(ValueError):
    pass


def learn_rules(dataset: DataSet, config: LearnerConfig = LearnerConfig()) -> list:
    """Induce rules predicting ``config.target``; see the module docstring."""
    if len(dataset) == 0:
        raise EmptyDatasetError("cannot learn from an empty dataset")
    enc = _Encoded(dataset)
    free = [a for a in ATTRIBUTES if a != config.target]
    rules = []
    for code in range(len(enc.values[config.target])):
        rules.extend(_learn_value(enc, config, code, free))
    return rules
