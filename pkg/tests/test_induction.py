import random

import pytest
from hypothesis import given, settings, strategies as st

from ontorules import (Attribute, Conjunction, DataSet, EmptyDatasetError, LearnerConfig,
                       Selector, evaluate, learn_rules, specialize)

from conftest import perfect_rows
from oracles import best_score, random_dataset, replay_check

C, P, I, O = Attribute


def conj(*pairs):
    return Conjunction(tuple(Selector(a, v) for a, v in pairs))


def test_evaluate_empty_conjunction(table2):
    stats = evaluate(conj(), Selector(C, "House"), table2)
    assert stats == (8, 8) and stats.laplace == 0.9


def test_evaluate_two_selectors(table2):
    stats = evaluate(conj((I, "builds")), Selector(O, "partOf"), table2)
    assert stats == (4, 2) and stats.laplace == 0.5


def test_evaluate_empty_dataset():
    stats = evaluate(conj((I, "x")), Selector(O, "y"), DataSet())
    assert stats == (0, 0) and stats.laplace == 0.5


def test_specialize_root(table2):
    children = specialize(conj(), table2, O)
    assert [str(c) for c in children] == [
        "class=House", "property=Door", "property=Window", "incoming=builds", "incoming=liveIn"]


def test_specialize_no_free_attribute(table2):
    assert specialize(conj((C, "House"), (P, "Door"), (I, "liveIn")), table2, O) == []


def test_specialize_rejects_target_in_conjunction(table2):
    with pytest.raises(ValueError):
        specialize(conj((P, "Door")), table2, P)


def test_conjunction_one_selector_per_attribute():
    with pytest.raises(ValueError):
        conj((P, "Door"), (P, "Window"))


def test_config_validation():
    assert LearnerConfig() == LearnerConfig(C, 2, 0.8, 5, 3)
    for bad in (dict(min_coverage=0), dict(beam_width=0), dict(max_antecedent_len=4),
                dict(min_laplace=1.0), dict(min_laplace=0.0), dict(max_antecedent_len=0)):
        with pytest.raises(ValueError):
            LearnerConfig(**bad)


def test_learn_class_from_table_ii(table2):
    rules = learn_rules(table2, LearnerConfig(target=C))
    assert [str(r) for r in rules] == ["IF true THEN class=House [8/8]"]


def test_learn_outgoing_from_table_ii_finds_nothing(table2):
    assert learn_rules(table2, LearnerConfig(target=O)) == []


def test_learn_perfect_dependency(perfect):
    rules = learn_rules(perfect, LearnerConfig(target=O))
    assert [str(r) for r in rules] == [
        "IF incoming=builds THEN outgoing=equivalentOf [6/6]",
        "IF incoming=liveIn THEN outgoing=partOf [6/6]",
    ]


def test_learn_empty_dataset():
    with pytest.raises(EmptyDatasetError):
        learn_rules(DataSet(), LearnerConfig())


def test_none_values_are_learnable(house_graph):
    from ontorules import extract_dataset
    ds = extract_dataset(house_graph)
    rules = learn_rules(ds, LearnerConfig(target=P, min_coverage=2, min_laplace=0.7))
    assert [str(r) for r in rules] == ["IF incoming=∅ THEN property=∅ [2/2]",
                                       "IF outgoing=∅ THEN property=∅ [2/2]"]


def test_stats_reproduce_on_residual_rows():
    ds = DataSet.from_values(perfect_rows() + [("House", "Door", "owns", "partOf")] * 2)
    rules = learn_rules(ds, LearnerConfig(target=O))
    by_value = {}
    for rule in rules:
        by_value.setdefault(rule.consequent.value, []).append(rule)
    for value, vrules in by_value.items():
        rows = list(ds.rows)
        for rule in vrules:
            sub = DataSet(tuple(r._replace(row_index=i) for i, r in enumerate(rows, 1)))
            assert evaluate(rule.antecedent, rule.consequent, sub) == rule.stats
            rows = [r for r in rows if not (rule.antecedent.matches(r) and rule.consequent.matches(r))]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(list(Attribute)))
def test_learner_confirmed_by_exhaustive_oracle(seed, target):
    ds = random_dataset(random.Random(seed))
    config = LearnerConfig(target=target, min_coverage=1, min_laplace=0.6)
    rules = learn_rules(ds, config)
    assert replay_check(ds, rules, config) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(list(Attribute)))
def test_wide_beam_finds_exhaustive_optimum(seed, target):
    ds = random_dataset(random.Random(seed))
    config = LearnerConfig(target=target, min_coverage=1, min_laplace=0.5, beam_width=10_000)
    rules = learn_rules(ds, config)
    firsts = {}
    for rule in rules:
        firsts.setdefault(rule.consequent.value, rule)
    for value in ds.values(target):
        best = best_score(ds, config, value)
        if best is None or best[0] < config.min_laplace:
            assert value not in firsts
        else:
            r = firsts[value]
            assert (r.stats.laplace, r.stats.covered, -len(r.antecedent)) == best


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(list(Attribute)))
def test_coverage_strictly_decreases(seed, target):
    ds = random_dataset(random.Random(seed))
    config = LearnerConfig(target=target, min_coverage=1, min_laplace=0.55)
    for rule in learn_rules(ds, config):
        assert rule.stats.correct >= 1
        assert rule.stats.covered >= config.min_coverage
        assert rule.stats.laplace >= config.min_laplace
        assert target not in rule.antecedent.attributes
