"""Brute-force reference computations, written independently of the library paths they check."""

import itertools

from ontorules import ATTRIBUTES, DataSet, OntologyGraph, RelationEdge


def brute_force_rows(graph, cls):
    """Enumerate a class's (property, incoming, outgoing) combinations straight off the raw graph."""
    props = [p.name for p in graph.datatype_properties[cls]]
    incoming, outgoing = [], []
    for edge in graph.relations:
        if edge.target == cls and edge.label not in incoming:
            incoming.append(edge.label)
        if edge.source == cls and edge.label not in outgoing:
            outgoing.append(edge.label)
    combos = list(itertools.product(props or [None], incoming or [None], outgoing or [None]))
    return [(cls, p, i, o) for p, i, o in combos]


def random_graph(rng, max_classes=8, max_per_category=5):
    n = rng.randint(0, max_classes)
    classes = [f"C{i}" for i in range(n)]
    props = {c: rng.sample([f"p{j}" for j in range(8)], rng.randint(0, max_per_category))
             for c in classes}
    edges, keys = [], set()
    inc = {c: set() for c in classes}
    out = {c: set() for c in classes}
    for _ in range(rng.randint(0, 3 * n)):
        s, t, label = rng.choice(classes), rng.choice(classes), f"r{rng.randint(0, 7)}"
        if (s, t, label) in keys:
            continue
        if len(out[s] | {label}) > max_per_category or len(inc[t] | {label}) > max_per_category:
            continue
        keys.add((s, t, label))
        out[s].add(label)
        inc[t].add(label)
        edges.append(RelationEdge(s, t, label, rng.choice([1.0, 0.5, 0.25])))
    return OntologyGraph(tuple(classes), props, tuple(edges))


def random_dataset(rng, max_rows=12, max_values=4, fuzzy=False):
    n = rng.randint(1, max_rows)
    pools = []
    for attr in ATTRIBUTES:
        k = rng.randint(1, max_values)
        pool = [f"{attr.key[0]}{j}" for j in range(k)]
        if attr != ATTRIBUTES[0] and rng.random() < 0.3:
            pool[-1] = None
        pools.append(pool)
    rows = [tuple(rng.choice(pool) for pool in pools) for _ in range(n)]
    mus = None
    if fuzzy:
        mus = [tuple(rng.choice([0.2, 0.5, 0.7, 0.9, 1.0]) for _ in ATTRIBUTES) for _ in rows]
    return DataSet.from_values(rows, mus)


def all_conjunctions(rows, target, max_len):
    """Every conjunction (as a tuple of (attr, value) pairs) over non-target columns."""
    free = [a for a in ATTRIBUTES if a != target]
    values = {a: sorted({r[a] for r in rows}, key=lambda v: (v is not None, v or "")) for a in free}
    for size in range(max_len + 1):
        for attrs in itertools.combinations(free, size):
            for vals in itertools.product(*(values[a] for a in attrs)):
                yield tuple(zip(attrs, vals))


def counts(rows, conj, target, value):
    covered = [r for r in rows if all(r[a] == v for a, v in conj)]
    return len(covered), sum(1 for r in covered if r[target] == value)


def laplace(covered, correct):
    return (correct + 1) / (covered + 2)


def replay_check(dataset, rules, config):
    """Re-derive each covering step by exhaustive enumeration.

    Returns a list of problems (empty when every rule is confirmed).
    """
    problems = []
    target = config.target
    all_rows = [tuple(c.value for c in row.cells) for row in dataset.rows]
    by_value = {}
    for rule in rules:
        by_value.setdefault(rule.consequent.value, []).append(rule)
    for value, vrules in by_value.items():
        rows = list(all_rows)
        for rule in vrules:
            conj = tuple((s.attribute, s.value) for s in rule.antecedent)
            table = {frozenset(c): counts(rows, c, target, value)
                     for c in all_conjunctions(rows, target, config.max_antecedent_len)}
            got = table.get(frozenset(conj))
            if got is None:
                problems.append(f"{rule}: not an enumerable conjunction")
                continue
            if got != (rule.stats.covered, rule.stats.correct):
                problems.append(f"{rule}: oracle stats {got}")
            cov, cor = got
            if cov < config.min_coverage or laplace(cov, cor) < config.min_laplace:
                problems.append(f"{rule}: fails thresholds per oracle")
            for size in range(len(conj)):
                for sub in itertools.combinations(conj, size):
                    scov, scor = table[frozenset(sub)]
                    if laplace(scov, scor) >= laplace(cov, cor) and scov >= cov:
                        problems.append(f"{rule}: dominated by subset {sub}")
            rows = [r for r in rows
                    if not (all(r[a] == v for a, v in conj) and r[target] == value)]
    return problems


def best_score(dataset, config, value):
    """Exhaustive optimum (laplace, covered, -length) among acceptable conjunctions on the full data."""
    rows = [tuple(c.value for c in row.cells) for row in dataset.rows]
    best = None
    for conj in all_conjunctions(rows, config.target, config.max_antecedent_len):
        cov, cor = counts(rows, conj, config.target, value)
        if cov < config.min_coverage or cor < 1:
            continue
        score = (laplace(cov, cor), cov, -len(conj))
        if best is None or score > best:
            best = score
    return best


def random_rules(rng, n_rules=20, n_statements=10):
    """Random fuzzy rules over a small statement pool; cycles are likely."""
    from ontorules import Attribute, Conjunction, FuzzyRule, Rule, RuleStats, Selector

    pool = [Selector(Attribute(i % 4), f"s{i}") for i in range(n_statements)]
    rules = []
    for _ in range(rng.randint(0, n_rules)):
        consequent = rng.choice(pool)
        others = [s for s in pool if s.attribute != consequent.attribute]
        chosen = {}
        for s in rng.sample(others, rng.randint(0, min(3, len(others)))):
            chosen.setdefault(s.attribute, s)
        antecedent = Conjunction(tuple(chosen.values()))
        a = 1.0 if not chosen else rng.choice([0.3, 0.6, 0.8, 1.0])
        rules.append(FuzzyRule(Rule(antecedent, consequent, RuleStats(1, 1)),
                               a, rng.choice([0.4, 0.65, 0.9, 1.0])))
    return pool, rules
