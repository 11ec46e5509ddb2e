"""Rule induction from ontologies: dataset extraction, covering learner,
fuzzy annotation, a rule knowledge base and a forward-chaining reasoner."""

from .dataset import (ATTRIBUTES, NONE, Attribute, Cell, DataRow, DataSet, dataset_to_csv,
                      extract_class_rows, extract_dataset, write_csv)
from .fuzzy import FuzzyConfig, FuzzyRule, alpha_cut, annotate_rule, learn_fuzzy_rules
from .induction import (ALGORITHM_ID, Conjunction, EmptyDatasetError, LearnerConfig, Rule,
                        RuleStats, Selector, evaluate, learn_rules, specialize)
from .inference import (Derivation, Fact, InferenceResult, fire, format_facts, infer,
                        parse_facts)
from .kb import (AddReport, KBFormatError, KBVersionError, KnowledgeBase, KnowledgeBaseError,
                 Provenance, load, save)
from .ontology import (Element, OntologyError, OntologyGraph, OntologySyntaxError, RelationEdge,
                       categorize_parts, dump_json, parse_ontology)

__version__ = "0.1.0"
