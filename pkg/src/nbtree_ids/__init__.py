"""Hybrid naive Bayes / decision tree intrusion detection on KDD99-format records."""
from .data_model import (CLASS_ORDER, KDD99_LABELS, KDD99_SCHEMA, AttackClass, AttributeKind, AttributeSchema,
                         DataError, Dataset, Example, LabelMapper, SchemaMismatchError, load_dataset,
                         load_label_mapper, load_schema, map_attack_label, parse_record)
from .decision_tree import ID3Classifier, classify_tree, entropy, info_gain, train_id3
from .evaluation import ConfusionMatrix, MetricsReport, binary_metrics, confusion, dr_fp, evaluate
from .feature_selection import AttributeRanking, InfoGainSelector, rank_attributes, select_top_k
from .hybrid import HybridNBTreeClassifier, build_hybrid, classify_hybrid, relabel_ml
from .naive_bayes import NaiveBayesClassifier, NBModel, classify_nb, posterior_scores, train_nb
from .preprocessing import (BoundaryDiscretizer, DiscretizationPlan, MissingValueImputer, apply_discretization,
                            build_discretization, deduplicate, impute_missing, resolve_contradictions)
from .serialization import dump, dumps, load, loads

__version__ = "0.1.0"

__all__ = [
    "CLASS_ORDER", "KDD99_LABELS", "KDD99_SCHEMA", "AttackClass", "AttributeKind", "AttributeSchema",
    "DataError", "Dataset", "Example", "LabelMapper", "SchemaMismatchError", "load_dataset",
    "load_label_mapper", "load_schema", "map_attack_label", "parse_record",
    "ID3Classifier", "classify_tree", "entropy", "info_gain", "train_id3",
    "ConfusionMatrix", "MetricsReport", "binary_metrics", "confusion", "dr_fp", "evaluate",
    "AttributeRanking", "InfoGainSelector", "rank_attributes", "select_top_k",
    "HybridNBTreeClassifier", "build_hybrid", "classify_hybrid", "relabel_ml",
    "NaiveBayesClassifier", "NBModel", "classify_nb", "posterior_scores", "train_nb",
    "BoundaryDiscretizer", "DiscretizationPlan", "MissingValueImputer", "apply_discretization",
    "build_discretization", "deduplicate", "impute_missing", "resolve_contradictions",
    "dump", "dumps", "load", "loads",
]
