"""Linguistic features and linear-SVM experiments for fake news detection."""

__version__ = "0.1.0"

from .corpus import Corpus, Document, corpus_stats, load_corpus, write_jsonl
from .evaluation import (
    FeatureConfig,
    ModelConfig,
    agreement,
    compute_metrics,
    cross_domain_eval,
    cross_validate,
    learning_curve,
    leave_one_domain_out,
    stratified_kfold,
)
from .features import Featurizer, fit_vocabulary, readability_features, vectorize
from .lexicon import load_dictionary, parse_dictionary
from .model import predict, train_svm
from .parsetree import parse_ptb, production_rule_features
