"""Vulnerability type identification for known-vulnerable C/C++ functions.

A TF-IDF + chi-square + binary-relevance Gaussian NB baseline, plus a
distinguishing-token refinement component that post-processes any model's
predictions using statement-level syntactic code elements.
"""

from .classifier import BrModel, GaussianNbBinary, PredictionVector, predict, train_br
from .corpus import (
    Dataset,
    LabelVector,
    SplitSpec,
    TypeVocabulary,
    VulnFunction,
    label_vector,
    load_dataset,
    save_dataset,
    split_dataset,
)
from .distinguish import (
    DistinguishingTokenTable,
    PrevalenceTable,
    build_prevalence,
    dis_minus,
    dis_plus,
    mine,
)
from .errors import VultypeError
from .features import (
    Chi2Selection,
    FeatureVector,
    TfIdfVocabulary,
    build_ngrams,
    chi2_select,
    fit_tfidf,
    transform,
)
from .metrics import MetricsReport, accuracy, averaged_prf, evaluate, exact_match_ratio, hamming_score
from .refine import RefinementAudit, load_external_predictions, refine_batch, refine_one
from .syntax import CodeToken, SyntacticElements, extract_elements, lex, split_subtokens

__version__ = "0.1.0"
