"""Topic modelling for short free-text survey responses, with
human-readable topic descriptors and an annotation service for rating the
outputs.

The pipeline: normalise and stem responses, fit a topic model, group
documents by their dominant topic, extract keywords per group, and pick
each topic's descriptor from the keywords that share the most stems with
its top tokens. The server module then collects human ratings of the
outputs and the agreement module scores inter-annotator reliability.
"""

from .agreement import (
    AgreementReport,
    AnnotationRecord,
    ReliabilityMatrix,
    build_matrix,
    distribution_report,
    format_share,
    krippendorff_alpha,
)
from .descriptor import TopicDescriptor, describe_all, map_keywords, select_descriptor
from .lda import LdaConfig, TopicModel, all_top_tokens, assign, fit, perplexity
from .porter import stem as stem_word
from .preprocess import (
    Document,
    Stoplist,
    TokenList,
    build_display_map,
    load_stoplist,
    normalize,
    preprocess_corpus,
    preprocess_document,
    remove_stopwords,
    stem,
    tokenize,
)
from .rake import KeywordCandidate, RakeConfig, extract_keywords

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "AnnotationRecord",
    "Document",
    "KeywordCandidate",
    "LdaConfig",
    "RakeConfig",
    "ReliabilityMatrix",
    "Stoplist",
    "TokenList",
    "TopicDescriptor",
    "TopicModel",
    "all_top_tokens",
    "assign",
    "build_display_map",
    "build_matrix",
    "describe_all",
    "distribution_report",
    "extract_keywords",
    "fit",
    "format_share",
    "krippendorff_alpha",
    "load_stoplist",
    "map_keywords",
    "normalize",
    "perplexity",
    "preprocess_corpus",
    "preprocess_document",
    "remove_stopwords",
    "select_descriptor",
    "stem",
    "stem_word",
    "tokenize",
    "__version__",
]
