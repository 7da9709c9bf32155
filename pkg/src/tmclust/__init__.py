"""Topic-map document clustering toolkit.

Documents become ordered topic-label trees (parsed from XTM or built from
plain text); pairwise similarity comes from a root-preserving common
subtree measure plus four vector baselines; hierarchical agglomerative
clustering and purity/entropy scoring close the loop.
"""

from .cluster import ClusterAssignment, Dendrogram, cut, hac
from .errors import TmclustError, ValidationError, XtmParseError
from .evalx import ContingencyTable, EvalReport, contingency, entropy, evaluate, purity
from .simbase import (
    build_matrix_base,
    cosine_sim,
    euclidean_sim,
    jaccard_sim,
    kld_sim,
)
from .textpipe import (
    Corpus,
    CorpusDoc,
    TermVector,
    Vocabulary,
    build_fallback_forest,
    tokenize,
    vectorize,
)
from .treesim import (
    Mapping,
    SimilarityMatrix,
    brute_force_common_subtree,
    build_matrix,
    mapping_violations,
    max_common_subtree,
    tm_similarity,
)
from .xtm import (
    DOC_ROOT_LABEL,
    Association,
    Occurrence,
    Topic,
    TopicForest,
    TopicMapDoc,
    TopicNode,
    derive_forest,
    dump_tree,
    forest_from_json,
    forest_to_json,
    number_nodes,
    parse_xtm,
    serialize_xtm,
)

__version__ = "0.1.0"
