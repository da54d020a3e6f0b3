"""Corpus analytics for gender-associated research fields, topics and methods."""

__version__ = "0.1.0"

from .errors import (ConfigError, ConflictError, DataError,
                     DegenerateTableError, EstimationError, GenderscopeError,
                     NotFoundError, StaleRevisionError)
from .gender import (CorrectionFactors, Gender, NameGenderTable,
                     ValidationSample, author_ratio_from_term_ratio,
                     corrected_odds_ratio, estimate_correction_factors,
                     infer_gender)
from .ingest import (ArticleRecord, Corpus, FieldCatalog, FormatConfig,
                     dedupe_articles, filter_min_size, parse_records)
from .stats import (AssociationScore, BinomialModel, ContingencyTable,
                    Direction, benjamini_hochberg, binomial_tail,
                    chi_square_2x2, chi_square_pvalue, tally_union_bound)
from .textprep import TermIndex, TokenRules, build_index, depluralize, tokenize

__all__ = [
    "__version__",
    "ArticleRecord", "AssociationScore", "BinomialModel", "ConfigError",
    "ConflictError", "ContingencyTable", "CorrectionFactors", "Corpus",
    "DataError", "DegenerateTableError", "Direction", "EstimationError",
    "FieldCatalog", "FormatConfig", "Gender", "GenderscopeError",
    "NameGenderTable", "NotFoundError", "StaleRevisionError", "TermIndex",
    "TokenRules", "ValidationSample", "author_ratio_from_term_ratio",
    "benjamini_hochberg", "binomial_tail", "build_index", "chi_square_2x2",
    "chi_square_pvalue", "corrected_odds_ratio", "dedupe_articles",
    "depluralize", "estimate_correction_factors", "filter_min_size",
    "infer_gender", "parse_records", "tally_union_bound", "tokenize",
]
