"""Python bindings for the reprofeat C++ library."""

from ._reprofeat import (
    FEATURE_NAMES,
    Error,
    SchemaError,
    anova_f_scores,
    classifiers,
    cross_validate,
    extract_stat_mentions,
    kendall_tau,
    load_corpus,
    mutual_info_continuous,
    mutual_info_scores,
    normalize_text,
    run_cli,
    sample_sizes,
    self_citation_ratio,
    similarity,
    stat_diagnostics,
    stat_features,
    stratified_kfold,
    title_match,
    u_rank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
