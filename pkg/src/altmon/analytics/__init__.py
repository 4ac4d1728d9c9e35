"""Measurements over an annotated corpus: prevalence, adoption, matching, contrasts, statistics."""

from .annotate import STRATEGIES, AnnotatedCorpus, VideoAnnotation, annotate, has
from .matching import (MatchedPair, MatchedPairSet, MatchSpec, ProductivityContrast,
                       productivity_contrast, stratified_match)
from .prevalence import (DecileSpec, PrevalenceReport, adoption_by_decile, adoption_series,
                         prevalence_table, top_domains, usage_counts)
from .problematic import (ComparisonReport, EarningsRecord, donation_domain_share, earnings_buckets,
                          load_earnings, problematic_contrast)
from .stats import StatResult, cohen_kappa, cut_points, mann_whitney_u, wilson_ci
from .validation import ConfusionMatrix, ValidationSample, confusion_matrix, validation_samples

__all__ = [
    "STRATEGIES", "AnnotatedCorpus", "VideoAnnotation", "annotate", "has",
    "MatchSpec", "MatchedPair", "MatchedPairSet", "ProductivityContrast", "stratified_match",
    "productivity_contrast",
    "DecileSpec", "PrevalenceReport", "prevalence_table", "top_domains", "adoption_series",
    "adoption_by_decile", "usage_counts",
    "ComparisonReport", "EarningsRecord", "problematic_contrast", "donation_domain_share",
    "load_earnings", "earnings_buckets",
    "StatResult", "wilson_ci", "mann_whitney_u", "cohen_kappa", "cut_points",
    "ConfusionMatrix", "ValidationSample", "confusion_matrix", "validation_samples",
]
