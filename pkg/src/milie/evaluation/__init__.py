from .compare import METRICS, compare_pathways, run_pipeline, score
from .entropy import FAMILIES, entropy, entropy_profile, format_entropy_table, format_entropy_tsv, tag_histograms
from .report import ScoreReport, f1_score, format_table, format_tsv
from .scorers import LEXICAL_LABEL, head_token, pair_similarity, score_benchie, score_carb, score_lexical

__all__ = [
    "METRICS", "compare_pathways", "run_pipeline", "score",
    "FAMILIES", "entropy", "entropy_profile", "format_entropy_table", "format_entropy_tsv", "tag_histograms",
    "ScoreReport", "f1_score", "format_table", "format_tsv",
    "LEXICAL_LABEL", "head_token", "pair_similarity", "score_benchie", "score_carb", "score_lexical",
]
