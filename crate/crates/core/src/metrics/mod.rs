//! Evaluation metrics: reference-based (GLEU, edit F-beta), reference-free
//! (Scribendi), human post-edit distance and Likert reports, inter-rater
//! agreement and system-level correlation.

mod correlation;
mod fbeta;
mod gleu;
mod human;
mod qwk;
pub(crate) mod report;
mod scribendi;

pub use correlation::{average_ranks, pearson, rank_correlation, spearman, RankCorrelation};
pub use fbeta::{edit_counts, f_beta, fbeta_corpus, fbeta_edits, EditCounts, FBetaConfig, FBetaScore};
pub use gleu::{gleu_corpus, gleu_parallel, gleu_stats, sentence_counts, GleuConfig, GleuCounts, GleuSentence, GleuStats};
pub use human::{
    likert_report, postedit_report, render_distribution, score_distribution, Dimension, LikertScore, PostEditItem,
    ScoreHistogram, ScoreTriple, DISTRIBUTION_COLUMNS,
};
pub use qwk::{qwk, RatingMatrix};
pub use report::{Level, MetricReport, ReportEntry};
pub use scribendi::{
    levenshtein_ratio, passes_similarity_gate, scribendi_corpus, scribendi_report, scribendi_scores,
    scribendi_sentence, token_sort_ratio, ScribendiConfig, ScribendiItem,
};
