//! Confusion matrices, token accuracy, per-class and entity-level scores,
//! and error-pattern mining.

mod confusion;
mod metrics;
mod patterns;

pub use confusion::{accuracy_delta, check_aligned, confusion_matrix, token_accuracy, ConfusionMatrix};
pub use metrics::{entity_f1, evaluate, per_class_prf, ClassMetrics, EntityMetrics, EvalReport, Prf};
pub use patterns::{mine_error_patterns, Condition, ErrorPattern, ErrorPatternReport, DEFAULT_TOP_K};
