//! Incremental learning over a window stream with bounded history revisits.

pub mod learner;
pub mod memory;
pub mod support;

pub use learner::{audit, iled_step, single_pass_recheck, AuditReport, Hypothesis, LearnConfig, StepReport};
pub use memory::HistoricalMemory;
pub use support::{
    complete_support, init_support_new, init_support_refined, support_coverage_matches, AnnotatedClause, SupportSet,
};
