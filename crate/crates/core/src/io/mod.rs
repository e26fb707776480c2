//! Synthetic streams, evaluation metrics and run records.

pub mod dump;
pub mod generator;
pub mod metrics;
pub mod run;

pub use dump::{dump_window, Dumps};
pub use generator::{fighting_task, fighting_truth, generate_synthetic, SyntheticConfig};
pub use metrics::{evaluate, score_window, Denominator, Metrics, Scores};
pub use run::{learn_stream, RunResult, RunSinks, StepHook, StepRecord, TimingRecord};
