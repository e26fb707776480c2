//! Event Calculus background, windows and evaluation.

pub mod background;
pub mod context;
pub mod eval;
pub mod window;

pub use background::{BackgroundTheory, FluentSchema, HeadKind, SDEC};
pub use context::WindowContext;
pub use eval::{
    classify_clause, clause_positive_footprint, covers, recognize, recognize_by_solver, ClauseStatus, CoverageReport,
    Firing,
};
pub use window::{parse_windows, read_stream, serialize_windows, Window};
