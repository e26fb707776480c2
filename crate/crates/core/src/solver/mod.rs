//! Grounding, stable models, credulous entailment and abduction.

pub mod abduce;
pub mod ground;
pub mod stable;

pub use abduce::{abduce, abduce_all_minimal, abduce_with, AbductiveSolution, AbductiveTask};
pub use ground::{ground, GroundProgram, GroundRule};
pub use stable::{credulous_entails, is_stable, stable_models, Interpretation, SolverConfig};
