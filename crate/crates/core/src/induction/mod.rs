//! Clause search: transformations, the `use`-atom search, and refinement reduction.

pub mod oracle;
pub mod reduce;
pub mod revise;
pub mod search;
pub mod transform;

pub use reduce::reduce_refined;
pub use revise::{revise, Refinement, RevisionOutcome};
pub use search::{Phi, PhiSolution};
pub use transform::{
    align_support, generalization_transform, refinement_transform, AlignedSupport, TransformedProgram,
};
