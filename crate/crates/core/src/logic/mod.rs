//! Terms, clauses, unification, θ-subsumption and mode languages.

pub mod mode;
pub mod parse;
pub mod subsume;
pub mod term;
pub mod unify;

pub use mode::{
    in_mode_language, parse_modes, variabilize, variable_depth, LanguageConfig, Marker, ModeDeclaration, ModeKind,
};
pub use parse::{parse_clause, parse_literal, parse_program, parse_term};
pub use subsume::{is_variant, theta_subsumes_clause, theta_subsumes_program};
pub use term::{Clause, Literal, Program, Signature, Term};
pub use unify::{unify, Substitution};
