//! Worked-example fixtures shared by unit tests.

use crate::ec::{parse_windows, BackgroundTheory, Window, WindowContext};
use crate::incremental::support::{AnnotatedClause, SupportSet};
use crate::logic::mode::{parse_modes, LanguageConfig};
use crate::logic::parse::parse_program;
use crate::logic::term::{Clause, Program};

pub struct Fixture {
    pub background: BackgroundTheory,
    pub language: LanguageConfig,
    pub windows: Vec<Window>,
}

impl Fixture {
    pub fn context(&self, i: usize) -> WindowContext {
        WindowContext::new(&self.background, &self.windows[i]).unwrap()
    }
}

fn build(modes: &str, windows: &str) -> Fixture {
    let modes = parse_modes(modes).unwrap();
    Fixture {
        background: BackgroundTheory::new(modes.clone(), Program::default()).unwrap(),
        language: LanguageConfig::new(modes, 1),
        windows: parse_windows(windows).unwrap(),
    }
}

pub fn single_window() -> Fixture {
    build(include_str!("../tests/data/single_window.modes"), include_str!("../tests/data/single_window.win"))
}

pub fn refinement() -> Fixture {
    build(include_str!("../tests/data/refinement.modes"), include_str!("../tests/data/refinement.win"))
}

/// The refinement scenario's clause annotated with its support set.
pub fn refinement_hypothesis() -> Vec<AnnotatedClause> {
    let p = parse_program(include_str!("../tests/data/refinement.hyp")).unwrap();
    let clauses: Vec<Clause> = p.clauses;
    vec![AnnotatedClause {
        id: 1,
        clause: clauses[0].clone(),
        supp: SupportSet::new(clauses[1..].to_vec()),
        lineage: None,
    }]
}

pub fn three_windows() -> Fixture {
    build(include_str!("../tests/data/three_windows.modes"), include_str!("../tests/data/three_windows.win"))
}

pub fn specificity() -> Fixture {
    build(include_str!("../tests/data/specificity.modes"), include_str!("../tests/data/specificity.win"))
}

pub fn specificity_clauses() -> Vec<Clause> {
    parse_program(include_str!("../tests/data/specificity.hyp")).unwrap().clauses
}
