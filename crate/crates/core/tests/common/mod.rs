//! Fixture loading and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use iled::ec::{parse_windows, BackgroundTheory, Window, WindowContext};
use iled::incremental::{AnnotatedClause, SupportSet};
use iled::logic::{parse_modes, parse_program, Clause, LanguageConfig, Program};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub struct Fixture {
    pub background: BackgroundTheory,
    pub language: LanguageConfig,
    pub windows: Vec<Window>,
}

impl Fixture {
    pub fn load(stem: &str) -> Fixture {
        let modes = parse_modes(&read(&format!("{stem}.modes"))).unwrap();
        Fixture {
            background: BackgroundTheory::new(modes.clone(), Program::default()).unwrap(),
            language: LanguageConfig::new(modes, 1),
            windows: parse_windows(&read(&format!("{stem}.win"))).unwrap(),
        }
    }

    pub fn context(&self, i: usize) -> WindowContext {
        WindowContext::new(&self.background, &self.windows[i]).unwrap()
    }
}

pub fn clauses(stem: &str) -> Vec<Clause> {
    parse_program(&read(&format!("{stem}.hyp"))).unwrap().clauses
}

/// The refinement scenario's running clause with its support set.
pub fn refinement_hypothesis() -> Vec<AnnotatedClause> {
    let c = clauses("refinement");
    vec![AnnotatedClause { id: 1, clause: c[0].clone(), supp: SupportSet::new(c[1..].to_vec()), lineage: None }]
}

pub fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

pub fn sorted<T: ToString>(xs: impl IntoIterator<Item = T>) -> BTreeSet<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

pub mod brute;
pub mod checks;
pub mod soak;
