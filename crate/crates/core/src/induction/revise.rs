//! One revision of a hypothesis on a window: new clauses from the Kernel Set
//! and refinements of revisable clauses from their support sets.

use log::debug;

use crate::ec::{covers, WindowContext};
use crate::error::{Error, Result};
use crate::incremental::support::AnnotatedClause;
use crate::induction::reduce::reduce_refined;
use crate::induction::search::{Phi, Source};
use crate::logic::subsume::is_variant;
use crate::logic::term::{Clause, Program, Term};

/// The refinement of one hypothesis clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// Index of the refined clause in the input hypothesis.
    pub parent: usize,
    /// Specializations after reduction.
    pub specializations: Vec<Clause>,
    /// Specializations as chosen by the search, one per support clause, deduplicated.
    pub unreduced: Vec<Clause>,
}

/// Result of a revision.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RevisionOutcome {
    /// Indices of input clauses kept unchanged.
    pub retained: Vec<usize>,
    pub refined: Vec<Refinement>,
    pub new_clauses: Vec<Clause>,
    /// The chosen `use` atoms.
    pub delta: Vec<Term>,
}

impl RevisionOutcome {
    /// Retained, refined and new clauses in that order.
    pub fn hypothesis(&self, h: &[AnnotatedClause]) -> Program {
        let mut out = Program::default();
        for &i in &self.retained {
            out.clauses.push(h[i].clause.clone());
        }
        for r in &self.refined {
            out.clauses.extend(r.specializations.iter().cloned());
        }
        out.clauses.extend(self.new_clauses.iter().cloned());
        out
    }

    pub fn is_unchanged(&self) -> bool {
        self.refined.is_empty() && self.new_clauses.is_empty()
    }
}

fn push_distinct(out: &mut Vec<Clause>, c: Clause) {
    if !out.iter().any(|d| is_variant(d, &c)) {
        out.push(c);
    }
}

/// Revises `h` so that it covers the window. `kv` empty means no new clauses.
pub fn revise(ctx: &WindowContext, h: &[AnnotatedClause], kv: &[Clause], node_cap: usize) -> Result<RevisionOutcome> {
    let phi = Phi::new(ctx, kv, h, node_cap)?;
    let sol = phi
        .solve()?
        .ok_or_else(|| Error::NoSolution(format!("no revision of the hypothesis covers window {}", ctx.window_id)))?;
    debug!("window {}: use atoms {:?}", ctx.window_id, sol.delta.iter().map(|t| t.to_string()).collect::<Vec<_>>());
    let mut out = RevisionOutcome { delta: sol.delta.clone(), ..Default::default() };
    for (c, &o) in phi.components.iter().zip(&sol.choice) {
        if matches!(c.source, Source::Kernel(_)) && o != 0 {
            push_distinct(&mut out.new_clauses, c.options[o].clause.clone());
        }
    }
    for (i, comps) in &phi.by_clause {
        if comps.iter().all(|&ci| sol.choice[ci] == 0) {
            out.retained.push(*i);
            continue;
        }
        let mut specs = Vec::new();
        for &ci in comps {
            push_distinct(&mut specs, phi.components[ci].options[sol.choice[ci]].clause.clone());
        }
        out.refined.push(Refinement { parent: *i, specializations: specs.clone(), unreduced: specs });
    }
    let reduced = reduce_refined(&phi, h, out)?;
    let report = covers(ctx, &reduced.hypothesis(h))?;
    if !report.is_covered() {
        return Err(Error::Invariant(format!("revised hypothesis does not cover window {}", ctx.window_id)));
    }
    Ok(reduced)
}
