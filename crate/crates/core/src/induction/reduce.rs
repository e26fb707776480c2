//! Replacing a refinement by fewer specializations that still subsume the
//! parent's support set.

use log::debug;

use crate::ec::{covers, HeadKind};
use crate::error::Result;
use crate::incremental::support::AnnotatedClause;
use crate::induction::revise::RevisionOutcome;
use crate::induction::search::{Component, Phi};
use crate::logic::subsume::{is_variant, theta_subsumes_clause};
use crate::logic::term::Clause;

/// Admissible options of a component that have no admissible proper subset.
fn minimal_options(phi: &Phi, comp: &Component) -> Vec<Clause> {
    let cl = &phi.classes;
    let valid: Vec<usize> = (0..comp.options.len())
        .filter(|&o| {
            let f = &comp.options[o].fires;
            match comp.kind {
                HeadKind::Init => f.is_disjoint(&cl.next_false),
                HeadKind::Term => f.is_disjoint(&cl.stay),
            }
        })
        .collect();
    valid
        .iter()
        .filter(|&&o| {
            let e = &comp.options[o].chosen;
            !valid.iter().any(|&q| {
                let s = &comp.options[q].chosen;
                q != o && s.len() < e.len() && s.iter().all(|x| e.contains(x))
            })
        })
        .map(|&o| comp.options[o].clause.clone())
        .collect()
}

/// Greedy cover of the support set by specializations from `pool`.
fn greedy_cover(pool: &[Clause], supp: &[Clause]) -> Option<Vec<Clause>> {
    let mut uncovered: Vec<&Clause> = supp.iter().collect();
    let mut chosen: Vec<Clause> = Vec::new();
    while !uncovered.is_empty() {
        let best = pool
            .iter()
            .map(|c| (c, uncovered.iter().filter(|g| theta_subsumes_clause(c, g)).count()))
            .filter(|&(_, n)| n > 0)
            .min_by(|a, b| b.1.cmp(&a.1).then(a.0.len().cmp(&b.0.len())).then(a.0.to_string().cmp(&b.0.to_string())))?;
        let c = best.0.clone();
        uncovered.retain(|g| !theta_subsumes_clause(&c, g));
        chosen.push(c);
    }
    Some(chosen)
}

/// Reduces every refinement of `outcome`; a reduction is kept only when it is
/// strictly smaller and the revised hypothesis still covers the window.
pub fn reduce_refined(phi: &Phi, h: &[AnnotatedClause], mut outcome: RevisionOutcome) -> Result<RevisionOutcome> {
    for r in 0..outcome.refined.len() {
        let parent = outcome.refined[r].parent;
        let mut pool: Vec<Clause> = Vec::new();
        for &ci in &phi.by_clause[&parent] {
            for c in minimal_options(phi, &phi.components[ci]) {
                if !pool.iter().any(|d| is_variant(d, &c)) {
                    pool.push(c);
                }
            }
        }
        let supp: Vec<Clause> = h[parent].supp.iter().cloned().collect();
        let Some(reduced) = greedy_cover(&pool, &supp) else {
            continue;
        };
        if reduced.len() >= outcome.refined[r].specializations.len() {
            continue;
        }
        let previous = std::mem::replace(&mut outcome.refined[r].specializations, reduced);
        if covers(phi.ctx, &outcome.hypothesis(h))?.is_covered() {
            debug!(
                "clause {}: {} specializations reduced to {}",
                h[parent].id,
                previous.len(),
                outcome.refined[r].specializations.len()
            );
        } else {
            outcome.refined[r].specializations = previous;
        }
    }
    Ok(outcome)
}
