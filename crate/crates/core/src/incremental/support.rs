//! Support sets and annotated hypothesis clauses.

use std::fmt;

use fixedbitset::FixedBitSet;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::ec::eval::footprint_points;
use crate::ec::{HeadKind, WindowContext};
use crate::error::{Error, Result};
use crate::kernel::kernel_clause_at;
use crate::logic::mode::LanguageConfig;
use crate::logic::subsume::{is_variant, theta_subsumes_clause};
use crate::logic::term::{Clause, Program};

/// Most-specific clauses summarizing the coverage of their owner.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    pub clauses: Vec<Clause>,
}

impl SupportSet {
    pub fn new(clauses: Vec<Clause>) -> Self {
        let mut s = SupportSet::default();
        for c in clauses {
            s.insert(c);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Adds a clause unless a variant is already present; returns whether it was added.
    pub fn insert(&mut self, c: Clause) -> bool {
        if self.clauses.iter().any(|d| is_variant(d, &c)) {
            return false;
        }
        self.clauses.push(c);
        true
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }

    pub fn as_program(&self) -> Program {
        Program::new(self.clauses.clone())
    }
}

/// A hypothesis clause with its support set and the clause it was refined from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedClause {
    pub id: u64,
    pub clause: Clause,
    pub supp: SupportSet,
    pub lineage: Option<u64>,
}

impl AnnotatedClause {
    /// Whether the owner θ-subsumes every support clause.
    pub fn supports_subsumed(&self) -> bool {
        self.supp.iter().all(|d| theta_subsumes_clause(&self.clause, d))
    }
}

impl fmt::Display for AnnotatedClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "% clause {}{}", self.id, self.lineage.map_or(String::new(), |p| format!(" (refines {p})")))?;
        writeln!(f, "{}", self.clause)?;
        for (j, s) in self.supp.iter().enumerate() {
            writeln!(f, "%   supp {}: {s}", j + 1)?;
        }
        Ok(())
    }
}

/// Support of a clause generated from a Kernel Set: the Kernel clauses it θ-subsumes.
pub fn init_support_new(c: &Clause, kv: &[Clause]) -> Result<SupportSet> {
    let s = SupportSet::new(kv.iter().filter(|d| theta_subsumes_clause(c, d)).cloned().collect());
    if s.is_empty() {
        return Err(Error::Invariant(format!("new clause `{c}` subsumes no Kernel clause")));
    }
    Ok(s)
}

/// Support of a refinement: the parent's support clauses it still θ-subsumes.
pub fn init_support_refined(c: &Clause, parent: &AnnotatedClause) -> Result<SupportSet> {
    let s = SupportSet::new(parent.supp.iter().filter(|d| theta_subsumes_clause(c, d)).cloned().collect());
    if s.is_empty() && !parent.supp.is_empty() {
        return Err(Error::Invariant(format!("refinement `{c}` of clause {} subsumes none of its support", parent.id)));
    }
    Ok(s)
}

/// Adds the variabilized Kernel clause of every footprint point of the owner
/// in the window that is not yet represented; returns the number added.
pub fn complete_support(ac: &mut AnnotatedClause, ctx: &WindowContext, lang: &LanguageConfig) -> Result<usize> {
    let kind = HeadKind::of(&ac.clause.head)
        .ok_or_else(|| Error::Invariant(format!("clause `{}` has a non-EC head", ac.clause)))?;
    let mut added = 0;
    for p in footprint_points(ctx, &ac.clause)?.ones() {
        let (_, v) = kernel_clause_at(ctx, lang, kind, p)?;
        if ac.supp.iter().any(|d| is_variant(d, &v)) {
            continue;
        }
        if !theta_subsumes_clause(&ac.clause, &v) {
            warn!("clause {} fires at a point whose Kernel clause it does not subsume: {v}", ac.id);
            continue;
        }
        ac.supp.insert(v);
        added += 1;
    }
    Ok(added)
}

/// Union of the footprints of the support clauses in a window.
pub fn support_footprint(ctx: &WindowContext, supp: &SupportSet) -> Result<FixedBitSet> {
    let mut out = FixedBitSet::with_capacity(ctx.n_points());
    for d in supp.iter() {
        out.union_with(&footprint_points(ctx, d)?);
    }
    Ok(out)
}

/// Whether the support set has exactly the owner's footprint in the window.
pub fn support_coverage_matches(ac: &AnnotatedClause, ctx: &WindowContext) -> Result<bool> {
    Ok(support_footprint(ctx, &ac.supp)? == footprint_points(ctx, &ac.clause)?)
}
