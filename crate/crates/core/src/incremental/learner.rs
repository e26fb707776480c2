//! The incremental learning loop.
//!
//! A window that the running hypothesis already covers only updates support
//! sets. Otherwise the hypothesis is revised on the window; when the revision
//! introduces new clauses, the stored windows are visited once, oldest first,
//! and refined with an empty Kernel Set wherever they are no longer covered.
//! Every visited window also completes the support sets of all clauses.

use std::fmt;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ec::{covers, BackgroundTheory, Window, WindowContext};
use crate::error::{Error, Result};
use crate::incremental::memory::HistoricalMemory;
use crate::incremental::support::{
    complete_support, init_support_new, init_support_refined, support_coverage_matches, AnnotatedClause,
};
use crate::induction::{revise, RevisionOutcome};
use crate::kernel::build_kernel;
use crate::logic::mode::LanguageConfig;
use crate::logic::term::{Clause, Program};

/// Learner settings.
#[derive(Clone, Debug)]
pub struct LearnConfig {
    pub language: LanguageConfig,
    /// Node limit of one clause search.
    pub node_cap: usize,
    /// Worker threads for window evaluation during the re-check.
    pub jobs: usize,
}

impl LearnConfig {
    pub fn new(language: LanguageConfig) -> Self {
        LearnConfig { language, node_cap: 1 << 22, jobs: 1 }
    }
}

/// The running hypothesis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub clauses: Vec<AnnotatedClause>,
    next_id: u64,
}

impl Hypothesis {
    pub fn program(&self) -> Program {
        Program::new(self.clauses.iter().map(|c| c.clause.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(|c| c.clause.len()).sum()
    }

    fn fresh_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    /// Replaces the clauses by a revision outcome; returns the ids of the
    /// refinements and of the new clauses.
    fn apply(&mut self, outcome: &RevisionOutcome, kv: &[Clause]) -> Result<(Vec<u64>, Vec<u64>)> {
        let old = std::mem::take(&mut self.clauses);
        let mut refined = Vec::new();
        let mut added = Vec::new();
        for &i in &outcome.retained {
            self.clauses.push(old[i].clone());
        }
        for r in &outcome.refined {
            let parent = &old[r.parent];
            for s in &r.specializations {
                let id = self.fresh_id();
                let supp = init_support_refined(s, parent)?;
                self.clauses.push(AnnotatedClause { id, clause: s.clone(), supp, lineage: Some(parent.id) });
                refined.push(id);
            }
        }
        for c in &outcome.new_clauses {
            let id = self.fresh_id();
            let supp = init_support_new(c, kv)?;
            self.clauses.push(AnnotatedClause { id, clause: c.clone(), supp, lineage: None });
            added.push(id);
        }
        Ok((refined, added))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// What one step did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: u64,
    pub window: u64,
    /// Whether the hypothesis was revised on the new window.
    pub revised: bool,
    /// Revisions made on stored windows during the re-check.
    pub recheck_revisions: usize,
    pub new_clauses: usize,
    pub refined_clauses: usize,
    /// Stored windows read during the step.
    pub windows_read: usize,
    /// Largest number of reads of a single stored window during the step.
    pub max_reads_per_window: usize,
    pub clauses: usize,
    pub literals: usize,
}

/// Completes the support sets of every clause on a window.
fn complete_on(h: &mut Hypothesis, ctx: &WindowContext, lang: &LanguageConfig) -> Result<()> {
    for ac in h.clauses.iter_mut() {
        complete_support(ac, ctx, lang)?;
    }
    Ok(())
}

/// Visits every stored window once, oldest first, refining the hypothesis
/// (with an empty Kernel Set) wherever a window is no longer covered, and
/// completing the support sets on it.
pub fn single_pass_recheck(
    h: &mut Hypothesis,
    mem: &mut HistoricalMemory,
    b: &BackgroundTheory,
    cfg: &LearnConfig,
) -> Result<usize> {
    let mut revisions = 0;
    let chunk = cfg.jobs.max(1) * 4;
    let mut start = 0;
    while start < mem.len() {
        let end = (start + chunk).min(mem.len());
        let windows: Vec<Window> = (start..end).map(|i| mem.read(i)).collect::<Result<_>>()?;
        let program = h.program();
        let evaluated: Vec<Result<(WindowContext, bool)>> = pool(cfg.jobs).install(|| {
            windows
                .par_iter()
                .map(|w| {
                    let ctx = WindowContext::new(b, w)?;
                    let ok = covers(&ctx, &program)?.is_covered();
                    Ok((ctx, ok))
                })
                .collect()
        });
        let mut stale = false;
        for r in evaluated {
            let (ctx, mut ok) = r?;
            if stale {
                ok = covers(&ctx, &h.program())?.is_covered();
            }
            if !ok {
                let outcome = revise(&ctx, &h.clauses, &[], cfg.node_cap)?;
                h.apply(&outcome, &[])?;
                revisions += 1;
                stale = true;
                debug!("re-check: revised on stored window {}", ctx.window_id);
            }
            complete_on(h, &ctx, &cfg.language)?;
        }
        start = end;
    }
    Ok(revisions)
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

/// Processes one window: revise if needed, re-check history when clauses were
/// added, complete support sets, and store the window.
pub fn iled_step(
    h: &mut Hypothesis,
    w: &Window,
    mem: &mut HistoricalMemory,
    b: &BackgroundTheory,
    cfg: &LearnConfig,
    step: u64,
) -> Result<StepReport> {
    mem.begin_step(step);
    let ctx = WindowContext::new(b, w)?;
    let mut report = StepReport { step, window: w.id, ..Default::default() };
    if !covers(&ctx, &h.program())?.is_covered() {
        let kv = build_kernel(&ctx, &cfg.language)?;
        let outcome = revise(&ctx, &h.clauses, &kv.variabilized, cfg.node_cap)?;
        report.revised = true;
        report.new_clauses = outcome.new_clauses.len();
        report.refined_clauses = outcome.refined.len();
        let (_, added) = h.apply(&outcome, &kv.variabilized)?;
        complete_on(h, &ctx, &cfg.language)?;
        if !added.is_empty() {
            report.recheck_revisions = single_pass_recheck(h, mem, b, cfg)?;
            if report.recheck_revisions > 0 && !covers(&ctx, &h.program())?.is_covered() {
                return Err(Error::Invariant(format!("re-check broke coverage of window {}", w.id)));
            }
        }
    } else {
        complete_on(h, &ctx, &cfg.language)?;
    }
    mem.append(w)?;
    let reads = mem.reads_in_step(step);
    report.windows_read = reads.len();
    report.max_reads_per_window = reads.values().copied().max().unwrap_or(0);
    report.clauses = h.len();
    report.literals = h.literal_count();
    info!(
        "step {step} (window {}): revised={} new={} refined={} reads={} clauses={}",
        w.id, report.revised, report.new_clauses, report.refined_clauses, report.windows_read, report.clauses
    );
    Ok(report)
}

/// Result of a full audit against every stored window.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// Stored windows the hypothesis does not cover.
    pub uncovered_windows: Vec<u64>,
    /// Clause ids with a support clause they do not θ-subsume.
    pub unsubsumed_supports: Vec<u64>,
    /// (clause id, window id) pairs where support coverage differs from the clause's.
    pub coverage_mismatches: Vec<(u64, u64)>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.uncovered_windows.is_empty() && self.unsubsumed_supports.is_empty() && self.coverage_mismatches.is_empty()
    }
}

/// Checks coverage of every stored window and the support-set invariants,
/// reading windows outside the step accounting.
pub fn audit(h: &Hypothesis, mem: &mut HistoricalMemory, b: &BackgroundTheory) -> Result<AuditReport> {
    let mut r = AuditReport::default();
    for ac in &h.clauses {
        if !ac.supports_subsumed() {
            r.unsubsumed_supports.push(ac.id);
        }
    }
    let program = h.program();
    for i in 0..mem.len() {
        let w = mem.read_unaccounted(i)?;
        let ctx = WindowContext::new(b, &w)?;
        if !covers(&ctx, &program)?.is_covered() {
            r.uncovered_windows.push(w.id);
        }
        for ac in &h.clauses {
            if !support_coverage_matches(ac, &ctx)? {
                r.coverage_mismatches.push((ac.id, w.id));
            }
        }
    }
    Ok(r)
}
