//! Recognition by forward time-stepping, coverage, and clause classification.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::ec::background::{BackgroundTheory, HeadKind};
use crate::ec::context::WindowContext;
use crate::ec::window::holds_at;
use crate::error::{Error, Result};
use crate::logic::parse::parse_clause;
use crate::logic::term::{Clause, Literal, Program, Term};
use crate::solver::{ground, stable_models, SolverConfig};

/// Fluent truth per instance and time: `states[f][t - t_start]`.
pub type States = Vec<Vec<bool>>;

/// Points where some clause of each kind fires.
#[derive(Clone, Debug)]
pub struct Firing {
    pub init: FixedBitSet,
    pub term: FixedBitSet,
}

impl Firing {
    pub fn of(ctx: &WindowContext, h: &Program) -> Result<Firing> {
        let mut init = FixedBitSet::with_capacity(ctx.n_points());
        let mut term = FixedBitSet::with_capacity(ctx.n_points());
        for c in h.iter() {
            let bits = ctx.fires(c)?;
            match HeadKind::of(&c.head) {
                Some(HeadKind::Init) => init.union_with(&bits),
                Some(HeadKind::Term) => term.union_with(&bits),
                None => unreachable!("fires() rejects non-EC heads"),
            }
        }
        Ok(Firing { init, term })
    }
}

/// Forward stepping from the annotated state at `t_start`; initiation wins over termination.
pub fn step_states(ctx: &WindowContext, firing: &Firing) -> States {
    let mut states = Vec::with_capacity(ctx.instances.len());
    for f in 0..ctx.instances.len() {
        let mut row = Vec::with_capacity(ctx.steps() + 1);
        let mut cur = ctx.desired[f][0];
        row.push(cur);
        for t in ctx.t_start..ctx.t_end {
            let p = ctx.point(f, t);
            cur = firing.init.contains(p) || (cur && !firing.term.contains(p));
            row.push(cur);
        }
        states.push(row);
    }
    states
}

/// Fluent states derived by `h` on the window.
pub fn recognize_states(ctx: &WindowContext, h: &Program) -> Result<States> {
    Ok(step_states(ctx, &Firing::of(ctx, h)?))
}

fn state_atoms(ctx: &WindowContext, states: &States) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for (f, row) in states.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v {
                out.insert(holds_at(ctx.instances[f].clone(), ctx.t_start + k as i64));
            }
        }
    }
    out
}

/// The `holdsAt` atoms over inertial fluents derived by `h` on the window.
pub fn recognize(ctx: &WindowContext, h: &Program) -> Result<BTreeSet<Term>> {
    Ok(state_atoms(ctx, &recognize_states(ctx, h)?))
}

/// SDEC with an inertia guard, `h`, the seeded initial state and the window's
/// facts as one program. Clauses of `h` with Event Calculus heads are guarded
/// by `inertial/1` and `time/1`; other clauses are added unchanged.
pub fn window_program(b: &BackgroundTheory, ctx: &WindowContext, h: &Program) -> Result<Program> {
    let mut p = Program::default();
    p.clauses.push(parse_clause("holdsAt(F,T+1) :- initiatedAt(F,T).").expect("axiom"));
    p.clauses.push(parse_clause("holdsAt(F,T+1) :- holdsAt(F,T), not terminatedAt(F,T), inertial(F).").expect("axiom"));
    p.extend(&b.user_rules);
    for c in h.iter() {
        let Some(kind) = HeadKind::of(&c.head) else {
            p.clauses.push(c.clone());
            continue;
        };
        let (fluent, time) = (&c.head.args()[0], &c.head.args()[1]);
        let mut body = vec![
            Literal::pos(Term::compound("inertial", vec![fluent.clone()])),
            Literal::pos(Term::compound("time", vec![time.clone()])),
        ];
        body.extend(c.body.iter().cloned());
        p.clauses.push(Clause::new(Term::compound(kind.predicate(), c.head.args().to_vec()), body));
    }
    for (f, inst) in ctx.instances.iter().enumerate() {
        p.clauses.push(Clause::fact(Term::compound("inertial", vec![inst.clone()])));
        if ctx.desired[f][0] {
            p.clauses.push(Clause::fact(holds_at(inst.clone(), ctx.t_start)));
        }
    }
    for t in ctx.t_start..=ctx.t_end {
        p.clauses.push(Clause::fact(Term::compound("time", vec![Term::Int(t)])));
    }
    for a in ctx.facts() {
        p.clauses.push(Clause::fact(a.clone()));
    }
    Ok(p)
}

/// The annotation after the first time point, negatives included by closed
/// world, and no termination where the annotation keeps a fluent true.
pub fn window_goals(ctx: &WindowContext) -> Vec<Literal> {
    let mut out = Vec::new();
    for (f, inst) in ctx.instances.iter().enumerate() {
        for t in ctx.t_start + 1..=ctx.t_end {
            let atom = holds_at(inst.clone(), t);
            out.push(if ctx.desired_at(f, t) { Literal::pos(atom) } else { Literal::neg(atom) });
            if ctx.desired_at(f, t - 1) && ctx.desired_at(f, t) {
                out.push(Literal::neg(Term::compound("terminatedAt", vec![inst.clone(), Term::Int(t - 1)])));
            }
        }
    }
    out
}

/// Recognition through grounding and stable models; used as an oracle.
pub fn recognize_by_solver(
    b: &BackgroundTheory,
    ctx: &WindowContext,
    h: &Program,
    cfg: &SolverConfig,
) -> Result<BTreeSet<Term>> {
    let p = window_program(b, ctx, h)?;
    let g = ground(&p, &Default::default(), &BTreeSet::new())?;
    let models = stable_models(&g, cfg)?;
    let [m] = models.as_slice() else {
        return Err(Error::Data(format!("hypothesis has {} stable models on window {}", models.len(), ctx.window_id)));
    };
    let mut out = BTreeSet::new();
    for a in m.atoms(&g) {
        if let (Some(fl), Some(t)) = (crate::ec::window::fluent_of(a), crate::ec::window::time_of(a)) {
            if ctx.instance_id(fl).is_some() && (ctx.t_start..=ctx.t_end).contains(&t) {
                out.insert(a.clone());
            }
        }
    }
    Ok(out)
}

/// Recognition output compared with the annotation and its closed-world complement.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverageReport {
    pub covered_positives: Vec<(Term, i64)>,
    pub uncovered_positives: Vec<(Term, i64)>,
    pub covered_negatives: Vec<(Term, i64)>,
    /// Positives that persist from the previous time point although a
    /// termination fires; a termination there disproves the positive on its own.
    pub contested_positives: Vec<(Term, i64)>,
}

impl CoverageReport {
    /// No uncovered positive, covered negative or contested positive.
    pub fn is_covered(&self) -> bool {
        self.uncovered_positives.is_empty() && self.covered_negatives.is_empty() && self.contested_positives.is_empty()
    }
}

/// Compares derived states with the annotation.
pub fn coverage_from_states(ctx: &WindowContext, states: &States) -> CoverageReport {
    let mut r = CoverageReport::default();
    for (f, row) in states.iter().enumerate() {
        for (k, &derived) in row.iter().enumerate() {
            let t = ctx.t_start + k as i64;
            let entry = (ctx.instances[f].clone(), t);
            match (ctx.desired[f][k], derived) {
                (true, true) => r.covered_positives.push(entry),
                (true, false) => r.uncovered_positives.push(entry),
                (false, true) => r.covered_negatives.push(entry),
                (false, false) => {}
            }
        }
    }
    r
}

/// Points where the annotation keeps a fluent true and some termination fires.
pub fn contested_points(ctx: &WindowContext, firing: &Firing) -> FixedBitSet {
    let mut out = firing.term.clone();
    let stay: Vec<usize> = out.ones().filter(|&p| ctx.transition(p) == (true, true)).collect();
    out.clear();
    for p in stay {
        out.insert(p);
    }
    out
}

pub fn covers(ctx: &WindowContext, h: &Program) -> Result<CoverageReport> {
    let firing = Firing::of(ctx, h)?;
    let mut r = coverage_from_states(ctx, &step_states(ctx, &firing));
    r.contested_positives = point_pairs(ctx, contested_points(ctx, &firing).ones());
    Ok(r)
}

/// Whether a clause must be revised on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseStatus {
    Preservable,
    /// Offending (fluent, time) pairs.
    Revisable(Vec<(Term, i64)>),
}

impl ClauseStatus {
    pub fn is_revisable(&self) -> bool {
        matches!(self, ClauseStatus::Revisable(_))
    }
}

/// Witness points of `c`: initiations into an annotated negative, terminations
/// where the fluent is annotated to persist, or terminations of an annotated
/// positive that no clause of `h` initiates.
pub fn clause_witness_points(ctx: &WindowContext, c: &Clause, firing: &Firing) -> Result<Vec<usize>> {
    let fires = ctx.fires(c)?;
    let kind = HeadKind::of(&c.head).expect("checked by fires");
    Ok(fires
        .ones()
        .filter(|&p| {
            let (prev, next) = ctx.transition(p);
            match kind {
                HeadKind::Init => !next,
                HeadKind::Term => next && (prev || !firing.init.contains(p)),
            }
        })
        .collect())
}

fn point_pairs(ctx: &WindowContext, points: impl IntoIterator<Item = usize>) -> Vec<(Term, i64)> {
    points
        .into_iter()
        .map(|p| {
            let (f, t) = ctx.point_parts(p);
            (ctx.instances[f].clone(), t + 1)
        })
        .collect()
}

pub fn classify_clause(ctx: &WindowContext, c: &Clause, h: &Program) -> Result<ClauseStatus> {
    let firing = Firing::of(ctx, h)?;
    let w = clause_witness_points(ctx, c, &firing)?;
    Ok(if w.is_empty() { ClauseStatus::Preservable } else { ClauseStatus::Revisable(point_pairs(ctx, w)) })
}

/// Footprint points of `c`: the points where it fires and the annotation
/// changes in its direction (false to true for an initiation, true to false
/// for a termination).
pub fn footprint_points(ctx: &WindowContext, c: &Clause) -> Result<FixedBitSet> {
    let mut fires = ctx.fires(c)?;
    let kind = HeadKind::of(&c.head).expect("checked by fires");
    let keep: Vec<usize> = fires
        .ones()
        .filter(|&p| match (kind, ctx.transition(p)) {
            (HeadKind::Init, (prev, next)) => !prev && next,
            (HeadKind::Term, (prev, next)) => prev && !next,
        })
        .collect();
    fires.clear();
    for p in keep {
        fires.insert(p);
    }
    Ok(fires)
}

/// Footprint as (fluent, time) pairs, with time the decided point `t+1`.
pub fn clause_positive_footprint(ctx: &WindowContext, c: &Clause) -> Result<Vec<(Term, i64)>> {
    Ok(point_pairs(ctx, footprint_points(ctx, c)?.ones()))
}
