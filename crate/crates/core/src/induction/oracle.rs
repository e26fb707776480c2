//! Clause search through generic abduction over the transformed program.
//!
//! Exponential in the number of `use` atoms; intended for cross-checking the
//! specialised search on small windows.

use crate::ec::eval::{window_goals, window_program};
use crate::ec::{BackgroundTheory, WindowContext};
use crate::error::Result;
use crate::incremental::support::AnnotatedClause;
use crate::induction::transform::{generalization_transform, nonempty_body_constraints, refinement_transform};
use crate::logic::mode::LanguageConfig;
use crate::logic::term::{Clause, Literal, Program, Signature, Term};
use crate::solver::{abduce_with, credulous_entails, AbductiveSolution, AbductiveTask, SolverConfig};

fn int(n: usize) -> Term {
    Term::Int(n as i64)
}

/// The transformed window program and the `use` atoms it may assume.
pub fn transformed_task(
    b: &BackgroundTheory,
    ctx: &WindowContext,
    kv: &[Clause],
    h: &[AnnotatedClause],
    cfg: &LanguageConfig,
) -> Result<AbductiveTask> {
    let gen = generalization_transform(kv, cfg);
    let refi = refinement_transform(h, cfg)?;
    let mut u = gen.guarded();
    u.extend(&refi.guarded());
    u.extend(&nonempty_body_constraints(kv));
    let background = window_program(b, ctx, &u)?;
    let mut candidates = Vec::new();
    for (i, k) in kv.iter().enumerate() {
        candidates.push(Term::compound("use", vec![int(i + 1), int(0)]));
        for j in 1..=k.body.len() {
            candidates.push(Term::compound("use", vec![int(i + 1), int(j)]));
        }
    }
    for &(i, j, k) in refi.ref_index.keys() {
        candidates.push(Term::compound("use", vec![int(i), int(j), int(k)]));
    }
    Ok(AbductiveTask {
        background,
        abducibles: vec![Signature::new("use", 2), Signature::new("use", 3)],
        candidates,
        goals: window_goals(ctx),
        domains: ctx.typed.clone(),
    })
}

/// Minimum-cardinality `use` atoms found by exhaustive abduction.
pub fn solve_by_abduction(
    b: &BackgroundTheory,
    ctx: &WindowContext,
    kv: &[Clause],
    h: &[AnnotatedClause],
    cfg: &LanguageConfig,
    solver: &SolverConfig,
) -> Result<Option<AbductiveSolution>> {
    let task = transformed_task(b, ctx, kv, h, cfg)?;
    abduce_with(&task, true, solver, &|_| 0)
}

/// Whether the transformed program with `delta` assumed explains the window.
pub fn explains(
    b: &BackgroundTheory,
    ctx: &WindowContext,
    kv: &[Clause],
    h: &[AnnotatedClause],
    cfg: &LanguageConfig,
    delta: &[Term],
) -> Result<bool> {
    let task = transformed_task(b, ctx, kv, h, cfg)?;
    let mut p: Program = task.background;
    p.clauses.extend(delta.iter().cloned().map(Clause::fact));
    let goals: Vec<Literal> = task.goals;
    credulous_entails(&p, &goals, &task.domains, &SolverConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::induction::search::Phi;
    use crate::kernel::build_kernel;

    #[test]
    fn single_window_cardinality_agrees() {
        let fx = fixtures::single_window();
        let ctx = fx.context(0);
        let k = build_kernel(&ctx, &fx.language).unwrap();
        let sol = Phi::new(&ctx, &k.variabilized, &[], 1 << 20).unwrap().solve().unwrap().unwrap();
        let oracle =
            solve_by_abduction(&fx.background, &ctx, &k.variabilized, &[], &fx.language, &SolverConfig::default())
                .unwrap()
                .unwrap();
        assert_eq!(oracle.cardinality, sol.cost());
        assert!(explains(&fx.background, &ctx, &k.variabilized, &[], &fx.language, &sol.delta).unwrap());
    }

    #[test]
    fn refinement_cardinality_agrees() {
        let fx = fixtures::refinement();
        let ctx = fx.context(0);
        let h = fixtures::refinement_hypothesis();
        let sol = Phi::new(&ctx, &[], &h, 1 << 20).unwrap().solve().unwrap().unwrap();
        let oracle =
            solve_by_abduction(&fx.background, &ctx, &[], &h, &fx.language, &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(oracle.cardinality, sol.cost());
        assert_eq!(oracle.delta, sol.delta);
        assert!(explains(&fx.background, &ctx, &[], &h, &fx.language, &sol.delta).unwrap());
    }
}
