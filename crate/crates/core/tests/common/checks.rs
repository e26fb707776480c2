//! Golden checks for the worked examples. Each returns its runtime or a
//! description of the first mismatch.

use std::time::{Duration, Instant};

use iled::ec::covers;
use iled::incremental::{audit, iled_step, HistoricalMemory, Hypothesis, LearnConfig};
use iled::induction::{revise, Phi};
use iled::io::{learn_stream, RunSinks};
use iled::kernel::{abduce_heads, build_kernel};
use iled::logic::{is_variant, parse_clause, parse_term, theta_subsumes_clause, Clause, Program};

use super::{clauses, refinement_hypothesis, strings, Fixture};

pub type Check = Result<Duration, String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse_all(src: &[&str]) -> Vec<Clause> {
    src.iter().map(|s| parse_clause(s).unwrap()).collect()
}

/// Same clauses up to variable renaming and order.
pub fn same_up_to_renaming(got: &[Clause], want: &[Clause]) -> bool {
    got.len() == want.len()
        && want.iter().all(|w| got.iter().any(|g| is_variant(g, w)))
        && got.iter().all(|g| want.iter().any(|w| is_variant(g, w)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub const XHAIL_HYPOTHESIS: [&str; 2] = [
    "initiatedAt(fighting(A,B),T) :- holdsAt(close(A,B,23),T).",
    "terminatedAt(fighting(A,B),T) :- happensAt(walking(B),T).",
];

/// Kernel construction and one learning step on the single-window scenario.
pub fn xhail_scenario() -> Check {
    let started = Instant::now();
    let fx = Fixture::load("single_window");
    let ctx = fx.context(0);
    let delta = strings(&abduce_heads(&ctx).delta);
    ensure(delta == ["initiatedAt(fighting(id3,id4),2)", "terminatedAt(fighting(id1,id2),1)"], || {
        format!("abduced {delta:?}")
    })?;
    let k = build_kernel(&ctx, &fx.language).map_err(err)?;
    let ground = parse_all(&[
        "initiatedAt(fighting(id3,id4),2) :- happensAt(abrupt(id3),2), happensAt(abrupt(id4),2), holdsAt(close(id3,id4,23),2).",
        "terminatedAt(fighting(id1,id2),1) :- happensAt(abrupt(id1),1), happensAt(walking(id2),1), not holdsAt(close(id1,id2,23),1).",
    ]);
    ensure(same_up_to_renaming(&k.ground_clauses, &ground), || {
        format!("ground kernel {:?}", strings(&k.ground_clauses))
    })?;
    let vars = parse_all(&[
        "initiatedAt(fighting(A,B),T) :- happensAt(abrupt(A),T), happensAt(abrupt(B),T), holdsAt(close(A,B,23),T).",
        "terminatedAt(fighting(A,B),T) :- happensAt(abrupt(A),T), happensAt(walking(B),T), not holdsAt(close(A,B,23),T).",
    ]);
    ensure(same_up_to_renaming(&k.variabilized, &vars), || {
        format!("variabilized kernel {:?}", strings(&k.variabilized))
    })?;
    let mut mem = HistoricalMemory::in_memory();
    let cfg = LearnConfig::new(fx.language.clone());
    let run = learn_stream(
        &fx.windows,
        &fx.background,
        &cfg,
        &mut mem,
        Hypothesis::default(),
        &RunSinks::default(),
        &mut |_, _, _| Ok(()),
    )
    .map_err(err)?;
    let got = run.hypothesis.program().clauses;
    ensure(same_up_to_renaming(&got, &parse_all(&XHAIL_HYPOTHESIS)), || format!("hypothesis {:?}", strings(&got)))?;
    Ok(started.elapsed())
}

/// Refinement of a clause with a two-member support set.
pub fn refinement_scenario() -> Check {
    let started = Instant::now();
    let fx = Fixture::load("refinement");
    let ctx = fx.context(0);
    let h = refinement_hypothesis();
    let sol = Phi::new(&ctx, &[], &h, 1 << 22).and_then(|p| p.solve()).map_err(err)?.ok_or("no solution")?;
    let delta = strings(&sol.delta);
    ensure(delta == ["use(1,1,2)", "use(1,1,3)", "use(1,2,2)"], || format!("use atoms {delta:?}"))?;
    let out = revise(&ctx, &h, &[], 1 << 22).map_err(err)?;
    ensure(out.refined.len() == 1 && out.new_clauses.is_empty() && out.retained.is_empty(), || format!("{out:?}"))?;
    let want = parse_all(&[
        "initiatedAt(fighting(A,B),T) :- happensAt(abrupt(A),T), happensAt(abrupt(B),T), holdsAt(close(A,B,23),T).",
        "initiatedAt(fighting(A,B),T) :- happensAt(abrupt(A),T), happensAt(active(B),T).",
    ]);
    let got = &out.refined[0].unreduced;
    ensure(same_up_to_renaming(got, &want), || format!("specializations {:?}", strings(got)))?;
    Ok(started.elapsed())
}

/// Three windows from an empty hypothesis: support growth, then a refinement.
pub fn support_scenario() -> Check {
    let started = Instant::now();
    let fx = Fixture::load("three_windows");
    let cfg = LearnConfig::new(fx.language.clone());
    let mut mem = HistoricalMemory::in_memory();
    let mut h = Hypothesis::default();
    let kernels: Vec<Clause> = (0..2)
        .map(|i| build_kernel(&fx.context(i), &fx.language).map(|k| k.variabilized[0].clone()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let supp = |h: &Hypothesis| -> Vec<Clause> { h.clauses.first().map_or(Vec::new(), |c| c.supp.clauses.clone()) };

    iled_step(&mut h, &fx.windows[0], &mut mem, &fx.background, &cfg, 1).map_err(err)?;
    ensure(h.len() == 1 && same_up_to_renaming(&supp(&h), &kernels[..1]), || format!("after w1: {h}"))?;
    iled_step(&mut h, &fx.windows[1], &mut mem, &fx.background, &cfg, 2).map_err(err)?;
    ensure(h.len() == 1 && same_up_to_renaming(&supp(&h), &kernels), || format!("after w2: {h}"))?;
    iled_step(&mut h, &fx.windows[2], &mut mem, &fx.background, &cfg, 3).map_err(err)?;
    let want =
        parse_clause("initiatedAt(fighting(A,B),T) :- happensAt(active(A),T), holdsAt(close(A,B,23),T).").unwrap();
    ensure(h.len() == 1 && is_variant(&h.clauses[0].clause, &want), || format!("after w3: {h}"))?;
    ensure(audit(&h, &mut mem, &fx.background).map_err(err)?.is_clean(), || "audit after w3".into())?;
    Ok(started.elapsed())
}

/// A more specific hypothesis that covers more: the general termination
/// clause breaks inertia one step early.
pub fn specific_covers_more() -> Check {
    let started = Instant::now();
    let fx = Fixture::load("specificity");
    let ctx = fx.context(0);
    let c = clauses("specificity");
    let h1 = Program::new(vec![c[0].clone(), c[1].clone()]);
    let h2 = Program::new(vec![c[0].clone(), c[2].clone()]);
    let missed = (parse_term("fighting(id1,id2)").unwrap(), 3);
    let r1 = covers(&ctx, &h1).map_err(err)?;
    ensure(r1.uncovered_positives == [missed.clone()], || format!("H1: {r1:?}"))?;
    let r2 = covers(&ctx, &h2).map_err(err)?;
    ensure(r2.is_covered() && r2.uncovered_positives.is_empty() && r2.covered_negatives.is_empty(), || {
        format!("H2: {r2:?}")
    })?;
    ensure(theta_subsumes_clause(&c[1], &c[2]) && !theta_subsumes_clause(&c[2], &c[1]), || "generality order".into())?;
    Ok(started.elapsed())
}
