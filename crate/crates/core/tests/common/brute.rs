//! Brute-force oracles for subsumption, stable models and abduction, and a
//! cross-check of the specialised clause search against generic abduction.
//! Each `check_*` function is one property case.

use std::collections::{BTreeMap, BTreeSet};

use iled::ec::{BackgroundTheory, WindowContext};
use iled::incremental::{iled_step, HistoricalMemory, Hypothesis, LearnConfig};
use iled::induction::oracle::{explains, solve_by_abduction};
use iled::induction::Phi;
use iled::io::generator::{annotate, generate_narrative};
use iled::io::SyntheticConfig;
use iled::kernel::build_kernel;
use iled::logic::subsume::subsumption_witness;
use iled::logic::{
    parse_modes, parse_program, theta_subsumes_clause, Clause, LanguageConfig, Literal, Program, Signature, Term,
};
use iled::solver::{abduce, stable_models, AbductiveTask, GroundProgram, SolverConfig};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const SUBSUMPTION_CASES: u32 = 1200;
pub const STABLE_CASES: u32 = 600;
pub const ABDUCTION_CASES: u32 = 250;
pub const SEARCH_CASES: u32 = 24;

pub type CaseResult = Result<(), TestCaseError>;

// ---------------------------------------------------------------------------
// θ-subsumption

/// Flat literal: predicate index, arguments, negation.
#[derive(Clone, Debug)]
struct FlatLit {
    pred: usize,
    args: Vec<Arg>,
    negated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Arg {
    Var(usize),
    Const(usize),
}

const PREDS: [(&str, usize); 3] = [("p", 1), ("q", 2), ("r", 2)];
const CONSTS: [&str; 2] = ["a", "b"];

fn arg_strategy(vars: usize) -> impl Strategy<Value = Arg> {
    prop_oneof![4 => (0..vars).prop_map(Arg::Var), 1 => (0..CONSTS.len()).prop_map(Arg::Const)]
}

fn lit_strategy(vars: usize) -> impl Strategy<Value = FlatLit> {
    (0..PREDS.len(), prop::collection::vec(arg_strategy(vars), 2), prop::bool::weighted(0.25)).prop_map(
        |(pred, mut args, negated)| {
            args.truncate(PREDS[pred].1);
            FlatLit { pred, args, negated }
        },
    )
}

fn to_term(a: Arg, prefix: &str) -> Term {
    match a {
        Arg::Var(i) => Term::var(&format!("{prefix}{i}")),
        Arg::Const(i) => Term::constant(CONSTS[i]),
    }
}

fn to_clause(head: &[Arg], body: &[FlatLit], prefix: &str) -> Clause {
    let h = Term::compound("h", head.iter().map(|&a| to_term(a, prefix)).collect());
    let body = body
        .iter()
        .map(|l| {
            let atom = Term::compound(PREDS[l.pred].0, l.args.iter().map(|&a| to_term(a, prefix)).collect());
            Literal { atom, negated: l.negated }
        })
        .collect();
    Clause::new(h, body)
}

/// Tries every map from the variables of `c` to the argument terms of `d`.
fn brute_subsumes(c: &Clause, d: &Clause) -> bool {
    fn args(t: &Term, out: &mut BTreeSet<Term>) {
        out.extend(t.args().iter().cloned());
    }
    let vars = c.vars();
    let mut targets = BTreeSet::new();
    args(&d.head, &mut targets);
    for l in &d.body {
        args(&l.atom, &mut targets);
    }
    targets.extend(CONSTS.iter().map(|c| Term::constant(c)));
    let targets: Vec<Term> = targets.into_iter().collect();
    let d_body: BTreeSet<&Literal> = d.body.iter().collect();
    let apply = |t: &Term, m: &BTreeMap<&str, &Term>| -> Term {
        Term::compound(
            t.functor().unwrap(),
            t.args()
                .iter()
                .map(|a| if a.is_var() { (*m[a.to_string().as_str()]).clone() } else { a.clone() })
                .collect(),
        )
    };
    let total = targets.len().pow(vars.len() as u32);
    (0..total).any(|mut code| {
        let mut m = BTreeMap::new();
        for v in &vars {
            m.insert(v.as_str(), &targets[code % targets.len()]);
            code /= targets.len();
        }
        apply(&c.head, &m) == d.head
            && c.body.iter().all(|l| d_body.contains(&Literal { atom: apply(&l.atom, &m), negated: l.negated }))
    })
}

#[derive(Clone, Debug)]
pub struct SubsumptionCase {
    c: Clause,
    d: Clause,
}

pub fn subsumption_case() -> impl Strategy<Value = SubsumptionCase> {
    let c_parts = (prop::collection::vec(arg_strategy(4), 2), prop::collection::vec(lit_strategy(4), 0..=4));
    let d_parts = (prop::collection::vec(arg_strategy(4), 2), prop::collection::vec(lit_strategy(4), 0..=5));
    let image = prop::collection::vec(arg_strategy(4), 4);
    (c_parts, d_parts, image, any::<bool>(), any::<bool>(), any::<prop::sample::Index>()).prop_map(
        |((ch, cb), (dh, db), image, specialize, shared_names, pos)| {
            let c = to_clause(&ch, &cb, "X");
            let d_prefix = if shared_names { "X" } else { "V" };
            let d = if specialize {
                // Map C's variables through `image` and pad with D's extra literals.
                let map = |a: Arg| match a {
                    Arg::Var(i) => image[i],
                    k => k,
                };
                let head: Vec<Arg> = ch.iter().map(|&a| map(a)).collect();
                let mut body: Vec<FlatLit> = cb
                    .iter()
                    .map(|l| FlatLit { args: l.args.iter().map(|&a| map(a)).collect(), ..l.clone() })
                    .collect();
                let at = pos.index(body.len() + 1);
                for (k, l) in db.into_iter().enumerate() {
                    body.insert((at + k).min(body.len()), l);
                }
                to_clause(&head, &body, d_prefix)
            } else {
                to_clause(&dh, &db, d_prefix)
            };
            SubsumptionCase { c, d }
        },
    )
}

// ---------------------------------------------------------------------------
// Stable models

#[derive(Clone, Debug)]
pub struct Rule {
    head: Option<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

fn rule_strategy(atoms: usize) -> impl Strategy<Value = Rule> {
    (
        prop::option::weighted(0.9, 0..atoms),
        prop::collection::vec(0..atoms, 0..=2),
        prop::collection::vec(0..atoms, 0..=2),
    )
        .prop_map(|(head, pos, neg)| Rule { head, pos, neg })
}

fn mask(xs: &[usize]) -> u32 {
    xs.iter().fold(0, |m, &i| m | (1 << i))
}

/// Stable models by enumerating every interpretation and checking that it is
/// the least model of its reduct and violates no constraint. `fixed` atoms
/// are facts and `free` marks the atoms that may vary.
fn brute_stable_models(rules: &[Rule], free: u32, fixed: u32) -> Vec<u32> {
    let compiled: Vec<(Option<usize>, u32, u32)> = rules.iter().map(|r| (r.head, mask(&r.pos), mask(&r.neg))).collect();
    let free_bits: Vec<u32> = (0..32).filter(|i| free & (1 << i) != 0).map(|i| 1 << i).collect();
    let mut out = Vec::new();
    for code in 0u32..(1 << free_bits.len()) {
        let m = free_bits.iter().enumerate().filter(|(k, _)| code & (1 << k) != 0).fold(fixed, |m, (_, b)| m | b);
        let mut least = fixed;
        loop {
            let mut next = least;
            for &(h, pos, neg) in &compiled {
                if let Some(h) = h {
                    if neg & m == 0 && pos & least == pos {
                        next |= 1 << h;
                    }
                }
            }
            if next == least {
                break;
            }
            least = next;
        }
        let violated = compiled.iter().any(|&(h, pos, neg)| h.is_none() && pos & m == pos && neg & m == 0);
        if least == m && !violated {
            out.push(m);
        }
    }
    out
}

fn atom_name(i: usize) -> Term {
    Term::constant(&format!("a{i}"))
}

fn rule_clause(r: &Rule, name: &dyn Fn(usize) -> Term) -> Clause {
    let head = r.head.map_or_else(|| Term::constant("false"), name);
    let body = r.pos.iter().map(|&i| Literal::pos(name(i))).chain(r.neg.iter().map(|&i| Literal::neg(name(i))));
    Clause::new(head, body.collect())
}

pub fn program_strategy() -> impl Strategy<Value = (usize, Vec<Rule>)> {
    (1usize..=12).prop_flat_map(|n| (Just(n), prop::collection::vec(rule_strategy(n), 0..=14)))
}

// ---------------------------------------------------------------------------
// Abduction

/// Atoms `0..k` are the abducibles `ab(i)`; atoms `k..k+n` are `p(i)`.
#[derive(Clone, Debug)]
pub struct AbductionCase {
    k: usize,
    n: usize,
    rules: Vec<Rule>,
    goals: Vec<(usize, bool)>,
}

pub fn abduction_case() -> impl Strategy<Value = AbductionCase> {
    (1usize..=10, 1usize..=5).prop_flat_map(|(k, n)| {
        let head = prop::option::weighted(0.85, k..k + n);
        let rule = (head, prop::collection::vec(0..k + n, 0..=2), prop::collection::vec(0..k + n, 0..=1))
            .prop_map(|(head, pos, neg)| Rule { head, pos, neg });
        let goals = prop::collection::vec((k..k + n, prop::bool::weighted(0.2)), 1..=2);
        (Just(k), Just(n), prop::collection::vec(rule, 1..=10), goals).prop_map(|(k, n, rules, goals)| AbductionCase {
            k,
            n,
            rules,
            goals,
        })
    })
}

impl AbductionCase {
    fn name(&self, i: usize) -> Term {
        if i < self.k {
            Term::compound("ab", vec![Term::Int(i as i64)])
        } else {
            Term::compound("p", vec![Term::Int((i - self.k) as i64)])
        }
    }

    fn explained_by(&self, delta: u32) -> bool {
        let free = ((1u32 << self.n) - 1) << self.k;
        brute_stable_models(&self.rules, free, delta)
            .iter()
            .any(|&m| self.goals.iter().all(|&(a, negated)| (m & (1 << a) != 0) != negated))
    }

    /// Smallest explanation size by trying every subset of abducibles.
    fn brute_optimum(&self) -> Option<usize> {
        (0..=self.k).find(|&size| {
            (0u32..(1 << self.k)).filter(|s| s.count_ones() as usize == size).any(|s| self.explained_by(s))
        })
    }

    fn task(&self) -> AbductiveTask {
        let name = |i| self.name(i);
        AbductiveTask {
            background: Program::new(self.rules.iter().map(|r| rule_clause(r, &name)).collect()),
            abducibles: vec![Signature::new("ab", 1)],
            candidates: (0..self.k).map(name).collect(),
            goals: self.goals.iter().map(|&(a, neg)| Literal { atom: name(a), negated: neg }).collect(),
            domains: BTreeMap::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Specialised search vs generic abduction on small generated windows

const SMALL_MODES: &str = "\
modeh(initiatedAt(fighting(+pid,+pid),+time)).
modeh(terminatedAt(fighting(+pid,+pid),+time)).
modeb(happensAt(abrupt(+pid),+time)).
modeb(happensAt(walking(+pid),+time)).
modeb(holdsAt(close(+pid,+pid,#dist),+time)).
";

const SMALL_TRUTH: &str = "\
initiatedAt(fighting(X,Y),T) :- happensAt(abrupt(X),T), holdsAt(close(X,Y,23),T).
terminatedAt(fighting(X,Y),T) :- happensAt(walking(X),T).
";

fn small_task() -> (BackgroundTheory, LanguageConfig, Program) {
    let modes = parse_modes(SMALL_MODES).unwrap();
    let b = BackgroundTheory::new(modes.clone(), Program::default()).unwrap();
    (b, LanguageConfig::new(modes, 1), parse_program(SMALL_TRUTH).unwrap())
}

/// A two-person window of `len` examples from `seed`, keeping only the
/// events the small language can describe.
fn small_window(seed: u64, len: usize, id: u64) -> iled::ec::Window {
    let (b, _, truth) = small_task();
    let mut cfg = SyntheticConfig::new(len, seed);
    cfg.persons = 2;
    cfg.arena = 30.0;
    let mut w = generate_narrative(&cfg);
    w.narrative.retain(|l| {
        let s = l.to_string();
        !l.negated && (s.contains("abrupt") || s.contains("walking") || s.contains("close"))
    });
    w.id = id;
    annotate(&b, &truth, &mut w).unwrap();
    w
}

fn cross_check(ctx: &WindowContext, b: &BackgroundTheory, lang: &LanguageConfig, h: &Hypothesis) -> CaseResult {
    let uncovered = !iled::ec::covers(ctx, &h.program()).unwrap().is_covered();
    let kv = if uncovered { build_kernel(ctx, lang).unwrap().variabilized } else { Vec::new() };
    let phi = Phi::new(ctx, &kv, &h.clauses, 1 << 22).unwrap().solve().unwrap();
    let oracle = solve_by_abduction(b, ctx, &kv, &h.clauses, lang, &SolverConfig::default()).unwrap();
    prop_assert_eq!(phi.as_ref().map(|s| s.cost()), oracle.as_ref().map(|s| s.cardinality), "window {}", ctx.window_id);
    if let Some(s) = phi {
        prop_assert!(explains(b, ctx, &kv, &h.clauses, lang, &s.delta).unwrap());
    }
    Ok(())
}

pub fn check_subsumption(case: SubsumptionCase) -> CaseResult {
    let fast = theta_subsumes_clause(&case.c, &case.d);
    prop_assert_eq!(fast, brute_subsumes(&case.c, &case.d), "{} vs {}", case.c, case.d);
    if fast && case.c.vars().iter().all(|v| !case.d.vars().contains(v)) {
        let w = subsumption_witness(&case.c, &case.d).unwrap();
        let image = w.apply_clause(&case.c);
        prop_assert_eq!(&image.head, &case.d.head);
        prop_assert!(image.body.iter().all(|l| case.d.body.contains(l)));
    }
    Ok(())
}

pub fn check_stable_models((n, rules): (usize, Vec<Rule>)) -> CaseResult {
    let clauses: Vec<Clause> = rules.iter().map(|r| rule_clause(r, &atom_name)).collect();
    let g = GroundProgram::from_ground_clauses(clauses).unwrap();
    let fast: BTreeSet<BTreeSet<String>> = stable_models(&g, &SolverConfig::default())
        .unwrap()
        .iter()
        .map(|m| m.atoms(&g).map(|t| t.to_string()).collect())
        .collect();
    let brute: BTreeSet<BTreeSet<String>> = brute_stable_models(&rules, (1 << n) - 1, 0)
        .into_iter()
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| atom_name(i).to_string()).collect())
        .collect();
    prop_assert_eq!(fast, brute);
    Ok(())
}

pub fn check_abduction(case: AbductionCase) -> CaseResult {
    let fast = abduce(&case.task(), true).unwrap();
    prop_assert_eq!(fast.as_ref().map(|s| s.cardinality), case.brute_optimum());
    if let Some(s) = fast {
        let delta = (0..case.k).filter(|&i| s.delta.contains(&case.name(i))).fold(0u32, |m, i| m | (1 << i));
        prop_assert_eq!(delta.count_ones() as usize, s.delta.len());
        prop_assert!(case.explained_by(delta));
    }
    Ok(())
}

pub fn search_case() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=2)
}

/// Generalization on one window, then revision of the learned hypothesis on the next.
pub fn check_search((seed, len): (u64, usize)) -> CaseResult {
    let (b, lang, _) = small_task();
    let w1 = small_window(seed, len, 1);
    let w2 = small_window(seed.wrapping_add(1), len, 2);
    let ctx1 = WindowContext::new(&b, &w1).unwrap();
    cross_check(&ctx1, &b, &lang, &Hypothesis::default())?;
    let mut h = Hypothesis::default();
    let mut mem = HistoricalMemory::in_memory();
    iled_step(&mut h, &w1, &mut mem, &b, &LearnConfig::new(lang.clone()), 1).unwrap();
    let ctx2 = WindowContext::new(&b, &w2).unwrap();
    cross_check(&ctx2, &b, &lang, &h)
}
