//! Per-window evaluation state: fact index, typed constants, the closed-world
//! fluent instances, and clause firing over (fluent instance, time) points.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Mutex;

use fixedbitset::FixedBitSet;

use crate::ec::background::{BackgroundTheory, HeadKind};
use crate::ec::window::{fluent_of, time_of, Window};
use crate::error::{Error, Result};
use crate::logic::mode::ModeDeclaration;
use crate::logic::term::{Clause, Literal, Program, Term};
use crate::logic::unify::{match_term, Substitution};
use crate::solver::{ground, stable_models, SolverConfig};

/// Indexed view of one window under a background theory.
///
/// A point is a pair (fluent instance, t) with `t_start <= t < t_end`: the
/// time at which an initiation or termination decides the fluent at `t+1`.
#[derive(Clone, Debug)]
pub struct WindowContext {
    pub window_id: u64,
    pub t_start: i64,
    pub t_end: i64,
    facts: HashSet<Term>,
    negatives: HashSet<Term>,
    by_pred: HashMap<(String, usize), Vec<Term>>,
    /// Window constants per type.
    pub typed: BTreeMap<String, BTreeSet<Term>>,
    /// Closed-world fluent instances, sorted.
    pub instances: Vec<Term>,
    instance_index: HashMap<Term, usize>,
    /// `desired[f][t - t_start]`: annotated truth of instance `f` at `t`.
    pub desired: Vec<Vec<bool>>,
    memo: TruthMemo,
}

/// Memoized head masks and literal truth tables, keyed by (head, literal).
#[derive(Debug, Default)]
struct TruthMemo(Mutex<HashMap<(Term, Option<Literal>), FixedBitSet>>);

impl Clone for TruthMemo {
    fn clone(&self) -> Self {
        TruthMemo(Mutex::new(self.0.lock().expect("memo lock").clone()))
    }
}

fn key(t: &Term) -> (String, usize) {
    (t.functor().unwrap_or_default().to_string(), t.arity())
}

fn record_slots(modes: &[ModeDeclaration], atom: &Term, typed: &mut BTreeMap<String, BTreeSet<Term>>) {
    for m in modes {
        if let Some(slots) = m.slots(atom) {
            for s in slots {
                if s.term.is_ground() {
                    typed.entry(s.ty).or_default().insert(s.term);
                }
            }
        }
    }
}

/// Tuples over the per-slot domains with no constant repeated across slots of the same type.
fn typed_product(slot_types: &[String], typed: &BTreeMap<String, BTreeSet<Term>>) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for (k, ty) in slot_types.iter().enumerate() {
        let dom = typed.get(ty).cloned().unwrap_or_default();
        let mut next = Vec::new();
        for prefix in &out {
            for c in &dom {
                let repeated = prefix.iter().enumerate().any(|(j, p)| slot_types[j] == slot_types[k] && p == c);
                if !repeated {
                    let mut t = prefix.clone();
                    t.push(c.clone());
                    next.push(t);
                }
            }
        }
        out = next;
    }
    out
}

impl WindowContext {
    pub fn new(b: &BackgroundTheory, w: &Window) -> Result<Self> {
        w.validate()?;
        let mut facts: HashSet<Term> = w.narrative.iter().filter(|l| !l.negated).map(|l| l.atom.clone()).collect();
        let negatives: HashSet<Term> = w.narrative.iter().filter(|l| l.negated).map(|l| l.atom.clone()).collect();
        if !b.user_rules.is_empty() {
            facts = close_under_rules(&b.user_rules, &facts)?;
        }
        if let Some(a) = facts.iter().find(|a| negatives.contains(*a)) {
            return Err(Error::Data(format!("window {}: `{a}` is stated both true and false", w.id)));
        }
        let mut by_pred: HashMap<(String, usize), Vec<Term>> = HashMap::new();
        let mut sorted: Vec<&Term> = facts.iter().collect();
        sorted.sort();
        for f in sorted {
            by_pred.entry(key(f)).or_default().push(f.clone());
        }

        let mut typed: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
        for l in &w.narrative {
            record_slots(&b.modes, &l.atom, &mut typed);
        }
        for f in &facts {
            record_slots(&b.modes, f, &mut typed);
        }
        let mut annotated: Vec<(Term, i64)> = Vec::new();
        for a in &w.annotation {
            let fluent = fluent_of(a).expect("validated").clone();
            let t = time_of(a).expect("validated");
            let schema = b.fluent_schema(&fluent).ok_or_else(|| {
                Error::Data(format!("window {}: annotated fluent `{fluent}` matches no head mode", w.id))
            })?;
            for (ty, c) in schema.match_fluent(&fluent).expect("schema matched") {
                typed.entry(ty).or_default().insert(c);
            }
            annotated.push((fluent, t));
        }
        for fs in &b.inertial_fluents {
            typed.entry(fs.time_type.clone()).or_default().extend(w.times().map(Term::Int));
        }

        let mut instances: BTreeSet<Term> = BTreeSet::new();
        for fs in &b.inertial_fluents {
            for tuple in typed_product(&fs.slot_types, &typed) {
                let mut it = tuple.into_iter();
                let inst = ModeDeclaration::body(fs.schema.clone(), false)
                    .instantiate(&mut |_, _| it.next().expect("one term per slot"));
                instances.insert(inst);
            }
        }
        instances.extend(annotated.iter().map(|(f, _)| f.clone()));
        let instances: Vec<Term> = instances.into_iter().collect();
        let instance_index: HashMap<Term, usize> = instances.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let n_times = w.len();
        let mut desired = vec![vec![false; n_times]; instances.len()];
        for (f, t) in annotated {
            desired[instance_index[&f]][(t - w.t_start) as usize] = true;
        }
        Ok(WindowContext {
            window_id: w.id,
            t_start: w.t_start,
            t_end: w.t_end,
            facts,
            negatives,
            by_pred,
            typed,
            instances,
            instance_index,
            desired,
            memo: TruthMemo::default(),
        })
    }

    pub fn steps(&self) -> usize {
        (self.t_end - self.t_start) as usize
    }

    pub fn n_points(&self) -> usize {
        self.instances.len() * self.steps()
    }

    pub fn point(&self, f: usize, t: i64) -> usize {
        f * self.steps() + (t - self.t_start) as usize
    }

    /// Instance index and time of a point.
    pub fn point_parts(&self, p: usize) -> (usize, i64) {
        (p / self.steps(), self.t_start + (p % self.steps()) as i64)
    }

    pub fn instance_id(&self, fluent: &Term) -> Option<usize> {
        self.instance_index.get(fluent).copied()
    }

    /// Annotated truth of instance `f` at time `t`.
    pub fn desired_at(&self, f: usize, t: i64) -> bool {
        self.desired[f][(t - self.t_start) as usize]
    }

    /// Transition class of a point: (truth at t, truth at t+1).
    pub fn transition(&self, p: usize) -> (bool, bool) {
        let (f, t) = self.point_parts(p);
        (self.desired_at(f, t), self.desired_at(f, t + 1))
    }

    pub fn ground_head(&self, kind: HeadKind, p: usize) -> Term {
        let (f, t) = self.point_parts(p);
        Term::compound(kind.predicate(), vec![self.instances[f].clone(), Term::Int(t)])
    }

    pub fn holds(&self, atom: &Term) -> bool {
        self.facts.contains(atom)
    }

    /// Whether a narrative atom is known to be false: events are listed
    /// exhaustively, statically-defined fluents only when stated false.
    pub fn known_false(&self, atom: &Term) -> bool {
        match atom.functor() {
            Some("holdsAt") => self.negatives.contains(atom),
            _ => !self.facts.contains(atom),
        }
    }

    pub fn facts_of(&self, pred: &str, arity: usize) -> &[Term] {
        self.by_pred.get(&(pred.to_string(), arity)).map_or(&[], Vec::as_slice)
    }

    /// All true narrative facts, sorted.
    pub fn facts(&self) -> Vec<&Term> {
        let mut v: Vec<&Term> = self.facts.iter().collect();
        v.sort();
        v
    }

    /// All explicitly false narrative atoms, sorted.
    pub fn negatives(&self) -> Vec<&Term> {
        let mut v: Vec<&Term> = self.negatives.iter().collect();
        v.sort();
        v
    }

    fn head_binding(&self, head: &Term, kind: HeadKind, p: usize) -> Option<Substitution> {
        let mut s = Substitution::new();
        match_term(head, &self.ground_head(kind, p), &mut s).then_some(s)
    }

    fn memoized(&self, key: (Term, Option<Literal>), compute: impl FnOnce() -> FixedBitSet) -> FixedBitSet {
        if let Some(b) = self.memo.0.lock().expect("memo lock").get(&key) {
            return b.clone();
        }
        let bits = compute();
        self.memo.0.lock().expect("memo lock").insert(key, bits.clone());
        bits
    }

    /// Points where the head pattern matches; `None` for non-EC heads.
    pub fn head_mask(&self, head: &Term) -> Option<FixedBitSet> {
        let kind = HeadKind::of(head)?;
        Some(self.memoized((head.clone(), None), || {
            let mut bits = FixedBitSet::with_capacity(self.n_points());
            for p in 0..self.n_points() {
                if self.head_binding(head, kind, p).is_some() {
                    bits.insert(p);
                }
            }
            bits
        }))
    }

    /// Truth of a literal whose variables all occur in `head`, at every point.
    pub fn literal_truth(&self, head: &Term, lit: &Literal) -> Option<FixedBitSet> {
        let kind = HeadKind::of(head)?;
        let hv = head.vars();
        if lit.atom.vars().iter().any(|v| !hv.contains(v)) {
            return None;
        }
        Some(self.memoized((head.clone(), Some(lit.clone())), || {
            let mut bits = FixedBitSet::with_capacity(self.n_points());
            for p in 0..self.n_points() {
                if let Some(s) = self.head_binding(head, kind, p) {
                    if self.holds(&s.apply(&lit.atom)) != lit.negated {
                        bits.insert(p);
                    }
                }
            }
            bits
        }))
    }

    fn body_holds(&self, body: &[&Literal], s: &Substitution) -> bool {
        let Some((first, rest)) = body.split_first() else {
            return true;
        };
        let atom = s.apply(&first.atom);
        if atom.is_ground() {
            return self.holds(&atom) != first.negated && self.body_holds(rest, s);
        }
        if first.negated {
            // Unbound variables under negation: the literal fails if any instance holds.
            let any = self.facts_of(atom.functor().unwrap_or_default(), atom.arity()).iter().any(|f| {
                let mut trial = s.clone();
                match_term(&atom, f, &mut trial)
            });
            return !any && self.body_holds(rest, s);
        }
        self.facts_of(atom.functor().unwrap_or_default(), atom.arity()).iter().any(|f| {
            let mut trial = s.clone();
            match_term(&atom, f, &mut trial) && self.body_holds(rest, &trial)
        })
    }

    /// Points at which an initiatedAt/terminatedAt clause fires.
    pub fn fires(&self, c: &Clause) -> Result<FixedBitSet> {
        let kind = HeadKind::of(&c.head)
            .ok_or_else(|| Error::Data(format!("clause `{c}` does not define initiatedAt/terminatedAt")))?;
        let hv = c.head.vars();
        let local = c.body.iter().any(|l| l.atom.vars().iter().any(|v| !hv.contains(v)));
        if !local {
            let mut bits = self.head_mask(&c.head).expect("EC head");
            for l in &c.body {
                bits.intersect_with(&self.literal_truth(&c.head, l).expect("head-bound literal"));
            }
            return Ok(bits);
        }
        let mut body: Vec<&Literal> = c.body.iter().collect();
        body.sort_by_key(|l| l.negated);
        let mut bits = FixedBitSet::with_capacity(self.n_points());
        for p in 0..self.n_points() {
            if let Some(s) = self.head_binding(&c.head, kind, p) {
                if self.body_holds(&body, &s) {
                    bits.insert(p);
                }
            }
        }
        Ok(bits)
    }
}

fn close_under_rules(rules: &Program, facts: &HashSet<Term>) -> Result<HashSet<Term>> {
    let mut p = rules.clone();
    let mut sorted: Vec<&Term> = facts.iter().collect();
    sorted.sort();
    p.clauses.extend(sorted.into_iter().cloned().map(Clause::fact));
    let g = ground(&p, &BTreeMap::new(), &BTreeSet::new())?;
    let models = stable_models(&g, &SolverConfig::default())?;
    match models.as_slice() {
        [m] => Ok(m.atoms(&g).cloned().collect()),
        _ => Err(Error::Data(format!(
            "background rules have {} stable models on this window; exactly one is required",
            models.len()
        ))),
    }
}
