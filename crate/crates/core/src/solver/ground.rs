//! Bottom-up grounding over the program's Herbrand universe.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::term::{Clause, Literal, Program, Term};
use crate::logic::unify::{match_term, Substitution};

/// A ground rule over dense atom ids. `head == None` is an integrity constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: Option<usize>,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// A variable-free program with a bijection between atoms and `0..n`.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    pub clauses: Vec<Clause>,
    pub atoms: Vec<Term>,
    pub rules: Vec<GroundRule>,
    index: HashMap<Term, usize>,
}

impl GroundProgram {
    /// Builds the atom table for clauses that are already ground.
    pub fn from_ground_clauses(clauses: Vec<Clause>) -> Result<Self> {
        let mut g = GroundProgram::default();
        for c in clauses {
            if !c.is_ground() {
                return Err(Error::Data(format!("clause `{c}` is not ground")));
            }
            g.push(c);
        }
        Ok(g)
    }

    fn intern(&mut self, atom: &Term) -> usize {
        if let Some(&id) = self.index.get(atom) {
            return id;
        }
        let id = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(atom.clone(), id);
        id
    }

    fn push(&mut self, c: Clause) {
        let head = if c.is_constraint() { None } else { Some(self.intern(&c.head)) };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for l in &c.body {
            let id = self.intern(&l.atom);
            if l.negated {
                neg.push(id);
            } else {
                pos.push(id);
            }
        }
        self.rules.push(GroundRule { head, pos, neg });
        self.clauses.push(c);
    }

    pub fn atom_id(&self, atom: &Term) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The program restricted to rules accepted by `keep`.
    pub fn filter_rules(&self, keep: impl Fn(&Clause) -> bool) -> GroundProgram {
        let mut out = self.clone();
        let mut clauses = Vec::new();
        let mut rules = Vec::new();
        for (c, r) in self.clauses.iter().zip(&self.rules) {
            if keep(c) {
                clauses.push(c.clone());
                rules.push(r.clone());
            }
        }
        out.clauses = clauses;
        out.rules = rules;
        out
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn has_arith(t: &Term) -> bool {
    match t {
        Term::Compound(f, args) => (args.len() == 2 && (f == "+" || f == "-")) || args.iter().any(has_arith),
        _ => false,
    }
}

fn arith_in_universe(t: &Term, universe: &BTreeSet<Term>) -> bool {
    match t {
        Term::Compound(f, args) if args.len() == 2 && (f == "+" || f == "-") => false,
        Term::Compound(_, args) => args.iter().all(|a| arith_in_universe(a, universe)),
        Term::Int(_) | Term::Const(_) => universe.contains(t),
        Term::Var(_) => false,
    }
}

/// Applies `s`, evaluates arithmetic and rejects integers outside the universe.
fn instantiate(t: &Term, s: &Substitution, universe: &BTreeSet<Term>) -> Option<Term> {
    let applied = s.apply(t);
    if !has_arith(t) {
        return Some(applied);
    }
    let v = applied.eval_arith();
    arith_in_universe(&v, universe).then_some(v)
}

fn check_safety(c: &Clause) -> Result<()> {
    let mut bound = Vec::new();
    for l in c.body.iter().filter(|l| !l.negated) {
        l.atom.collect_vars(&mut bound);
    }
    let mut all = c.head.vars();
    for l in c.body.iter().filter(|l| l.negated) {
        l.atom.collect_vars(&mut all);
    }
    if all.iter().all(|v| bound.contains(v)) {
        Ok(())
    } else {
        Err(Error::UnsafeClause(c.to_string()))
    }
}

type AtomIndex = HashMap<(String, usize), Vec<Term>>;

fn key(t: &Term) -> (String, usize) {
    (t.functor().unwrap_or_default().to_string(), t.arity())
}

/// Enumerates substitutions satisfying the positive body against `possible`.
fn join(pos: &[&Literal], index: &AtomIndex, universe: &BTreeSet<Term>, s: Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = pos.split_first() else {
        out.push(s);
        return;
    };
    if has_arith(&first.atom) {
        if let Some(t) = instantiate(&first.atom, &s, universe) {
            if t.is_ground() {
                if index.get(&key(&t)).is_some_and(|v| v.contains(&t)) {
                    join(rest, index, universe, s, out);
                }
                return;
            }
        }
        return;
    }
    if let Some(cands) = index.get(&key(&first.atom)) {
        for cand in cands {
            let mut trial = s.clone();
            if match_term(&first.atom, cand, &mut trial) {
                join(rest, index, universe, trial, out);
            }
        }
    }
}

/// Grounds `p` over the constants of `p`, the type domains and `window_constants`.
///
/// Every type domain `ty ↦ {c..}` contributes facts `ty(c)`, so clauses can
/// range a variable over a type by mentioning `ty(X)` in the body. Instances
/// are generated only for rules whose positive bodies can be satisfied
/// (possible-atom fixpoint); arithmetic results outside the universe drop the
/// instance.
pub fn ground(
    p: &Program,
    domains: &BTreeMap<String, BTreeSet<Term>>,
    window_constants: &BTreeSet<Term>,
) -> Result<GroundProgram> {
    let mut clauses: Vec<Clause> = p.clauses.clone();
    for (ty, consts) in domains {
        for c in consts {
            clauses.push(Clause::fact(Term::compound(ty, vec![c.clone()])));
        }
    }
    for c in &clauses {
        check_safety(c)?;
    }
    let mut universe = window_constants.clone();
    for c in &clauses {
        c.head.collect_constants(&mut universe);
        for l in &c.body {
            l.atom.collect_constants(&mut universe);
        }
    }
    for consts in domains.values() {
        universe.extend(consts.iter().cloned());
    }

    // Positive literals with arithmetic are joined last, once their variables are bound.
    let ordered: Vec<Vec<&Literal>> = clauses
        .iter()
        .map(|c| {
            let mut pos: Vec<&Literal> = c.body.iter().filter(|l| !l.negated).collect();
            pos.sort_by_key(|l| has_arith(&l.atom));
            pos
        })
        .collect();

    let mut possible: HashSet<Term> = HashSet::new();
    let mut index: AtomIndex = HashMap::new();
    loop {
        let mut fresh = Vec::new();
        for (c, pos) in clauses.iter().zip(&ordered) {
            if c.is_constraint() {
                continue;
            }
            let mut subs = Vec::new();
            join(pos, &index, &universe, Substitution::new(), &mut subs);
            for s in subs {
                if let Some(h) = instantiate(&c.head, &s, &universe) {
                    if !possible.contains(&h) && !fresh.contains(&h) {
                        fresh.push(h);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for h in fresh {
            index.entry(key(&h)).or_default().push(h.clone());
            possible.insert(h);
        }
    }

    let mut seen: HashSet<Clause> = HashSet::new();
    let mut g = GroundProgram::default();
    for (c, pos) in clauses.iter().zip(&ordered) {
        let mut subs = Vec::new();
        join(pos, &index, &universe, Substitution::new(), &mut subs);
        'inst: for s in subs {
            let head = if c.is_constraint() {
                c.head.clone()
            } else {
                match instantiate(&c.head, &s, &universe) {
                    Some(h) => h,
                    None => continue,
                }
            };
            let mut body = Vec::with_capacity(c.body.len());
            for l in &c.body {
                match instantiate(&l.atom, &s, &universe) {
                    Some(a) => body.push(Literal { atom: a, negated: l.negated }),
                    None if l.negated => {}
                    None => continue 'inst,
                }
            }
            let gc = Clause::new(head, body);
            if seen.insert(gc.clone()) {
                g.push(gc);
            }
        }
    }
    Ok(g)
}
