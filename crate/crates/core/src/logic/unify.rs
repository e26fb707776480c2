//! Substitutions, most-general unifiers and one-way matching.

use std::collections::BTreeMap;
use std::fmt;

use crate::logic::term::{Clause, Literal, Term};

/// A finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn bind(&mut self, var: &str, t: Term) {
        self.bindings.insert(var.to_string(), t);
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    /// Applies the substitution, following chains until a fixpoint.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.bindings.get(v) {
                Some(b) if b != t => self.apply(b),
                _ => t.clone(),
            },
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            other => other.clone(),
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        l.map_atom(|a| self.apply(a))
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause { head: self.apply(&c.head), body: c.body.iter().map(|l| self.apply_literal(l)).collect() }
    }

    /// Fully resolves every binding so that no bound variable occurs in a range term.
    pub fn normalized(&self) -> Substitution {
        let bindings = self.bindings.iter().map(|(k, v)| (k.clone(), self.apply(v))).collect();
        Substitution { bindings }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}/{v}")?;
        }
        write!(f, "}}")
    }
}

fn occurs(var: &str, t: &Term, s: &Substitution) -> bool {
    match t {
        Term::Var(v) if v == var => true,
        Term::Var(v) => s.get(v).is_some_and(|b| occurs(var, b, s)),
        Term::Compound(_, args) => args.iter().any(|a| occurs(var, a, s)),
        _ => false,
    }
}

fn walk<'a>(t: &'a Term, s: &'a Substitution) -> &'a Term {
    let mut cur = t;
    while let Term::Var(v) = cur {
        match s.get(v) {
            Some(b) => cur = b,
            None => break,
        }
    }
    cur
}

fn unify_into(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = walk(a, s).clone();
    let b = walk(b, s).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(x, t, s) {
                return false;
            }
            s.bind(x, t.clone());
            true
        }
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s))
        }
        _ => a == b,
    }
}

/// Most-general unifier of two terms, if one exists. The result is idempotent.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_into(a, b, &mut s).then(|| s.normalized())
}

/// One-way matching: extends `s` so that `pattern`s = `target`. Variables of
/// `target` are treated as constants.
pub fn match_term(pattern: &Term, target: &Term, s: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(b) => b == target,
            None => {
                s.bind(v, target.clone());
                true
            }
        },
        Term::Compound(f, xs) => match target {
            Term::Compound(g, ys) if f == g && xs.len() == ys.len() => {
                let mut trial = s.clone();
                if xs.iter().zip(ys).all(|(x, y)| match_term(x, y, &mut trial)) {
                    *s = trial;
                    true
                } else {
                    false
                }
            }
            _ => false,
        },
        other => other == target,
    }
}
