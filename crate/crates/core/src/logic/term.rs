//! Terms, literals, clauses and programs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A first-order term.
///
/// The derived ordering (variables, integers, constants, compounds) is the
/// structural order used for every deterministic tiebreak in the engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Int(i64),
    Const(String),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::Compound(functor.to_string(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Const(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Functor name for compounds and constants; `None` for variables and integers.
    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Compound(f, _) | Term::Const(f) => Some(f),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    /// Predicate signature of an atom.
    pub fn signature(&self) -> Option<Signature> {
        self.functor().map(|f| Signature::new(f, self.arity()))
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Term>) {
        match self {
            Term::Int(_) | Term::Const(_) => {
                out.insert(self.clone());
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
            Term::Var(_) => {}
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Evaluates `a+b` / `a-b` sub-terms over integers; other terms are returned as is.
    pub fn eval_arith(&self) -> Term {
        match self {
            Term::Compound(f, args) if (f == "+" || f == "-") && args.len() == 2 => {
                let a = args[0].eval_arith();
                let b = args[1].eval_arith();
                match (a.as_int(), b.as_int()) {
                    (Some(x), Some(y)) if f == "+" => Term::Int(x + y),
                    (Some(x), Some(y)) => Term::Int(x - y),
                    _ => Term::Compound(f.clone(), vec![a, b]),
                }
            }
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(Term::eval_arith).collect()),
            other => other.clone(),
        }
    }

    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Compound(g, args) => Term::Compound(g.clone(), args.iter().map(|a| a.rename_vars(f)).collect()),
            other => other.clone(),
        }
    }
}

fn is_infix(f: &str, args: &[Term]) -> bool {
    (f == "+" || f == "-") && args.len() == 2
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(i) => write!(f, "{i}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Compound(g, args) if is_infix(g, args) => {
                write!(f, "{}{}{}", args[0], g, args[1])
            }
            Term::Compound(g, args) if args.len() == 1 && matches!(g.as_str(), "+" | "-" | "#") => {
                write!(f, "{}{}", g, args[0])
            }
            Term::Compound(g, args) if g == "not" && args.len() == 1 => {
                write!(f, "not {}", args[0])
            }
            Term::Compound(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Predicate name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl Signature {
    pub fn new(name: &str, arity: usize) -> Self {
        Signature { name: name.to_string(), arity }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// An atom, possibly under negation as failure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Term,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Term) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: Term) -> Self {
        Literal { atom, negated: true }
    }

    pub fn map_atom(&self, f: impl FnOnce(&Term) -> Term) -> Literal {
        Literal { atom: f(&self.atom), negated: self.negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not {}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// A normal clause `head :- body`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Term, body: Vec<Literal>) -> Self {
        Clause { head, body }
    }

    pub fn fact(head: Term) -> Self {
        Clause { head, body: Vec::new() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        matches!(&self.head, Term::Const(c) if c == "false")
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground() && self.body.iter().all(|l| l.atom.is_ground())
    }

    /// Variables in order of first occurrence, head first.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        for l in &self.body {
            l.atom.collect_vars(&mut out);
        }
        out
    }

    /// Number of literals, head included.
    pub fn len(&self) -> usize {
        1 + self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> Clause {
        Clause {
            head: self.head.rename_vars(f),
            body: self.body.iter().map(|l| l.map_atom(|a| a.rename_vars(f))).collect(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        write!(f, ".")
    }
}

/// An ordered collection of clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Program { clauses }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }

    pub fn extend(&mut self, other: &Program) {
        self.clauses.extend(other.clauses.iter().cloned());
    }

    /// Total literal count (heads plus bodies).
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }
}

impl FromIterator<Clause> for Program {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Self {
        Program { clauses: iter.into_iter().collect() }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
