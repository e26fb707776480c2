//! Mode declarations, variable depth and the depth-bounded mode language.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::parse::parse_program;
use crate::logic::term::{Clause, Literal, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeKind {
    Head,
    Body,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    Input,
    Output,
    Ground,
}

impl Marker {
    pub fn symbol(self) -> &'static str {
        match self {
            Marker::Input => "+",
            Marker::Output => "-",
            Marker::Ground => "#",
        }
    }
}

/// A placemarker occurrence found while matching a schema against an atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub marker: Marker,
    pub ty: String,
    pub term: Term,
}

/// `modeh(schema)` / `modeb(schema)`, optionally with a negated body schema.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeDeclaration {
    pub kind: ModeKind,
    pub negated: bool,
    pub schema: Term,
}

fn as_placemarker(t: &Term) -> Option<(Marker, &str)> {
    match t {
        Term::Compound(f, args) if args.len() == 1 => {
            let marker = match f.as_str() {
                "+" => Marker::Input,
                "-" => Marker::Output,
                "#" => Marker::Ground,
                _ => return None,
            };
            match &args[0] {
                Term::Const(ty) => Some((marker, ty)),
                _ => None,
            }
        }
        _ => None,
    }
}

fn match_schema(schema: &Term, atom: &Term, out: &mut Vec<Slot>) -> bool {
    if let Some((marker, ty)) = as_placemarker(schema) {
        out.push(Slot { marker, ty: ty.to_string(), term: atom.clone() });
        return true;
    }
    match (schema, atom) {
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_schema(x, y, out))
        }
        _ => schema == atom,
    }
}

fn fill_schema(schema: &Term, fill: &mut dyn FnMut(Marker, &str) -> Term) -> Term {
    if let Some((marker, ty)) = as_placemarker(schema) {
        return fill(marker, ty);
    }
    match schema {
        Term::Compound(f, xs) => Term::Compound(f.clone(), xs.iter().map(|x| fill_schema(x, fill)).collect()),
        other => other.clone(),
    }
}

impl ModeDeclaration {
    pub fn head(schema: Term) -> Self {
        ModeDeclaration { kind: ModeKind::Head, negated: false, schema }
    }

    pub fn body(schema: Term, negated: bool) -> Self {
        ModeDeclaration { kind: ModeKind::Body, negated, schema }
    }

    /// Builds a declaration from a parsed `modeh(..)` / `modeb(..)` term.
    pub fn from_term(t: &Term) -> Result<Self> {
        let bad = || Error::Data(format!("`{t}` is not a mode declaration"));
        let (kind, inner) = match t {
            Term::Compound(f, args) if args.len() == 1 && f == "modeh" => (ModeKind::Head, &args[0]),
            Term::Compound(f, args) if args.len() == 1 && f == "modeb" => (ModeKind::Body, &args[0]),
            _ => return Err(bad()),
        };
        let (negated, schema) = match inner {
            Term::Compound(f, args) if f == "not" && args.len() == 1 => (true, args[0].clone()),
            other => (false, other.clone()),
        };
        if negated && kind == ModeKind::Head {
            return Err(Error::Data(format!("head mode `{t}` cannot be negated")));
        }
        if schema.functor().is_none() {
            return Err(bad());
        }
        Ok(ModeDeclaration { kind, negated, schema })
    }

    /// Matches the schema against an atom, returning its placemarker slots in order.
    pub fn slots(&self, atom: &Term) -> Option<Vec<Slot>> {
        let mut out = Vec::new();
        match_schema(&self.schema, atom, &mut out).then_some(out)
    }

    /// Whether a literal has this declaration's predicate shape and negation flag.
    pub fn matches_literal(&self, lit: &Literal) -> Option<Vec<Slot>> {
        if lit.negated != self.negated {
            return None;
        }
        self.slots(&lit.atom)
    }

    /// Placemarkers of the schema in left-to-right order.
    pub fn placemarkers(&self) -> Vec<(Marker, String)> {
        let mut out = Vec::new();
        fill_schema(&self.schema, &mut |m, ty| {
            out.push((m, ty.to_string()));
            Term::Int(0)
        });
        out
    }

    /// Instantiates the schema by filling placemarkers in order.
    pub fn instantiate(&self, fill: &mut dyn FnMut(Marker, &str) -> Term) -> Term {
        fill_schema(&self.schema, fill)
    }

    pub fn types(&self) -> BTreeSet<String> {
        self.placemarkers().into_iter().map(|(_, t)| t).collect()
    }
}

impl fmt::Display for ModeDeclaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.kind == ModeKind::Head { "modeh" } else { "modeb" };
        let neg = if self.negated { "not " } else { "" };
        write!(f, "{name}({neg}{}).", self.schema)
    }
}

/// Parses a mode file: one `modeh(..).` or `modeb(..).` fact per declaration.
pub fn parse_modes(src: &str) -> Result<Vec<ModeDeclaration>> {
    let prog = parse_program(src)?;
    prog.clauses
        .iter()
        .map(|c| {
            if !c.body.is_empty() {
                return Err(Error::Data(format!("mode declaration `{c}` must be a fact")));
            }
            ModeDeclaration::from_term(&c.head)
        })
        .collect()
}

/// The depth-bounded mode language `L_i(M)` plus the type domains.
#[derive(Clone, Debug, Default)]
pub struct LanguageConfig {
    pub modes: Vec<ModeDeclaration>,
    pub depth_bound: usize,
    pub type_domains: BTreeMap<String, BTreeSet<Term>>,
}

impl LanguageConfig {
    pub fn new(modes: Vec<ModeDeclaration>, depth_bound: usize) -> Self {
        LanguageConfig { modes, depth_bound, type_domains: BTreeMap::new() }
    }

    pub fn head_modes(&self) -> impl Iterator<Item = &ModeDeclaration> {
        self.modes.iter().filter(|m| m.kind == ModeKind::Head)
    }

    pub fn body_modes(&self) -> impl Iterator<Item = &ModeDeclaration> {
        self.modes.iter().filter(|m| m.kind == ModeKind::Body)
    }

    /// Index of the first body declaration matching a literal (schema declaration order).
    pub fn body_mode_index(&self, lit: &Literal) -> Option<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.kind == ModeKind::Body)
            .find(|(_, m)| m.matches_literal(lit).is_some())
            .map(|(i, _)| i)
    }

    pub fn head_mode(&self, atom: &Term) -> Option<&ModeDeclaration> {
        self.head_modes().find(|m| m.slots(atom).is_some())
    }

    /// Checks that every placemarker type has a domain.
    pub fn validate(&self) -> Result<()> {
        for m in &self.modes {
            for ty in m.types() {
                if !self.type_domains.contains_key(&ty) {
                    return Err(Error::Data(format!("type `{ty}` of `{m}` has no domain")));
                }
            }
        }
        Ok(())
    }
}

/// Depth of a variable; `None` marks a variable unreachable from the head.
pub type Depth = Option<usize>;

/// Variable depth: head variables are 0, others one more than the shallowest
/// variable they share a body literal with.
pub fn variable_depth(c: &Clause) -> BTreeMap<String, Depth> {
    let mut depth: BTreeMap<String, Depth> = c.vars().into_iter().map(|v| (v, None)).collect();
    let lit_vars: Vec<Vec<String>> = c.body.iter().map(|l| l.atom.vars()).collect();
    let mut queue = VecDeque::new();
    for v in c.head.vars() {
        depth.insert(v.clone(), Some(0));
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let d = depth[&v].expect("queued variables have a depth");
        for vars in lit_vars.iter().filter(|vs| vs.contains(&v)) {
            for w in vars {
                if depth[w].is_none() {
                    depth.insert(w.clone(), Some(d + 1));
                    queue.push_back(w.clone());
                }
            }
        }
    }
    depth
}

fn record_type(types: &mut BTreeMap<String, String>, var: &str, ty: &str) -> bool {
    match types.get(var) {
        Some(t) => t == ty,
        None => {
            types.insert(var.to_string(), ty.to_string());
            true
        }
    }
}

/// Membership in `L_i(M)`: mode-conforming head and body, input variables
/// linked to the head or to an earlier output, ground `#` slots, and depth
/// within the bound.
pub fn in_mode_language(c: &Clause, cfg: &LanguageConfig) -> bool {
    let mut types = BTreeMap::new();
    let mut available: BTreeSet<String> = BTreeSet::new();
    let head_ok = cfg.head_modes().any(|m| {
        let Some(slots) = m.slots(&c.head) else {
            return false;
        };
        let mut t = BTreeMap::new();
        let ok = slots.iter().all(|s| match s.marker {
            Marker::Ground => s.term.is_ground(),
            _ => matches!(&s.term, Term::Var(v) if record_type(&mut t, v, &s.ty)),
        });
        if ok {
            types = t;
        }
        ok
    });
    if !head_ok {
        return false;
    }
    available.extend(types.keys().cloned());

    // Each literal needs a declaration whose inputs are available; accept in
    // any order that makes the chain work.
    let mut remaining: Vec<&Literal> = c.body.iter().collect();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|lit| {
            let accepted = cfg.body_modes().any(|m| {
                let Some(slots) = m.matches_literal(lit) else { return false };
                let mut t = types.clone();
                let ok = slots.iter().all(|s| match s.marker {
                    Marker::Ground => s.term.is_ground(),
                    Marker::Input => {
                        matches!(&s.term, Term::Var(v) if available.contains(v) && record_type(&mut t, v, &s.ty))
                    }
                    Marker::Output => matches!(&s.term, Term::Var(v) if record_type(&mut t, v, &s.ty)),
                });
                if ok {
                    for s in &slots {
                        if let (Marker::Output, Term::Var(v)) = (s.marker, &s.term) {
                            available.insert(v.clone());
                        }
                    }
                    types = t;
                }
                ok
            });
            !accepted
        });
        if remaining.len() == before {
            return false;
        }
    }
    variable_depth(c).values().all(|d| matches!(d, Some(d) if *d <= cfg.depth_bound))
}

/// Canonical variable name for the `n`-th variable of a type within a clause.
pub fn variable_name(ty: &str, n: usize) -> String {
    const LETTERS: [&str; 6] = ["X", "Y", "Z", "W", "U", "V"];
    if ty == "time" {
        return if n == 0 { "T".to_string() } else { format!("T{n}") };
    }
    let base = LETTERS[n % LETTERS.len()];
    let round = n / LETTERS.len();
    if round == 0 {
        base.to_string()
    } else {
        format!("{base}{round}")
    }
}

/// Replaces `+`/`-` slot terms with variables (one per distinct typed term)
/// and keeps `#` slots ground.
pub fn variabilize(ground: &Clause, cfg: &LanguageConfig) -> Result<Clause> {
    let mut names: BTreeMap<(String, Term), String> = BTreeMap::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut lift = |m: &ModeDeclaration, atom: &Term| -> Term {
        let slots = m.slots(atom).expect("caller checked the match");
        let mut it = slots.into_iter();
        m.instantiate(&mut |marker, ty| {
            let slot = it.next().expect("slot per placemarker");
            if marker == Marker::Ground {
                return slot.term;
            }
            let key = (ty.to_string(), slot.term);
            let name = names.entry(key).or_insert_with(|| {
                let n = counts.entry(ty.to_string()).or_insert(0);
                *n += 1;
                variable_name(ty, *n - 1)
            });
            Term::Var(name.clone())
        })
    };
    let hm = cfg.head_mode(&ground.head).ok_or_else(|| Error::NoMatchingMode(ground.head.to_string()))?.clone();
    let head = lift(&hm, &ground.head);
    let mut body = Vec::with_capacity(ground.body.len());
    for lit in &ground.body {
        let m = cfg
            .body_modes()
            .find(|m| m.matches_literal(lit).is_some())
            .ok_or_else(|| Error::NoMatchingMode(lit.to_string()))?
            .clone();
        body.push(Literal { atom: lift(&m, &lit.atom), negated: lit.negated });
    }
    Ok(Clause::new(head, body))
}
