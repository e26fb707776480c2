//! Syntactic transformations turning clause search into abduction over `use` atoms.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use crate::error::{Error, Result};
use crate::incremental::support::AnnotatedClause;
use crate::logic::mode::LanguageConfig;
use crate::logic::subsume::subsumption_witness;
use crate::logic::term::{Clause, Literal, Program, Term};

/// A transformed program with the literal each `use` index stands for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformedProgram {
    pub clauses: Program,
    /// `(i, j)` ↦ body literal `j` of Kernel clause `i` (both 1-based).
    pub gen_index: BTreeMap<(usize, usize), Literal>,
    /// `(i, j, k)` ↦ body literal `k` of support clause `j` of hypothesis clause `i`.
    pub ref_index: BTreeMap<(usize, usize, usize), Literal>,
    var_types: Vec<BTreeMap<String, String>>,
}

impl TransformedProgram {
    fn push(&mut self, c: Clause, types: &BTreeMap<String, String>) {
        self.clauses.clauses.push(c);
        self.var_types.push(types.clone());
    }

    fn append(&mut self, other: TransformedProgram) {
        self.clauses.clauses.extend(other.clauses.clauses);
        self.var_types.extend(other.var_types);
        self.gen_index.extend(other.gen_index);
        self.ref_index.extend(other.ref_index);
    }

    /// The program with a type guard `ty(V)` for every variable, so that it
    /// can be grounded over type domains.
    pub fn guarded(&self) -> Program {
        let mut out = Program::default();
        for (c, types) in self.clauses.iter().zip(&self.var_types) {
            let mut body = c.body.clone();
            for v in c.vars() {
                if let Some(ty) = types.get(&v) {
                    body.push(Literal::pos(Term::compound(ty, vec![Term::var(&v)])));
                }
            }
            out.clauses.push(Clause::new(c.head.clone(), body));
        }
        out
    }
}

/// Variable types of a mode-conforming clause.
pub fn clause_var_types(c: &Clause, cfg: &LanguageConfig) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut record = |slots: Vec<crate::logic::mode::Slot>| {
        for s in slots {
            if let Term::Var(v) = s.term {
                out.entry(v).or_insert(s.ty);
            }
        }
    };
    if let Some(m) = cfg.head_mode(&c.head) {
        record(m.slots(&c.head).expect("matched"));
    }
    for l in &c.body {
        if let Some(slots) = cfg.body_modes().find_map(|m| m.matches_literal(l)) {
            record(slots);
        }
    }
    out
}

fn int(n: usize) -> Term {
    Term::Int(n as i64)
}

fn var_tuple(functor: &str, t: &Term) -> Term {
    Term::compound(functor, t.vars().into_iter().map(|v| Term::var(&v)).collect())
}

fn use2(i: usize, j: usize) -> Term {
    Term::compound("use", vec![int(i), int(j)])
}

fn use3(i: usize, j: usize, k: usize) -> Term {
    Term::compound("use", vec![int(i), int(j), int(k)])
}

/// Complement of a literal under negation as failure.
pub fn complement(l: &Literal) -> Literal {
    Literal { atom: l.atom.clone(), negated: !l.negated }
}

/// One `use(i,0)` guard per Kernel clause and a `try/3` choice per body literal.
pub fn generalization_transform(kv: &[Clause], cfg: &LanguageConfig) -> TransformedProgram {
    let mut out = TransformedProgram::default();
    for (i0, k) in kv.iter().enumerate() {
        let i = i0 + 1;
        let types = clause_var_types(k, cfg);
        let mut body = vec![Literal::pos(use2(i, 0))];
        let mut defs = Vec::new();
        for (j0, delta) in k.body.iter().enumerate() {
            let j = j0 + 1;
            let try_atom = Term::compound("try", vec![int(i), int(j), var_tuple("v", &delta.atom)]);
            body.push(Literal::pos(try_atom.clone()));
            defs.push(Clause::new(try_atom.clone(), vec![Literal::pos(use2(i, j)), delta.clone()]));
            defs.push(Clause::new(try_atom, vec![Literal::neg(use2(i, j))]));
            out.gen_index.insert((i, j), delta.clone());
        }
        out.push(Clause::new(k.head.clone(), body), &types);
        for d in defs {
            out.push(d, &types);
        }
    }
    out
}

/// Constraints that keep at least one body literal of every selected Kernel clause.
pub fn nonempty_body_constraints(kv: &[Clause]) -> Program {
    let mut out = Program::default();
    for (i0, k) in kv.iter().enumerate() {
        let i = i0 + 1;
        let kept = Term::compound("kept", vec![int(i)]);
        for j in 1..=k.body.len() {
            out.clauses.push(Clause::new(kept.clone(), vec![Literal::pos(use2(i, j))]));
        }
        out.clauses.push(Clause::new(Term::constant("false"), vec![Literal::pos(use2(i, 0)), Literal::neg(kept)]));
    }
    out
}

/// A support clause expressed over its owner's variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignedSupport {
    /// The owner clause (or its image under the witness when no renaming exists).
    pub base: Clause,
    /// The support clause, sharing the owner's head variables.
    pub gamma: Clause,
    /// 0-based positions of `gamma`'s body literals absent from `base`.
    pub extras: Vec<usize>,
}

impl AlignedSupport {
    /// `base` extended with the given extra literals in support-clause order.
    pub fn specialize(&self, chosen: &[usize]) -> Clause {
        let mut c = self.base.clone();
        for &k in chosen {
            c.body.push(self.gamma.body[k].clone());
        }
        c
    }
}

/// Aligns `gamma` with `owner` through a θ-subsumption witness.
pub fn align_support(owner: &Clause, gamma: &Clause) -> Result<AlignedSupport> {
    let theta = subsumption_witness(owner, gamma)
        .ok_or_else(|| Error::Invariant(format!("support clause `{gamma}` is not subsumed by `{owner}`")))?;
    let owner_vars = owner.vars();
    let mut inverse: BTreeMap<String, String> = BTreeMap::new();
    let mut injective = true;
    for v in &owner_vars {
        match theta.get(v) {
            Some(Term::Var(g)) if !inverse.contains_key(g) => {
                inverse.insert(g.clone(), v.clone());
            }
            None => {}
            _ => injective = false,
        }
    }
    let (base, gamma) = if injective {
        let mut taken: BTreeSet<String> = owner_vars.iter().cloned().collect();
        for g in gamma.vars() {
            if inverse.contains_key(&g) {
                continue;
            }
            let mut name = g.clone();
            let mut n = 1;
            while taken.contains(&name) {
                name = format!("{g}{n}");
                n += 1;
            }
            taken.insert(name.clone());
            inverse.insert(g, name);
        }
        let renamed = gamma.rename_vars(&|v| inverse.get(v).cloned().unwrap_or_else(|| v.to_string()));
        (owner.clone(), renamed)
    } else {
        (theta.apply_clause(owner), gamma.clone())
    };
    let extras = (0..gamma.body.len()).filter(|&k| !base.body.contains(&gamma.body[k])).collect();
    Ok(AlignedSupport { base, gamma, extras })
}

/// One guarded copy of each hypothesis clause per support clause, with an
/// `exception/3` definition per extra support literal.
pub fn refinement_transform(h: &[AnnotatedClause], cfg: &LanguageConfig) -> Result<TransformedProgram> {
    let mut out = TransformedProgram::default();
    for (i0, ac) in h.iter().enumerate() {
        let i = i0 + 1;
        let d = &ac.clause;
        let types = clause_var_types(d, cfg);
        if ac.supp.is_empty() {
            warn!("clause `{d}` has an empty support set and cannot be refined");
            out.push(d.clone(), &types);
            continue;
        }
        let mut part = TransformedProgram::default();
        for (j0, gamma) in ac.supp.iter().enumerate() {
            let j = j0 + 1;
            let a = align_support(d, gamma)?;
            let mut gtypes = types.clone();
            gtypes.extend(clause_var_types(&a.gamma, cfg));
            let exc = Term::compound("exception", vec![int(i), int(j), var_tuple("vars", &a.base.head)]);
            let mut body = a.base.body.clone();
            body.push(Literal::neg(exc.clone()));
            part.push(Clause::new(a.base.head.clone(), body), &gtypes);
            for &k0 in &a.extras {
                let k = k0 + 1;
                let delta = &a.gamma.body[k0];
                part.push(Clause::new(exc.clone(), vec![Literal::pos(use3(i, j, k)), complement(delta)]), &gtypes);
                part.ref_index.insert((i, j, k), delta.clone());
            }
        }
        out.append(part);
    }
    Ok(out)
}
